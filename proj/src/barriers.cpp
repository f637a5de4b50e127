#include "cuspflow/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cuspflow/error.hpp"
#include "cuspflow/metrics.hpp"

namespace cuspflow {

namespace {

const double kHalfLog3 = 0.5 * std::log(3.0);

// ln(1 + e^y) without overflow.
double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

void require_positive_time(double t, const char* who) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be positive");
}

// The barrier lives on 0 < t <= T with T <= 1.
void require_unit_time(double t, const char* who) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError(std::string(who) + ": t must lie in (0, 1]");
}

// r < lambda(t), decided on ln r so that an underflowed lambda still works.
bool inside_cap(double r, double t) { return r == 0.0 || std::log(r) < -6.0 / t; }

// 2 ln(r / lambda), -inf at the origin.
double two_log_x(double r, double t) {
    return r == 0.0 ? -std::numeric_limits<double>::infinity() : 2.0 * (std::log(r) + 6.0 / t);
}

ViolationReport worst_over(const Field& u, double t, std::string check, double r_lo, double r_hi, auto&& barrier) {
    ViolationReport rep;
    rep.check = std::move(check);
    rep.t = t;
    rep.margin = -std::numeric_limits<double>::infinity();
    const RadialGrid& g = u.grid();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = g.r(i);
        if (r < r_lo || r > r_hi) continue;
        const double m = u[i] - barrier(r);
        if (m > rep.margin) {
            rep.margin = m;
            rep.worst_r = r;
        }
    }
    rep.pass = rep.margin <= kBarrierSlack;
    return rep;
}

}  // namespace

double lambda_of_t(double t) {
    require_positive_time(t, "lambda_of_t");
    return std::exp(-6.0 / t);
}

double barrier_h(double r) { return cusp_factor(r) + kHalfLog3; }

double barrier_S(double r, double t) {
    require_positive_time(t, "barrier_S");
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("barrier_S: r must be finite and >= 0");
    const double sphere = std::numbers::ln2 - (r == 0.0 ? 0.0 : softplus(two_log_x(r, t)));
    return sphere + 6.0 / t - std::log(6.0 / t) + kHalfLog3;
}

double barrier_U(double r, double t) {
    require_unit_time(t, "barrier_U");
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("barrier_U: r must lie in [0, 1)");
    return inside_cap(r, t) ? barrier_S(r, t) : barrier_h(r);
}

ResidualTerms supersolution_residual(double r, double t) {
    require_unit_time(t, "supersolution_residual");
    if (!(r >= 0.0)) throw DomainError("supersolution_residual: r must be >= 0");
    if (!inside_cap(r, t)) throw DomainError("supersolution_residual: r must be below lambda(t)");
    const double y = two_log_x(r, t);
    const double q = 1.0 / (1.0 + std::exp(-y));  // x^2 / (1 + x^2)
    const double a = 6.0 / (t * t);

    ResidualTerms out;
    out.time_term = a * (2.0 * q - 1.0) + 1.0 / t;
    // Laplacian(S) = -4 / (lambda^2 (1 + x^2)^2), combined with e^{-2S} in log space.
    const double log_mag = std::log(4.0) + 12.0 / t - 2.0 * (r == 0.0 ? 0.0 : softplus(y)) - 2.0 * barrier_S(r, t);
    out.spatial_term = -std::exp(log_mag);
    out.residual = out.time_term - out.spatial_term;
    return out;
}

ViolationReport check_static_upper(const Field& u, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("check_static_upper: t must be >= 0");
    const double lift = 0.5 * std::log1p(2.0 * t);
    const double r_lo = std::numeric_limits<double>::min();
    return worst_over(u, t, "static_upper", r_lo, 1.0, [&](double r) { return cusp_factor(r) + lift; });
}

ViolationReport check_moving_cap(const Field& u, double t) {
    require_unit_time(t, "check_moving_cap");
    return worst_over(u, t, "moving_cap", 0.0, 1.0, [&](double r) { return barrier_U(r, t); });
}

ViolationReport check_rate_bound(const Field& u, double t, double beta_hat) {
    require_positive_time(t, "check_rate_bound");
    if (!(beta_hat > 0.0)) throw DomainError("check_rate_bound: beta_hat must be > 0");
    return worst_over(u, t, "rate_bound", 0.0, 0.5, [&](double) { return beta_hat / t; });
}

ViolationReport check_barrier(const BarrierSpec& spec, const Field& u, double t) {
    if (const auto* rb = std::get_if<barrier::RateBound>(&spec)) return check_rate_bound(u, t, rb->beta_hat);
    if (std::holds_alternative<barrier::MovingCap>(spec)) return check_moving_cap(u, t);
    return check_static_upper(u, t);
}

double fit_rate_bound(const TimeSeries& series) {
    if (series.snapshots.empty()) throw DomainError("fit_rate_bound: empty series");
    double beta = 0.0;
    for (const Snapshot& s : series.snapshots) {
        if (!(s.t > 0.0 && s.t <= 1.0)) continue;
        const double sup = s.u.max_up_to(0.5);
        if (sup > 0.0) beta = std::max(beta, s.t * sup);
    }
    return beta;
}

double fit_rate_bound(std::span<const TimeSeries> runs) {
    if (runs.empty()) throw DomainError("fit_rate_bound: no runs");
    double beta = 0.0;
    for (const TimeSeries& s : runs) beta = std::max(beta, fit_rate_bound(s));
    return beta;
}

}  // namespace cuspflow
