#include "cuspflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cuspflow/error.hpp"
#include "cuspflow/profiles.hpp"

namespace cuspflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string("metric parameter ") + what + " is not finite");
}

void require_open_unit(double r, const char* who) {
    if (!(r > 0.0 && r < 1.0)) {
        std::ostringstream os;
        os << who << ": r = " << r << " outside (0, 1)";
        throw DomainError(os.str());
    }
}

}  // namespace

double cusp_factor(double r) {
    require_open_unit(r, "cusp_factor");
    return -std::log(-r * std::log(r));
}

double sphere_factor(double x) { return std::log(2.0) - std::log1p(x * x); }

std::string describe(const MetricSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const metric::Flat& m) { os << "flat(c=" << m.c << ")"; },
                   [&](const metric::HyperbolicCusp& m) { os << "hyperbolic_cusp(shift=" << m.shift << ")"; },
                   [&](const metric::HyperbolicBand& m) { os << "hyperbolic_band(delta=" << m.delta << ")"; },
                   [&](const metric::Sphere& m) { os << "sphere(lambda=" << m.lambda << ",shift=" << m.shift << ")"; },
                   [&](const metric::Cigar&) { os << "cigar"; },
                   [&](const metric::TruncatedCusp& m) { os << "truncated_cusp(k=" << m.k << ",shift=" << m.shift << ")"; },
               },
               spec);
    return os.str();
}

void validate(const MetricSpec& spec) {
    std::visit(overloaded{
                   [](const metric::Flat& m) { require_finite(m.c, "c"); },
                   [](const metric::HyperbolicCusp& m) { require_finite(m.shift, "shift"); },
                   [](const metric::HyperbolicBand& m) {
                       require_finite(m.delta, "delta");
                       if (!(m.delta > 0.0)) throw DomainError("hyperbolic band: delta must be > 0");
                   },
                   [](const metric::Sphere& m) {
                       require_finite(m.lambda, "lambda");
                       require_finite(m.shift, "shift");
                       if (!(m.lambda > 0.0)) throw DomainError("sphere: lambda must be > 0");
                   },
                   [](const metric::Cigar&) {},
                   [](const metric::TruncatedCusp& m) {
                       require_finite(m.k, "k");
                       require_finite(m.shift, "shift");
                       if (!(m.k > 0.0)) throw DomainError("truncated cusp: k must be > 0");
                   },
               },
               spec);
}

RadiusDomain domain_of(const MetricSpec& spec) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(overloaded{
                          [](const metric::Flat&) { return RadiusDomain{0.0, inf, false}; },
                          [](const metric::HyperbolicCusp&) { return RadiusDomain{0.0, 1.0, true}; },
                          [](const metric::HyperbolicBand& m) {
                              return RadiusDomain{std::exp(-std::numbers::pi / m.delta - m.delta), std::exp(-m.delta), true};
                          },
                          [](const metric::Sphere&) { return RadiusDomain{0.0, inf, false}; },
                          [](const metric::Cigar&) { return RadiusDomain{0.0, inf, false}; },
                          [](const metric::TruncatedCusp&) { return RadiusDomain{0.0, 1.0, false}; },
                      },
                      spec);
}

double eval_factor(const MetricSpec& spec, double r) {
    validate(spec);
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("eval_factor: radius must be finite and >= 0");
    return std::visit(overloaded{
                          [](const metric::Flat& m) { return m.c; },
                          [r](const metric::HyperbolicCusp& m) { return cusp_factor(r) + m.shift; },
                          [r](const metric::HyperbolicBand& m) {
                              require_open_unit(r, "hyperbolic band");
                              const double s = -std::log(r);
                              if (!(s > m.delta && s < std::numbers::pi / m.delta + m.delta)) {
                                  throw DomainError("hyperbolic band: s = -ln r outside (delta, pi/delta + delta)");
                              }
                              const double u_hat = -std::log(std::sin(m.delta * (s - m.delta)) / m.delta);
                              return from_cylinder(u_hat, r);
                          },
                          [r](const metric::Sphere& m) {
                              return sphere_factor(r / m.lambda) - std::log(m.lambda) + m.shift;
                          },
                          [r](const metric::Cigar&) { return -0.5 * std::log1p(r * r); },
                          [r](const metric::TruncatedCusp& m) {
                              if (!(r < 1.0)) throw DomainError("truncated cusp: r must be < 1");
                              if (r == 0.0) return m.k;
                              // The cap value also covers r so small that -r ln r underflows.
                              if (!(-r * std::log(r) > 0.0)) return m.k;
                              return truncate_value(cusp_factor(r) + m.shift, m.k);
                          },
                      },
                      spec);
}

Field sample(const MetricSpec& spec, const GridPtr& grid) {
    return Field::sample(grid, [&](double r) { return eval_factor(spec, r); });
}

Field sample_annulus(const MetricSpec& spec, const GridPtr& grid, double r_inner) {
    const std::size_t first = grid->lower_bound(r_inner);
    if (first >= grid->size()) throw DomainError("sample_annulus: r_inner beyond r_max");
    std::vector<double> v(grid->size());
    for (std::size_t i = first; i < v.size(); ++i) v[i] = eval_factor(spec, grid->r(i));
    for (std::size_t i = 0; i < first; ++i) v[i] = v[first];
    return Field(grid, std::move(v));
}

Field gauss_curvature(const Field& u) {
    Field k = laplacian(u);
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = -std::exp(-2.0 * u[i]) * k[i];
    return k;
}

Field resolved_curvature(const Field& u) {
    const RadialGrid& g = u.grid();
    const Field lap = laplacian(u);
    Field k = gauss_curvature(u);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        const Stencil& s = g.stencil(i);
        double scale = std::max(std::abs(u[i]), std::abs(u[i + 1]));
        if (i > 0) scale = std::max(scale, std::abs(u[i - 1]));
        if (std::abs(lap[i]) <= 8.0 * eps * scale * (s.lower + s.upper)) k[i] = 0.0;
    }
    return k;
}

double to_cylinder(double u_value, double r) {
    require_open_unit(r, "to_cylinder");
    return u_value + std::log(r);
}

double from_cylinder(double u_hat, double r) {
    require_open_unit(r, "from_cylinder");
    return u_hat - std::log(r);
}

double cusp_distance(double r_lo, double r_hi) {
    if (!(r_lo > 0.0 && r_lo < r_hi && r_hi < 1.0)) {
        throw DomainError("cusp_distance: need 0 < r_lo < r_hi < 1");
    }
    return std::log(-std::log(r_lo)) - std::log(-std::log(r_hi));
}

}  // namespace cuspflow
