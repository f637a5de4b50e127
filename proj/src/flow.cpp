#include "cuspflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "cuspflow/error.hpp"
#include "cuspflow/metrics.hpp"

namespace cuspflow {

namespace {

constexpr double kMinDt = 1e-12;

// Thomas elimination; overwrites rhs with the solution. The solver only
// ever sees diagonally dominant rows or rows close to it, so no pivoting.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
                       std::vector<double>& rhs) {
    const std::size_t m = diag.size();
    for (std::size_t i = 1; i < m; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[m - 1] /= diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Implicit residual at the free nodes, scaled row-wise by 1 + dt e^{-2w}(lower + upper)
// so that it is measured in units of u whatever the local stiffness.
struct Residual {
    std::vector<double> value;
    double norm = 0.0;
};

Residual residual(const RadialGrid& g, std::span<const double> w, std::span<const double> u, double dt,
                  std::size_t first, std::size_t last) {
    Residual res;
    res.value.resize(last - first + 1);
    for (std::size_t i = first; i <= last; ++i) {
        const Stencil& s = g.stencil(i);
        const double lap = (i > 0 ? s.lower * (w[i - 1] - w[i]) : 0.0) + s.upper * (w[i + 1] - w[i]);
        const double e = dt * std::exp(-2.0 * w[i]);
        const double r = w[i] - u[i] - e * lap;
        const double scaled = r / (1.0 + e * (s.lower + s.upper));
        res.value[i - first] = r;
        res.norm = std::max(res.norm, std::abs(scaled));
    }
    return res;
}

void set_boundary(FlowState& s, double t) {
    const RadialGrid& g = s.u.grid();
    const std::size_t n = g.size();
    s.u[n - 1] = s.bc.outer_data ? s.bc.outer_data(g.r(n - 1), t) : s.bc_value;
    if (s.bc.annulus()) {
        const double inner = s.bc.inner_data(g.r(s.bc.inner_index), t);
        for (std::size_t i = 0; i <= s.bc.inner_index; ++i) {
            s.u[i] = g.r(i) > 0.0 ? s.bc.inner_data(g.r(i), t) : inner;
        }
    }
}

}  // namespace

void SolverConfig::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string("SolverConfig: ") + name + " must be positive");
    };
    positive(dt_init, "dt_init");
    positive(dt_max, "dt_max");
    positive(newton_tol, "newton_tol");
    positive(error_tol, "error_tol");
    if (newton_max_iters < 4) throw DomainError("SolverConfig: newton_max_iters must be >= 4");
}

FlowState init_state(Field u0) {
    if (!u0.all_finite()) throw DomainError("init_state: initial factor has non-finite values");
    FlowState s{std::move(u0), 0.0, 0.0, 0, 0.0, 0, {}};
    s.bc_value = s.u[s.u.size() - 1];
    return s;
}

FlowState init_annulus(Field u0, double r_inner, BoundaryData exact) {
    if (!exact) throw DomainError("init_annulus: missing boundary data");
    const RadialGrid& g = u0.grid();
    std::size_t inner = g.lower_bound(r_inner);
    if (inner == 0 || inner + 3 >= g.size()) throw DomainError("init_annulus: r_inner must lie strictly inside (0, r_max)");
    FlowState s = init_state(std::move(u0));
    s.bc.inner_index = inner;
    s.bc.inner_data = exact;
    s.bc.outer_data = std::move(exact);
    set_boundary(s, 0.0);
    s.bc_value = s.u[s.u.size() - 1];
    return s;
}

FlowState init_disc_driven(Field u0, BoundaryData outer) {
    if (!outer) throw DomainError("init_disc_driven: missing boundary data");
    FlowState s = init_state(std::move(u0));
    s.bc.outer_data = std::move(outer);
    set_boundary(s, 0.0);
    s.bc_value = s.u[s.u.size() - 1];
    return s;
}

FlowState step(const FlowState& state, double dt, const SolverConfig& cfg) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step: dt must be positive");
    const RadialGrid& g = state.u.grid();
    const std::size_t first = state.first_free();
    const std::size_t last = state.last_free();
    const std::size_t m = last - first + 1;

    FlowState next = state;
    next.t = state.t + dt;
    set_boundary(next, next.t);
    std::span<double> w = next.u.values();
    std::span<const double> u = state.u.values();

    std::vector<double> lower(m), diag(m), upper(m), rhs(m), trial(w.begin(), w.end());
    Residual res = residual(g, w, u, dt, first, last);
    int iters = 0;
    while (res.norm > cfg.newton_tol) {
        if (iters == cfg.newton_max_iters) {
            std::ostringstream os;
            os << "step: Newton did not converge in " << iters << " iterations (dt = " << dt
               << ", residual = " << res.norm << ")";
            throw SolverError(os.str());
        }
        ++iters;
        for (std::size_t i = first; i <= last; ++i) {
            const Stencil& s = g.stencil(i);
            const double lap = (i > 0 ? s.lower * (w[i - 1] - w[i]) : 0.0) + s.upper * (w[i + 1] - w[i]);
            const double e = dt * std::exp(-2.0 * w[i]);
            const std::size_t k = i - first;
            diag[k] = 1.0 + e * (s.lower + s.upper) + 2.0 * e * lap;
            lower[k] = i > first ? -e * s.lower : 0.0;
            upper[k] = i < last ? -e * s.upper : 0.0;
            rhs[k] = -res.value[k];
        }
        solve_tridiagonal(lower, diag, upper, rhs);

        double damping = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 40; ++halvings) {
            std::copy(w.begin(), w.end(), trial.begin());
            bool finite = true;
            for (std::size_t k = 0; k < m; ++k) {
                trial[first + k] += damping * rhs[k];
                finite = finite && std::isfinite(trial[first + k]);
            }
            if (finite) {
                Residual cand = residual(g, trial, u, dt, first, last);
                if (cand.norm < res.norm) {
                    std::copy(trial.begin(), trial.end(), w.begin());
                    res = std::move(cand);
                    improved = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if (!improved) {
            std::ostringstream os;
            os << "step: Newton residual stagnated at " << res.norm << " (dt = " << dt << ")";
            throw SolverError(os.str());
        }
    }
    next.step_count = state.step_count + 1;
    next.last_dt = dt;
    next.last_newton_iters = iters;
    return next;
}

TimeSeries run(const FlowState& initial, double t_end, const SolverConfig& cfg,
               std::span<const double> snapshot_times, const RunOptions& options) {
    cfg.validate();
    if (!(t_end > initial.t)) throw DomainError("run: t_end must exceed the initial time");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        const double ts = snapshot_times[i];
        if (!(ts > initial.t && ts <= t_end)) throw DomainError("run: snapshot times must lie in (t0, t_end]");
        if (i > 0 && !(ts > snapshot_times[i - 1])) throw DomainError("run: snapshot times must be strictly increasing");
    }

    TimeSeries series;
    series.run_id = options.run_id;
    series.snapshots.push_back({initial.t, initial.u});

    std::vector<double> targets(snapshot_times.begin(), snapshot_times.end());
    if (targets.empty() || targets.back() < t_end) targets.push_back(t_end);
    const std::size_t n_requested = snapshot_times.size();

    FlowState state = initial;
    double dt = std::min(cfg.dt_init, cfg.dt_max);
    const std::size_t first = state.first_free();
    const std::size_t last = state.last_free();

    for (std::size_t target_index = 0; target_index < targets.size(); ++target_index) {
        const double target = targets[target_index];
        while (state.t < target) {
            const double remaining = target - state.t;
            // Land exactly on the target instead of leaving a sliver behind.
            const bool clipped = dt >= remaining * (1.0 - 1e-9);
            const double h = clipped ? remaining : dt;

            std::optional<FlowState> full, half;
            try {
                full = step(state, h, cfg);
                half = step(step(state, 0.5 * h, cfg), 0.5 * h, cfg);
            } catch (const SolverError&) {
                dt = 0.5 * h;
                if (dt < kMinDt) throw;
                continue;
            }
            double err = 0.0;
            for (std::size_t i = first; i <= last; ++i) err = std::max(err, std::abs(full->u[i] - half->u[i]));

            const double factor = err > 0.0 ? 0.9 * std::sqrt(cfg.error_tol / err) : 2.0;
            if (err <= cfg.error_tol) {
                if (clipped) half->t = target;
                half->step_count = state.step_count + 1;
                half->last_dt = h;
                StepRecord rec{half->t, h, half->last_newton_iters, err, 0.0};
                state = std::move(*half);
                if (options.step_monitor) rec.monitor = options.step_monitor(state);
                series.steps.push_back(rec);
                const double grown = h * std::clamp(factor, 0.2, 2.0);
                dt = std::min(cfg.dt_max, clipped ? std::max(dt, grown) : grown);
            } else {
                dt = h * std::clamp(factor, 0.2, 0.9);
                if (dt < kMinDt) {
                    std::ostringstream os;
                    os << "run: time step underflow at t = " << state.t;
                    throw SolverError(os.str());
                }
            }
        }
        if (target_index < n_requested) series.snapshots.push_back({state.t, state.u});
    }
    return series;
}

TimeSeries run(Field u0, double t_end, const SolverConfig& cfg, std::span<const double> snapshot_times,
               const RunOptions& options) {
    return run(init_state(std::move(u0)), t_end, cfg, snapshot_times, options);
}

double exact_solution(ExactFlow kind, double r, double t, double param) {
    if (!(t >= 0.0)) throw DomainError("exact_solution: t must be >= 0");
    switch (kind) {
        case ExactFlow::Flat:
            return param;
        case ExactFlow::Cusp:
            return cusp_factor(r) + 0.5 * std::log1p(2.0 * t);
        case ExactFlow::Sphere:
            if (!(t < 0.5)) throw DomainError("exact_solution: the sphere flow exists only for t < 1/2");
            if (!(param > 0.0)) throw DomainError("exact_solution: sphere lambda must be > 0");
            if (!(r >= 0.0)) throw DomainError("exact_solution: r must be >= 0");
            return sphere_factor(r / param) - std::log(param) + 0.5 * std::log1p(-2.0 * t);
    }
    throw DomainError("exact_solution: unknown kind");
}

}  // namespace cuspflow
