#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "cuspflow/grid.hpp"
#include "cuspflow/time_series.hpp"

namespace cuspflow {

/// Implicit solver settings. Defaults are the project-wide defaults.
struct SolverConfig {
    double dt_init = 1e-6;
    double dt_max = 1e-3;
    double newton_tol = 1e-10;   ///< sup-norm of the diagonally scaled implicit residual
    int newton_max_iters = 40;
    double error_tol = 1e-6;     ///< step-doubling local error target (sup-norm)

    void validate() const;
};

/// Time-dependent Dirichlet data g(r, t).
using BoundaryData = std::function<double(double r, double t)>;

/**
 * Dirichlet data for a run.
 *
 * Disc mode (inner_index == 0): the origin is a regular interior node and the outer node
 * is held at FlowState::bc_value, or at outer_data(r_max, t) when set.
 *
 * Annulus mode (inner_index > 0): nodes 0..inner_index are prescribed by inner_data and
 * excluded from the solve; only nodes inner_index + 1 .. n - 2 evolve.
 */
struct BoundaryCondition {
    BoundaryData outer_data;
    std::size_t inner_index = 0;
    BoundaryData inner_data;

    bool annulus() const { return inner_index > 0; }
};

struct FlowState {
    Field u;
    double t = 0.0;
    double bc_value = 0.0;
    std::size_t step_count = 0;
    double last_dt = 0.0;
    int last_newton_iters = 0;
    BoundaryCondition bc;

    /// First and last node index updated by the solver.
    std::size_t first_free() const { return bc.annulus() ? bc.inner_index + 1 : 0; }
    std::size_t last_free() const { return u.size() - 2; }
};

/// t = 0 state whose outer Dirichlet value is frozen at u0(r_max).
FlowState init_state(Field u0);

/// Annulus state on [r_inner, r_max] with both ends driven by `exact`; nodes with r < r_inner
/// are held too. The innermost evolving node is the first with r > r_inner.
FlowState init_annulus(Field u0, double r_inner, BoundaryData exact);

/// Disc state whose outer value follows `outer` in time.
FlowState init_disc_driven(Field u0, BoundaryData outer);

/**
 * One backward-Euler step of u_t = e^{-2u} Laplacian(u):
 *
 *     w - u - dt e^{-2w} L w = 0
 *
 * solved for w by damped Newton on the tridiagonal Jacobian. The full step is taken while
 * it lowers the residual, otherwise it is halved. Throws SolverError if the residual does
 * not reach newton_tol within newton_max_iters or stops decreasing.
 */
FlowState step(const FlowState& state, double dt, const SolverConfig& cfg);

struct RunOptions {
    std::string run_id;
    /// Evaluated after every accepted step; stored in StepRecord::monitor.
    std::function<double(const FlowState&)> step_monitor;
};

/**
 * Adaptive integration to t_end. Each step is computed once with dt and once as two
 * half steps; the half-step result is kept when their sup difference is within
 * error_tol. dt is clipped so that every snapshot time is hit exactly. The initial state
 * is stored as the first snapshot.
 *
 * Throws SolverError once dt would drop below 1e-12.
 */
TimeSeries run(const FlowState& initial, double t_end, const SolverConfig& cfg,
               std::span<const double> snapshot_times, const RunOptions& options = {});

/// Convenience overload starting from init_state(u0).
TimeSeries run(Field u0, double t_end, const SolverConfig& cfg, std::span<const double> snapshot_times,
               const RunOptions& options = {});

enum class ExactFlow { Flat, Cusp, Sphere };

/// Closed-form Ricci flows: flat (constant `param`), cusp v(r) + 1/2 ln(1 + 2t) for r in (0, 1),
/// sphere s(r / lambda) - ln(lambda) + 1/2 ln(1 - 2t) with lambda = `param`, t < 1/2.
double exact_solution(ExactFlow kind, double r, double t, double param = 1.0);

}  // namespace cuspflow
