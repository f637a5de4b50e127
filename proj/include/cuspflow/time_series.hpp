#pragma once

#include <string>
#include <vector>

#include "cuspflow/grid.hpp"

namespace cuspflow {

struct Snapshot {
    double t = 0.0;
    Field u;
};

/// One accepted time step.
struct StepRecord {
    double t = 0.0;               ///< time after the step
    double dt = 0.0;
    int newton_iters = 0;         ///< summed over the two half steps
    double error_estimate = 0.0;  ///< step-doubling estimate
    double monitor = 0.0;         ///< value of RunOptions::step_monitor, if any
};

/// Observables per snapshot; written as diagnostics.csv.
struct DiagnosticsRow {
    double t = 0.0;
    double sup_u_half = 0.0;  ///< max u over r <= 1/2
    double dist_half = 0.0;   ///< radial length from the origin to r = 1/2
    double sup_abs_K = 0.0;   ///< max |K| over r <= 1/2
    double min_K = 0.0;       ///< min K over all nodes but the boundary node
    double functional_value = 0.0;
};

/// Snapshots in strictly increasing time (the first is the initial state at t = 0 for
/// simulated runs), the accepted steps, and one diagnostics row per snapshot once computed.
struct TimeSeries {
    std::string run_id;
    std::vector<Snapshot> snapshots;
    std::vector<StepRecord> steps;
    std::vector<DiagnosticsRow> diagnostics;
};

}  // namespace cuspflow
