#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cuspflow/flow.hpp"
#include "cuspflow/metrics.hpp"

namespace cuspflow {

enum class Check { StaticUpper, MovingCap, RateBound, Comparison, Truncation, Functional };

std::string_view check_name(Check c);

enum class GridKind { Uniform, Graded };

struct GridConfig {
    GridKind kind = GridKind::Uniform;
    std::size_t n_nodes = 2049;
    double r_max = 0.9;
    // graded only
    double h_outer = 2.2e-4;
    double log_step = 0.005;
    double r_inner = 1e-8;

    GridPtr build() const;
};

enum class BoundaryMode { Freeze, Exact };

/**
 * One experiment, read from a flat JSON object. Keys (defaults in brackets):
 *
 *   grid            "uniform" | "graded"                         ["uniform"]
 *   n_nodes, r_max                                               [2049, 0.9]
 *   h_outer, log_step, r_inner        graded layout              [2.2e-4, 0.005, 1e-8]
 *   metric          "flat" | "hyperbolic_cusp" | "hyperbolic_band" | "sphere" | "cigar"
 *                   | "truncated_cusp"                           (required)
 *   c, shift, delta, lambda           metric parameters          [0, 0, 0.1, 1]
 *   truncation_levels                 required for truncated_cusp
 *   t_end                                                        (required)
 *   snapshot_times                    explicit list, or
 *   snapshot_count, snapshot_t_min    log-spaced up to t_end     [40, t_end / 1000]
 *   dt_init, dt_max, newton_tol, newton_max_iters, error_tol     [SolverConfig]
 *   boundary        "freeze" | "exact"                           ["freeze"]
 *   inner_radius    inner Dirichlet radius for metrics singular at r = 0   [0.05]
 *   checks          subset of static_upper, moving_cap, rate_bound, comparison,
 *                   truncation, functional                       [none]
 *   probe_radii                                                  [0.02, 0.05, 0.1, 0.2]
 *   rate_bound_max                                               [20]
 *   snapshot_stride write every n-th node to snapshots.csv       [1]
 *   output_dir      [$CUSPFLOW_OUT_DIR, else "out"]
 */
struct ExperimentConfig {
    GridConfig grid;
    MetricSpec initial_metric = metric::Flat{};
    std::vector<double> truncation_levels;
    SolverConfig solver;
    double t_end = 0.0;
    std::vector<double> snapshot_times;
    BoundaryMode boundary = BoundaryMode::Freeze;
    double inner_radius = 0.05;
    std::vector<Check> checks;
    std::vector<double> probe_radii{0.02, 0.05, 0.1, 0.2};
    double rate_bound_max = 20.0;
    std::size_t snapshot_stride = 1;
    std::filesystem::path output_dir;

    bool enabled(Check c) const;
    /// True for metrics that cannot be sampled at r = 0 and therefore run on an annulus.
    bool annulus() const;
};

/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config_text(std::string_view text, const std::string& source = "<string>");

/// Throws ConfigError if the file is missing or invalid.
ExperimentConfig parse_config(const std::filesystem::path& path);

}  // namespace cuspflow
