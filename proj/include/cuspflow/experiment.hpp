#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cuspflow/analysis.hpp"
#include "cuspflow/barriers.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/flow.hpp"

namespace cuspflow {

struct ViolationRow {
    std::string run_id;
    ViolationReport report;
};

struct FitRow {
    std::string run_id;
    std::string observable;
    FitResult fit;
};

struct RunResult {
    std::string run_id;
    std::optional<double> level;  ///< truncation level k, if any
    TimeSeries series;
    double functional_level = 0.0;  ///< M used for the monotone functional
    std::vector<ViolationRow> violations;
    std::vector<FitRow> fits;
};

struct ExperimentResult {
    std::vector<RunResult> runs;
    std::vector<ViolationRow> sweep_violations;  ///< comparison chain and rate bound
    double beta_hat = 0.0;

    bool all_pass() const;
};

/// Closed-form flow started from `spec`, if one is known: flat, cusp and band (with
/// v + 1/2 ln(1 + 2 e^{-2 shift} t)), sphere, and the cigar -1/2 ln(e^{4t} + r^2).
std::optional<BoundaryData> exact_flow(const MetricSpec& spec);

/// Initial state for one run (k ignored unless the metric is truncated_cusp).
FlowState initial_state(const ExperimentConfig& cfg, const GridPtr& grid, double k);

/// Runs every level of the config, `jobs` at a time. Propagates SolverError.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned jobs = 1);

/// Writes snapshots.csv, diagnostics.csv, violations.csv, fits.csv and summary.json.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::filesystem::path& dir);

/// Machine-readable summary: status and one entry per failing violation row.
std::string failure_summary(const ExperimentResult& result);

}  // namespace cuspflow
