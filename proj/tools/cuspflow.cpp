// Command-line front end: simulate, verify-metrics, fit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cuspflow/analysis.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/error.hpp"
#include "cuspflow/experiment.hpp"
#include "cuspflow/identities.hpp"

namespace {

using namespace cuspflow;

constexpr int kExitChecks = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

int simulate(const std::string& config_path, unsigned jobs, const std::string& out) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    const std::filesystem::path dir = out.empty() ? cfg.output_dir : std::filesystem::path(out);
    ExperimentResult result;
    try {
        result = run_experiment(cfg, jobs);
    } catch (const SolverError& e) {
        std::cout << R"({"status":"solver_failure","message":")" << e.what() << "\"}\n";
        return kExitSolver;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    write_outputs(cfg, result, dir);
    std::cout << failure_summary(result) << "\n";
    return result.all_pass() ? 0 : kExitChecks;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

int fit(const std::string& series_path, const std::string& observable, const std::vector<double>& window,
        const std::string& run_filter) {
    std::ifstream in(series_path);
    if (!in) {
        std::cerr << "cannot open " << series_path << "\n";
        return kExitConfig;
    }
    std::string line;
    std::getline(in, line);
    const std::vector<std::string> header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"run_id", "t", "sup_u_half", "dist_half", "sup_abs_K"}) {
        if (!col.count(need)) {
            std::cerr << series_path << ": missing column '" << need << "' (expected diagnostics.csv)\n";
            return kExitConfig;
        }
    }
    if (observable != "dist_half" && observable != "sup_u_half" && observable != "sup_abs_K") {
        std::cerr << "unknown observable '" << observable << "' (dist_half, sup_u_half, sup_abs_K)\n";
        return kExitConfig;
    }

    std::vector<std::string> order;
    std::map<std::string, TimeSeries> runs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            std::cerr << series_path << ": malformed row '" << line << "'\n";
            return kExitConfig;
        }
        const std::string& id = cells[col["run_id"]];
        if (!run_filter.empty() && id != run_filter) continue;
        if (!runs.count(id)) order.push_back(id);
        DiagnosticsRow d;
        d.t = std::stod(cells[col["t"]]);
        d.sup_u_half = std::stod(cells[col["sup_u_half"]]);
        d.dist_half = std::stod(cells[col["dist_half"]]);
        d.sup_abs_K = std::stod(cells[col["sup_abs_K"]]);
        runs[id].run_id = id;
        runs[id].diagnostics.push_back(d);
    }
    if (order.empty()) {
        std::cerr << "no rows to fit\n";
        return kExitConfig;
    }

    std::optional<Window> w;
    if (!window.empty()) w = Window{window[0], window[1]};
    std::printf("run_id,observable,slope,intercept,r_squared,t_lo,t_hi\n");
    int status = 0;
    for (const std::string& id : order) {
        try {
            FitResult f;
            if (observable == "dist_half") f = fit_diameter_law(runs[id], w);
            else if (observable == "sup_u_half") f = fit_sup_factor_exponent(runs[id], w);
            else f = fit_curvature_blowup(runs[id], w).fit;
            std::printf("%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", id.c_str(), observable.c_str(), f.slope, f.intercept,
                        f.r_squared, f.t_lo, f.t_hi);
        } catch (const DomainError& e) {
            std::cerr << id << ": " << e.what() << "\n";
            status = kExitChecks;
        }
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal Ricci flow on the punctured disc"};
    app.require_subcommand(1);

    std::string config, out;
    unsigned jobs = 1;
    auto* sim = app.add_subcommand("simulate", "Run an experiment and write CSV outputs");
    sim->add_option("--config", config, "Experiment file (JSON)")->required();
    sim->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    sim->add_option("--out", out, "Output directory (default: config output_dir or $CUSPFLOW_OUT_DIR)");

    std::size_t resolution = 4096;
    bool inject = false;
    auto* verify = app.add_subcommand("verify-metrics", "Check the closed-form identities");
    verify->add_option("--resolution", resolution, "Intervals on [0, 0.9]")->check(CLI::Range(64, 1 << 22));
    verify->add_flag("--inject-sign-bug", inject, "Flip the sign of every discrete curvature (checker self-test)");

    std::string series, observable, run_id;
    std::vector<double> window;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a decay law to diagnostics.csv");
    fit_cmd->add_option("--series", series, "diagnostics.csv")->required();
    fit_cmd->add_option("--observable", observable, "dist_half, sup_u_half or sup_abs_K")->required();
    fit_cmd->add_option("--window", window, "t_lo,t_hi")->delimiter(',')->expected(2);
    fit_cmd->add_option("--run-id", run_id, "Only this run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sim) return simulate(config, jobs, out);
        if (*verify) {
            const auto rows = identity_suite({resolution, inject ? -1.0 : 1.0});
            std::cout << format_identity_table(rows);
            for (const auto& r : rows) {
                if (!r.pass) return kExitChecks;
            }
            return 0;
        }
        return fit(series, observable, window, run_id);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitChecks;
    }
}
