// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is 0 only if every criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuspflow/analysis.hpp"
#include "cuspflow/barriers.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/experiment.hpp"
#include "cuspflow/flow.hpp"
#include "cuspflow/identities.hpp"
#include "cuspflow/metrics.hpp"
#include "cuspflow/surgery.hpp"

using namespace cuspflow;
namespace fs = std::filesystem;

namespace {

const std::string kCli = CUSPFLOW_CLI;
const fs::path kConfigs = CUSPFLOW_CONFIGS;

// Tolerances.
constexpr double kIdentityTol = 1e-3;
constexpr double kRatioLo = 2.8, kRatioHi = 5.5;
constexpr double kRegressionTol = 2e-4;
constexpr double kRegressionDtMax = 1e-4;
constexpr double kRegressionT = 0.2;
constexpr double kTruncationTol = 0.05;
constexpr double kBarrierTol = 1e-6;  // also the comparison slack
constexpr double kBetaMax = 20.0;
constexpr double kResidualRel = 1e-6;
constexpr double kDiamSlopeLo = 0.5, kDiamSlopeHi = 2.5, kDiamR2 = 0.9;
constexpr double kSupSlopeLo = -1.3, kSupSlopeHi = -0.4;
constexpr double kPersistSlope = -2.0, kPersistTol = 0.7;
constexpr double kFunctionalTol = 1e-8;
constexpr double kFitLevel = 12.0;

int failures = 0;
// Lines keyed by criterion, printed in order at the end; notes attach to the last report.
std::map<int, std::vector<std::string>> lines;
int last_id = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    char head[64];
    std::snprintf(head, sizeof head, "[%s] %2d %-28s ", pass ? "PASS" : "FAIL", id, name.c_str());
    lines[id].push_back(head + detail);
    last_id = id;
    if (!pass) ++failures;
}

void note(const std::string& text) { lines[last_id].push_back("          " + text); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
    const fs::path capture = fs::temp_directory_path() / "cuspflow_acceptance_stdout.txt";
    const std::string cmd = kCli + " " + args + " > " + capture.string() + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    if (out) {
        std::ifstream in(capture);
        std::ostringstream s;
        s << in.rdbuf();
        *out = s.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const RunResult& run_at(const ExperimentResult& res, double k) {
    for (const RunResult& r : res.runs) {
        if (r.level && *r.level == k) return r;
    }
    throw std::runtime_error("no run at the requested level");
}

// 1
void curvature_identities() {
    const auto rows = identity_suite({4096, 1.0});
    bool pass = true;
    double worst = 0.0, ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0;
    for (const IdentityRow& r : rows) {
        if (r.name.rfind("K(", 0) == 0) {
            worst = std::max(worst, std::abs(r.value - r.expected));
            pass = pass && std::abs(r.value - r.expected) <= kIdentityTol;
        } else if (r.name.rfind("refinement", 0) == 0) {
            ratio_lo = std::min(ratio_lo, r.value);
            ratio_hi = std::max(ratio_hi, r.value);
            pass = pass && r.value >= kRatioLo && r.value <= kRatioHi;
        }
    }
    report(1, "curvature identities", pass,
           fmt("max |K - K_exact| = %.2e (tol %.0e) at N = 4096; refinement ratios in [%.2f, %.2f] (need [%.1f, %.1f])",
               worst, kIdentityTol, ratio_lo, ratio_hi, kRatioLo, kRatioHi));
}

// 2
double regression_error(const MetricSpec& spec, bool annulus) {
    const GridPtr g = RadialGrid::uniform(2049, 0.9);
    const BoundaryData exact = *exact_flow(spec);
    const double r_in = 0.05;
    const FlowState s0 = annulus ? init_annulus(sample_annulus(spec, g, r_in), r_in, exact)
                                 : init_disc_driven(sample(spec, g), exact);
    const std::size_t first = annulus ? g->lower_bound(r_in) : 0;
    double worst = 0.0;
    RunOptions opts;
    opts.step_monitor = [&](const FlowState& s) {
        for (std::size_t i = first; i < s.u.size(); ++i) worst = std::max(worst, std::abs(s.u[i] - exact(g->r(i), s.t)));
        return 0.0;
    };
    SolverConfig cfg;
    cfg.dt_max = kRegressionDtMax;
    run(s0, kRegressionT, cfg, {}, opts);
    return worst;
}

void regressions() {
    const double cusp = regression_error(metric::HyperbolicCusp{}, true);
    const double sphere = regression_error(metric::Sphere{}, false);
    report(2, "exact-solution regressions", cusp <= kRegressionTol && sphere <= kRegressionTol,
           fmt("sup error over every step, t in [0, %.1f], N = 2049, dt <= %.0e: annulus cusp %.2e, sphere %.2e (tol %.0e)",
               kRegressionT, kRegressionDtMax, cusp, sphere, kRegressionTol));
}

// 3
void truncation_suite(const ExperimentConfig& cfg) {
    const GridPtr g = cfg.grid.build();
    Field a = Field::sample(g, [](double r) { return r > 0.0 ? cusp_factor(r) : 0.0; });
    a[0] = a[1];
    const Field Ka = gauss_curvature(a);
    double M = 0.0;
    for (std::size_t i = 2; i + 1 < g->size(); ++i) M = std::max(M, -Ka[i]);

    bool pass = true, increasing = true;
    double min_k_floor = std::numeric_limits<double>::infinity(), cap = 0.0;
    std::optional<Field> prev;
    for (double k : cfg.truncation_levels) {
        const Field uk = truncate(metric::HyperbolicCusp{}, g, k);
        const TruncationReport rep = verify_truncation(uk, a, k, M, kTruncationTol, g->r(2));
        pass = pass && rep.pass() && rep.cap_curvature == 0.0;
        min_k_floor = std::min(min_k_floor, rep.min_curvature);
        cap = std::max(cap, rep.cap_curvature);
        if (prev) {
            for (std::size_t i = 0; i < g->size(); ++i) increasing = increasing && (*prev)[i] <= uk[i];
        }
        prev = uk;
    }
    report(3, "truncation lemma suite", pass && increasing,
           fmt("k = 4, 8, 12 on %zu graded nodes: (i)-(iii) exact; min K = %.4f >= -e^2 M - %.2f = %.4f (M = %.6f); "
               "max |K| on cap %.1g; u_k increasing in k: %s",
               g->size(), min_k_floor, kTruncationTol, -std::exp(2.0) * M - kTruncationTol, M, cap,
               increasing ? "yes" : "no"));
}

// 4, 5, 10
void sweep_criteria(const ExperimentResult& res) {
    bool chain = true, barriers = true, functional = true, rate = true;
    double chain_worst = -1e300, static_worst = -1e300, cap_worst = -1e300, func_worst = -1e300;
    std::size_t n_chain = 0, n_static = 0, n_cap = 0;
    for (const ViolationRow& v : res.sweep_violations) {
        if (v.report.check == "comparison") {
            chain = chain && v.report.margin <= kBarrierTol;
            chain_worst = std::max(chain_worst, v.report.margin);
            ++n_chain;
        }
        if (v.report.check == "rate_bound") rate = v.report.pass;
    }
    for (const RunResult& r : res.runs) {
        for (const ViolationRow& v : r.violations) {
            if (v.report.check == "static_upper") {
                barriers = barriers && v.report.margin <= kBarrierTol;
                static_worst = std::max(static_worst, v.report.margin);
                ++n_static;
            } else if (v.report.check == "moving_cap") {
                barriers = barriers && v.report.margin <= kBarrierTol;
                cap_worst = std::max(cap_worst, v.report.margin);
                ++n_cap;
            } else if (v.report.check == "functional") {
                functional = functional && v.report.margin <= kFunctionalTol;
                func_worst = std::max(func_worst, v.report.margin);
            }
        }
    }
    report(4, "comparison chain", chain && n_chain > 0,
           fmt("u_4 <= u_8 <= u_12 <= cusp flow + %.0e on %zu snapshot pairs; worst margin %.2e", kBarrierTol, n_chain,
               chain_worst));
    report(5, "barrier certificates", barriers && rate && res.beta_hat <= kBetaMax && n_static > 0 && n_cap > 0,
           fmt("static upper worst %.2e over %zu snapshots, moving cap worst %.2e over %zu (tol %.0e); beta_hat = %.4f "
               "(<= %.0f)",
               static_worst, n_static, cap_worst, n_cap, kBarrierTol, res.beta_hat, kBetaMax));
    report(10, "monotone functional", functional,
           fmt("largest per-step increase %.2e over %zu runs (tol %.0e)", func_worst, res.runs.size(), kFunctionalTol));
}

// 6
void residual_sample() {
    double min_ratio = std::numeric_limits<double>::infinity(), spatial = 0.0;
    for (int j = 0; j < 20; ++j) {
        const double t = 0.05 + 0.9 * j / 19.0;
        for (int i = 0; i < 20; ++i) {
            const ResidualTerms rt = supersolution_residual(lambda_of_t(t) * i / 20.0, t);
            min_ratio = std::min(min_ratio, rt.residual / (6.0 / (t * t)));
            spatial = std::max(spatial, std::abs(rt.spatial_term / (-12.0 / (t * t)) - 1.0));
        }
    }
    report(6, "supersolution residual", min_ratio >= 1.0 - kResidualRel && spatial <= kResidualRel,
           fmt("20 x 20 sample, t in [0.05, 0.95], r = i lambda / 20: min residual / (6/t^2) = %.6f, "
               "max |spatial / (-12/t^2) - 1| = %.1e",
               min_ratio, spatial));
}

// 7, 8, 9, 11
void fits(const ExperimentResult& res, const ExperimentConfig& cfg) {
    const RunResult& run = run_at(res, kFitLevel);
    const TimeSeries& s = run.series;
    last_id = 0;
    note(fmt("fit windows are implementation-calibrated: snapshots %zu log-spaced in [%.1e, %.1f], auto window drops 15%% "
             "of log-time at each end and keeps the longest monotone run",
             cfg.snapshot_times.size(), cfg.snapshot_times.front(), cfg.t_end));

    // 7
    try {
        const FitResult f = fit_diameter_law(s);
        bool bounded = true;
        double worst = -1e300;
        for (const DiagnosticsRow& d : s.diagnostics) {
            if (d.t < f.t_lo || d.t > f.t_hi) continue;
            worst = std::max(worst, d.dist_half - (-2.0 * std::log(d.t) + 3.0));
            bounded = bounded && d.dist_half <= -2.0 * std::log(d.t) + 3.0;
        }
        const bool pass = f.slope >= kDiamSlopeLo && f.slope <= kDiamSlopeHi && f.r_squared >= kDiamR2 && bounded;
        report(7, "diameter law (k = 12)", pass,
               fmt("window [%.4g, %.4g] (%zu rows): slope %.4f (need [%.1f, %.1f]), r^2 %.4f (need >= %.1f), "
                   "max dist_half - (-2 ln t + 3) = %.3f",
                   f.t_lo, f.t_hi, f.points, f.slope, kDiamSlopeLo, kDiamSlopeHi, f.r_squared, kDiamR2, worst));
        if (!pass) {
            note("finite-k saturation: the cap front moves like s* ~ 1/(2t + 1/s_k), s_k ~ 14.5 for k = 12, so dist_half");
            note("changes little until t ~ 0.03 and the 1/2 ln(1+2t) lift flattens it beyond; see README");
        }
    } catch (const std::exception& e) {
        report(7, "diameter law (k = 12)", false, std::string("no fit: ") + e.what());
    }

    // 8
    const double bc = s.snapshots.front().u[s.snapshots.front().u.size() - 1];
    std::optional<Window> scaling;
    try {
        scaling = sup_band_window(s, 2.0 * bc, 0.8 * kFitLevel);
        const FitResult f = fit_sup_factor_exponent(s, scaling);
        std::string auto_part;
        try {
            const FitResult a = fit_sup_factor_exponent(s);
            auto_part = fmt("; auto window [%.4g, %.4g] slope %.4f", a.t_lo, a.t_hi, a.slope);
        } catch (const std::exception&) {
        }
        report(8, "sup-factor exponent (k = 12)", f.slope >= kSupSlopeLo && f.slope <= kSupSlopeHi,
               fmt("scaling window sup_u_half in [2 x %.3f, 0.8 k] -> t in [%.4g, %.4g] (%zu rows): slope %.4f "
                   "(need [%.1f, %.1f])%s",
                   bc, f.t_lo, f.t_hi, f.points, f.slope, kSupSlopeLo, kSupSlopeHi, auto_part.c_str()));
    } catch (const std::exception& e) {
        report(8, "sup-factor exponent (k = 12)", false, std::string("no fit: ") + e.what());
    }

    // 9
    {
        std::vector<double> x, y;
        std::string crossings;
        for (double r : cfg.probe_radii) {
            const auto tau = persistence_time(s, r);
            crossings += fmt(" r=%.2g: %s", r, tau ? fmt("tau=%.4g", *tau).c_str() : "beyond horizon");
            if (tau) {
                x.push_back(std::log(-std::log(r)));
                y.push_back(std::log(*tau));
            }
        }
        if (x.size() >= 2) {
            const FitResult f = least_squares(x, y);
            report(9, "persistence scaling (k = 12)", std::abs(f.slope - kPersistSlope) <= kPersistTol,
                   fmt("slope %.3f (need %.1f +- %.1f);%s", f.slope, kPersistSlope, kPersistTol, crossings.c_str()));
        } else {
            report(9, "persistence scaling (k = 12)", false,
                   fmt("fewer than 2 probes cross u(r, 0) - 1 by t = %.2f;%s", cfg.t_end, crossings.c_str()));
            note("u never drops below min u_0 = v(1/e) = 1 by the minimum principle, and u(r, 0) - 1 < 1 at the");
            note("probes that do not cross, so their thresholds are unreachable; see README");
        }
    }

    // 11
    try {
        const Window w = scaling ? *scaling : auto_window({}, {});
        const BlowupFit b = fit_curvature_blowup(s, w);
        std::string auto_part;
        try {
            const BlowupFit a = fit_curvature_blowup(s);
            auto_part = fmt("; auto window [%.4g, %.4g]: slope %.3f, t sup|K| monotone: %s", a.fit.t_lo, a.fit.t_hi,
                            a.fit.slope, a.type_iic ? "yes" : "no");
        } catch (const std::exception&) {
        }
        double peak = 0.0, t_peak = 0.0;
        for (const DiagnosticsRow& d : s.diagnostics) {
            if (d.t > 0.0 && d.t * d.sup_abs_K > peak) {
                peak = d.t * d.sup_abs_K;
                t_peak = d.t;
            }
        }
        report(11, "curvature blow-up (k = 12)", b.type_iic,
               fmt("scaling window [%.4g, %.4g]: t sup|K| increasing as t decreases: %s; fitted exponent %.3f "
                   "(heuristic -2, reported only)%s; t sup|K| peaks at %.3f at t = %.3g",
                   b.fit.t_lo, b.fit.t_hi, b.type_iic ? "yes" : "no", b.fit.slope, auto_part.c_str(), peak, t_peak));
        if (!b.type_iic) {
            note("sup|K| of a fixed-k flow stays bounded by its cap as t -> 0, so t sup|K| falls below the peak;");
            note("the increase as t decreases holds only above the peak; see README");
        }
    } catch (const std::exception& e) {
        report(11, "curvature blow-up (k = 12)", false, std::string("no fit: ") + e.what());
    }
}

// 12
void determinism() {
    const fs::path base = fs::temp_directory_path() / ("cuspflow_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(base);
    const std::string sweep = (kConfigs / "truncated_sweep.json").string();
    const int a = run_cli("simulate --config " + sweep + " --jobs 1 --out " + (base / "a").string());
    const int b = run_cli("simulate --config " + sweep + " --jobs 3 --out " + (base / "b").string());
    bool identical = a == 0 && b == 0;
    std::size_t bytes = 0;
    for (const char* f : {"snapshots.csv", "diagnostics.csv", "violations.csv", "fits.csv", "summary.json"}) {
        const std::string x = slurp(base / "a" / f), y = slurp(base / "b" / f);
        identical = identical && !x.empty() && x == y;
        bytes += x.size();
    }

    std::string summary;
    const int bad = run_cli("simulate --config " + (kConfigs / "corrupted_cusp.json").string() + " --out " +
                                (base / "bad").string(),
                            &summary);
    bool bad_reported = false;
    try {
        const auto j = nlohmann::json::parse(summary);
        bad_reported = j["status"] == "fail" && !j["failures"].empty() && j["failures"][0]["check"] == "static_upper";
    } catch (const std::exception&) {
    }
    const int ok = run_cli("simulate --config " + (kConfigs / "flat.json").string() + " --out " + (base / "ok").string());
    std::ofstream(base / "typo.json") << R"({"metric": "flat", "t_end": 1, "t_ned": 2})";
    const int cfg_err = run_cli("simulate --config " + (base / "typo.json").string());
    std::ofstream(base / "stall.json") << R"({"metric": "truncated_cusp", "grid": "graded", "truncation_levels": [8],
        "t_end": 0.1, "newton_tol": 1e-16, "newton_max_iters": 4})";
    const int solver = run_cli("simulate --config " + (base / "stall.json").string() + " --out " + (base / "stall").string());
    const int sign_bug = run_cli("verify-metrics --inject-sign-bug");
    fs::remove_all(base);

    const bool contract = bad == 1 && bad_reported && ok == 0 && cfg_err == 2 && solver == 3 && sign_bug == 1;
    report(12, "determinism and exit codes", identical && contract,
           fmt("two sweeps (--jobs 1, --jobs 3): %s (%zu bytes); exit codes: injected violation %d, clean %d, "
               "config error %d, solver failure %d, injected sign bug %d (want 1, 0, 2, 3, 1)",
               identical ? "byte-identical" : "DIFFERENT", bytes, bad, ok, cfg_err, solver, sign_bug));
}

}  // namespace

int main() {
    std::printf("acceptance: 12 criteria\n");
    curvature_identities();
    regressions();
    const ExperimentConfig cfg = parse_config(kConfigs / "truncated_sweep.json");
    truncation_suite(cfg);
    const ExperimentResult res = run_experiment(cfg, 3);
    sweep_criteria(res);
    residual_sample();
    fits(res, cfg);
    determinism();
    for (const auto& [id, text] : lines) {
        for (const std::string& l : text) std::printf("%s\n", l.c_str());
    }
    std::printf("acceptance: %d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
