#include "cuspflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "cuspflow/error.hpp"
#include "cuspflow/metrics.hpp"
#include "cuspflow/surgery.hpp"

namespace cuspflow {

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string level_id(double k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "k%g", k);
    return buf;
}

std::string metric_id(const MetricSpec& spec) {
    static constexpr const char* names[] = {"flat", "hyperbolic_cusp", "hyperbolic_band",
                                            "sphere", "cigar", "truncated_cusp"};
    return names[spec.index()];
}

// Cusp factor on every node with the origin copied from r_1; a stand-in for the
// divergent value that keeps the origin inside the cap.
Field cusp_reference(const GridPtr& grid, double shift) {
    Field a = Field::sample(grid, [&](double r) { return r > 0.0 ? cusp_factor(r) + shift : 0.0; });
    a[0] = a[1];
    return a;
}

double worst_functional_increase(const RunResult& run, double initial, double& at) {
    double prev = initial, worst = -std::numeric_limits<double>::infinity();
    for (const StepRecord& s : run.series.steps) {
        if (s.monitor - prev > worst) {
            worst = s.monitor - prev;
            at = s.t;
        }
        prev = s.monitor;
    }
    return worst;
}

void add_fit(RunResult& run, const std::string& observable, auto&& fit) {
    try {
        run.fits.push_back({run.run_id, observable, fit()});
    } catch (const DomainError& e) {
        std::fprintf(stderr, "%s: no %s fit (%s)\n", run.run_id.c_str(), observable.c_str(), e.what());
    }
}

RunResult run_one(const ExperimentConfig& cfg, const GridPtr& grid, std::optional<double> k) {
    RunResult out;
    out.level = k;
    out.run_id = k ? level_id(*k) : metric_id(cfg.initial_metric);
    const FlowState initial = initial_state(cfg, grid, k.value_or(1.0));
    const double r_max = grid->r_max();

    // Lowest outer value over the run, so that u >= M + 1 holds on the boundary throughout.
    double bc_min = initial.bc_value;
    if (initial.bc.outer_data) {
        bc_min = std::min(initial.bc.outer_data(r_max, 0.0), initial.bc.outer_data(r_max, cfg.t_end));
        for (double t : cfg.snapshot_times) bc_min = std::min(bc_min, initial.bc.outer_data(r_max, t));
    }
    out.functional_level = bc_min - 1.0;
    const bool functional = cfg.enabled(Check::Functional) && !initial.bc.annulus();

    RunOptions opts;
    opts.run_id = out.run_id;
    if (functional) {
        const double M = out.functional_level;
        opts.step_monitor = [M, r_max](const FlowState& s) { return monotone_functional(s.u, M, r_max); };
    }
    out.series = run(initial, cfg.t_end, cfg.solver, cfg.snapshot_times, opts);
    compute_diagnostics(out.series, out.functional_level, r_max);

    for (const Snapshot& s : out.series.snapshots) {
        if (cfg.enabled(Check::StaticUpper)) out.violations.push_back({out.run_id, check_static_upper(s.u, s.t)});
        if (cfg.enabled(Check::MovingCap) && s.t > 0.0 && s.t <= 1.0) {
            out.violations.push_back({out.run_id, check_moving_cap(s.u, s.t)});
        }
    }

    if (cfg.enabled(Check::Truncation) && k) {
        const double shift = std::get<metric::TruncatedCusp>(cfg.initial_metric).shift;
        const Field a = cusp_reference(grid, shift);
        const Field Ka = gauss_curvature(a);
        double M = 0.0;
        for (std::size_t i = 2; i + 1 < grid->size(); ++i) M = std::max(M, -Ka[i]);
        const TruncationReport rep = verify_truncation(initial.u, a, *k, M, 0.05, grid->r(2));
        ViolationReport v;
        v.check = "truncation";
        v.worst_r = rep.equality_radius;
        v.margin = rep.max_excess;
        v.pass = rep.pass();
        out.violations.push_back({out.run_id, v});
    }

    if (functional) {
        ViolationReport v;
        v.check = "functional";
        v.worst_r = r_max;
        v.margin = worst_functional_increase(out, monotone_functional(initial.u, out.functional_level, r_max), v.t);
        v.pass = v.margin <= 1e-8;
        out.violations.push_back({out.run_id, v});
    }

    add_fit(out, "dist_half", [&] { return fit_diameter_law(out.series); });
    add_fit(out, "sup_u_half", [&] { return fit_sup_factor_exponent(out.series); });
    add_fit(out, "sup_abs_K", [&] { return fit_curvature_blowup(out.series).fit; });
    if (k) {
        add_fit(out, "persistence", [&] {
            std::vector<double> x, y;
            for (double r : cfg.probe_radii) {
                if (const auto tau = persistence_time(out.series, r)) {
                    x.push_back(std::log(-std::log(r)));
                    y.push_back(std::log(*tau));
                }
            }
            FitResult f = least_squares(x, y);
            f.t_lo = std::exp(*std::min_element(y.begin(), y.end()));
            f.t_hi = std::exp(*std::max_element(y.begin(), y.end()));
            return f;
        });
    }
    return out;
}

ViolationRow compare(const std::string& id, const Snapshot& lo, auto&& upper, double r_from) {
    ViolationReport v;
    v.check = "comparison";
    v.t = lo.t;
    v.margin = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lo.u.size(); ++i) {
        const double r = lo.u.r(i);
        if (r < r_from) continue;
        const double m = lo.u[i] - upper(i, r);
        if (m > v.margin) {
            v.margin = m;
            v.worst_r = r;
        }
    }
    v.pass = v.margin <= kBarrierSlack;
    return {id, v};
}

void sweep_checks(const ExperimentConfig& cfg, ExperimentResult& res) {
    if (cfg.enabled(Check::Comparison)) {
        const double r_pos = std::numeric_limits<double>::min();
        const bool truncated = std::holds_alternative<metric::TruncatedCusp>(cfg.initial_metric);
        MetricSpec ref = metric::HyperbolicCusp{};
        if (truncated) ref = metric::HyperbolicCusp{std::get<metric::TruncatedCusp>(cfg.initial_metric).shift};
        else ref = cfg.initial_metric;
        const BoundaryData exact = *exact_flow(ref);
        for (std::size_t q = 0; q < res.runs.size(); ++q) {
            const RunResult& lo = res.runs[q];
            const bool last = q + 1 == res.runs.size();
            for (std::size_t j = 0; j < lo.series.snapshots.size(); ++j) {
                const Snapshot& s = lo.series.snapshots[j];
                if (!last) {
                    const Snapshot& hi = res.runs[q + 1].series.snapshots[j];
                    res.sweep_violations.push_back(compare(lo.run_id + "_vs_" + res.runs[q + 1].run_id, s,
                                                           [&](std::size_t i, double) { return hi.u[i]; }, 0.0));
                } else {
                    const std::string id = lo.run_id + (truncated ? "_vs_cusp" : "_vs_exact");
                    res.sweep_violations.push_back(
                        compare(id, s, [&](std::size_t, double r) { return exact(r, s.t); }, r_pos));
                }
            }
        }
    }
    if (cfg.enabled(Check::RateBound)) {
        std::vector<TimeSeries> all;
        for (const RunResult& r : res.runs) all.push_back(r.series);
        res.beta_hat = fit_rate_bound(all);
        ViolationReport v;
        v.check = "rate_bound";
        for (const RunResult& r : res.runs) {
            for (const Snapshot& s : r.series.snapshots) {
                if (!(s.t > 0.0 && s.t <= 1.0)) continue;
                const double sup = s.u.max_up_to(0.5);
                if (sup > 0.0 && s.t * sup == res.beta_hat) {
                    v.t = s.t;
                    for (std::size_t i = 0; i < s.u.size() && s.u.r(i) <= 0.5; ++i) {
                        if (s.u[i] == sup) v.worst_r = s.u.r(i);
                    }
                }
            }
        }
        v.margin = res.beta_hat - cfg.rate_bound_max;
        v.pass = v.margin <= 0.0;
        res.sweep_violations.push_back({"all", v});
    }
}

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << body;
}

std::string violation_line(const ViolationRow& row) {
    const ViolationReport& v = row.report;
    return row.run_id + "," + v.check + "," + num(v.t) + "," + num(v.worst_r) + "," + num(v.margin) + "," +
           (v.pass ? "true" : "false") + "\n";
}

}  // namespace

bool ExperimentResult::all_pass() const {
    for (const RunResult& r : runs) {
        for (const ViolationRow& v : r.violations) {
            if (!v.report.pass) return false;
        }
    }
    for (const ViolationRow& v : sweep_violations) {
        if (!v.report.pass) return false;
    }
    return true;
}

std::optional<BoundaryData> exact_flow(const MetricSpec& spec) {
    if (const auto* m = std::get_if<metric::Flat>(&spec)) {
        const double c = m->c;
        return BoundaryData([c](double, double) { return c; });
    }
    if (const auto* m = std::get_if<metric::HyperbolicCusp>(&spec)) {
        const double c = m->shift;
        return BoundaryData([c](double r, double t) { return cusp_factor(r) + c + 0.5 * std::log1p(2.0 * std::exp(-2.0 * c) * t); });
    }
    if (std::holds_alternative<metric::HyperbolicBand>(spec)) {
        return BoundaryData([spec](double r, double t) { return eval_factor(spec, r) + 0.5 * std::log1p(2.0 * t); });
    }
    if (const auto* m = std::get_if<metric::Sphere>(&spec)) {
        const double lambda = m->lambda, c = m->shift;
        return BoundaryData([lambda, c](double r, double t) {
            return sphere_factor(r / lambda) - std::log(lambda) + c + 0.5 * std::log1p(-2.0 * std::exp(-2.0 * c) * t);
        });
    }
    if (std::holds_alternative<metric::Cigar>(spec)) {
        return BoundaryData([](double r, double t) { return -0.5 * std::log(std::exp(4.0 * t) + r * r); });
    }
    return std::nullopt;
}

FlowState initial_state(const ExperimentConfig& cfg, const GridPtr& grid, double k) {
    const MetricSpec& spec = cfg.initial_metric;
    if (const auto* tc = std::get_if<metric::TruncatedCusp>(&spec)) {
        return init_state(sample(metric::TruncatedCusp{k, tc->shift}, grid));
    }
    const auto exact = exact_flow(spec);
    if (cfg.annulus()) {
        Field u0 = sample_annulus(spec, grid, cfg.inner_radius);
        BoundaryData data = cfg.boundary == BoundaryMode::Exact
                                ? *exact
                                : BoundaryData([spec](double r, double) { return eval_factor(spec, r); });
        return init_annulus(std::move(u0), cfg.inner_radius, std::move(data));
    }
    Field u0 = sample(spec, grid);
    if (cfg.boundary == BoundaryMode::Exact) return init_disc_driven(std::move(u0), *exact);
    return init_state(std::move(u0));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned jobs) {
    const GridPtr grid = cfg.grid.build();
    std::vector<std::optional<double>> levels;
    if (std::holds_alternative<metric::TruncatedCusp>(cfg.initial_metric)) {
        for (double k : cfg.truncation_levels) levels.emplace_back(k);
    } else {
        levels.emplace_back(std::nullopt);
    }

    ExperimentResult res;
    res.runs.resize(levels.size());
    std::vector<std::exception_ptr> errors(levels.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < levels.size(); i = next++) {
            try {
                res.runs[i] = run_one(cfg, grid, levels[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(levels.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    sweep_checks(cfg, res);
    return res;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path parts = dir / "parts";
    fs::create_directories(parts);

    // One file per run and table, merged below in run order.
    std::vector<std::string> names{"snapshots", "diagnostics", "violations", "fits"};
    for (const RunResult& run : result.runs) {
        std::string snap, diag, viol, fits;
        for (const Snapshot& s : run.series.snapshots) {
            const Field K = resolved_curvature(s.u);
            for (std::size_t i = 0; i < s.u.size(); ++i) {
                if (i % cfg.snapshot_stride != 0 && i + 1 != s.u.size()) continue;
                snap += run.run_id + "," + num(s.t) + "," + num(s.u.r(i)) + "," + num(s.u[i]) + "," + num(K[i]) + "\n";
            }
        }
        for (const DiagnosticsRow& d : run.series.diagnostics) {
            diag += run.run_id + "," + num(d.t) + "," + num(d.sup_u_half) + "," + num(d.dist_half) + "," +
                    num(d.sup_abs_K) + "," + num(d.min_K) + "," + num(d.functional_value) + "\n";
        }
        for (const ViolationRow& v : run.violations) viol += violation_line(v);
        for (const FitRow& f : run.fits) {
            fits += f.run_id + "," + f.observable + "," + num(f.fit.slope) + "," + num(f.fit.intercept) + "," +
                    num(f.fit.r_squared) + "," + num(f.fit.t_lo) + "," + num(f.fit.t_hi) + "\n";
        }
        const std::string bodies[] = {snap, diag, viol, fits};
        for (std::size_t n = 0; n < names.size(); ++n) write_file(parts / (run.run_id + "." + names[n] + ".csv"), bodies[n]);
    }

    const std::string headers[] = {
        "run_id,t,r,u,K\n",
        "run_id,t,sup_u_half,dist_half,sup_abs_K,min_K,functional_value\n",
        "run_id,check,t,worst_r,margin,pass\n",
        "run_id,observable,slope,intercept,r_squared,t_lo,t_hi\n",
    };
    for (std::size_t n = 0; n < names.size(); ++n) {
        std::ofstream out(dir / (names[n] + ".csv"), std::ios::binary);
        out << headers[n];
        for (const RunResult& run : result.runs) {
            std::ifstream in(parts / (run.run_id + "." + names[n] + ".csv"), std::ios::binary);
            out << in.rdbuf();
        }
        if (names[n] == "violations") {
            for (const ViolationRow& v : result.sweep_violations) out << violation_line(v);
        }
    }
    fs::remove_all(parts);
    write_file(dir / "summary.json", failure_summary(result) + "\n");
}

std::string failure_summary(const ExperimentResult& result) {
    nlohmann::ordered_json j;
    j["status"] = result.all_pass() ? "pass" : "fail";
    j["beta_hat"] = result.beta_hat;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    auto add = [&](const ViolationRow& v) {
        if (v.report.pass) return;
        failures.push_back({{"run_id", v.run_id},
                            {"check", v.report.check},
                            {"t", v.report.t},
                            {"worst_r", v.report.worst_r},
                            {"margin", v.report.margin}});
    };
    for (const RunResult& r : result.runs) {
        for (const ViolationRow& v : r.violations) add(v);
    }
    for (const ViolationRow& v : result.sweep_violations) add(v);
    j["failures"] = failures;
    return j.dump();
}

}  // namespace cuspflow
