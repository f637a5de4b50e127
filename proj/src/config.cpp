#include "cuspflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "cuspflow/error.hpp"

namespace cuspflow {

namespace {

using nlohmann::json;

constexpr std::pair<Check, std::string_view> kCheckNames[] = {
    {Check::StaticUpper, "static_upper"}, {Check::MovingCap, "moving_cap"}, {Check::RateBound, "rate_bound"},
    {Check::Comparison, "comparison"},    {Check::Truncation, "truncation"}, {Check::Functional, "functional"},
};

[[noreturn]] void fail(const std::string& source, const std::string& key, const std::string& what) {
    throw ConfigError(source + ": key '" + key + "': " + what);
}

double number(const json& v, const std::string& key, const std::string& source) {
    if (!v.is_number()) fail(source, key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(source, key, "must be finite");
    return x;
}

std::size_t count(const json& v, const std::string& key, const std::string& source) {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(source, key, "expected a nonnegative integer");
    return static_cast<std::size_t>(v.get<long long>());
}

std::string text(const json& v, const std::string& key, const std::string& source) {
    if (!v.is_string()) fail(source, key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& key, const std::string& source) {
    if (!v.is_array()) fail(source, key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], key + "[" + std::to_string(i) + "]", source));
    return out;
}

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) == v.end();
}

}  // namespace

std::string_view check_name(Check c) {
    for (const auto& [check, name] : kCheckNames) {
        if (check == c) return name;
    }
    return "unknown";
}

GridPtr GridConfig::build() const {
    return kind == GridKind::Uniform ? RadialGrid::uniform(n_nodes, r_max)
                                     : RadialGrid::graded(r_max, h_outer, log_step, r_inner);
}

bool ExperimentConfig::enabled(Check c) const { return std::find(checks.begin(), checks.end(), c) != checks.end(); }

bool ExperimentConfig::annulus() const {
    return std::holds_alternative<metric::HyperbolicCusp>(initial_metric) ||
           std::holds_alternative<metric::HyperbolicBand>(initial_metric);
}

ExperimentConfig parse_config_text(std::string_view input, const std::string& source) {
    json j;
    try {
        j = json::parse(input);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source + ": top level must be an object");

    ExperimentConfig cfg;
    std::optional<std::string> metric_name;
    double c = 0.0, shift = 0.0, delta = 0.1, lambda = 1.0;
    std::optional<double> t_end;
    std::size_t snapshot_count = 40;
    std::optional<double> snapshot_t_min;
    std::optional<std::string> output_dir;
    bool have_times = false;

    const std::map<std::string, std::function<void(const json&, const std::string&)>> handlers = {
        {"grid",
         [&](const json& v, const std::string& k) {
             const std::string g = text(v, k, source);
             if (g == "uniform") cfg.grid.kind = GridKind::Uniform;
             else if (g == "graded") cfg.grid.kind = GridKind::Graded;
             else fail(source, k, "unknown grid '" + g + "' (uniform, graded)");
         }},
        {"n_nodes", [&](const json& v, const std::string& k) { cfg.grid.n_nodes = count(v, k, source); }},
        {"r_max", [&](const json& v, const std::string& k) { cfg.grid.r_max = number(v, k, source); }},
        {"h_outer", [&](const json& v, const std::string& k) { cfg.grid.h_outer = number(v, k, source); }},
        {"log_step", [&](const json& v, const std::string& k) { cfg.grid.log_step = number(v, k, source); }},
        {"r_inner", [&](const json& v, const std::string& k) { cfg.grid.r_inner = number(v, k, source); }},
        {"metric", [&](const json& v, const std::string& k) { metric_name = text(v, k, source); }},
        {"c", [&](const json& v, const std::string& k) { c = number(v, k, source); }},
        {"shift", [&](const json& v, const std::string& k) { shift = number(v, k, source); }},
        {"delta", [&](const json& v, const std::string& k) { delta = number(v, k, source); }},
        {"lambda", [&](const json& v, const std::string& k) { lambda = number(v, k, source); }},
        {"truncation_levels",
         [&](const json& v, const std::string& k) { cfg.truncation_levels = numbers(v, k, source); }},
        {"t_end", [&](const json& v, const std::string& k) { t_end = number(v, k, source); }},
        {"snapshot_times",
         [&](const json& v, const std::string& k) {
             cfg.snapshot_times = numbers(v, k, source);
             have_times = true;
         }},
        {"snapshot_count", [&](const json& v, const std::string& k) { snapshot_count = count(v, k, source); }},
        {"snapshot_t_min", [&](const json& v, const std::string& k) { snapshot_t_min = number(v, k, source); }},
        {"dt_init", [&](const json& v, const std::string& k) { cfg.solver.dt_init = number(v, k, source); }},
        {"dt_max", [&](const json& v, const std::string& k) { cfg.solver.dt_max = number(v, k, source); }},
        {"newton_tol", [&](const json& v, const std::string& k) { cfg.solver.newton_tol = number(v, k, source); }},
        {"newton_max_iters",
         [&](const json& v, const std::string& k) {
             cfg.solver.newton_max_iters = static_cast<int>(std::min<std::size_t>(count(v, k, source), 1000000));
         }},
        {"error_tol", [&](const json& v, const std::string& k) { cfg.solver.error_tol = number(v, k, source); }},
        {"boundary",
         [&](const json& v, const std::string& k) {
             const std::string b = text(v, k, source);
             if (b == "freeze") cfg.boundary = BoundaryMode::Freeze;
             else if (b == "exact") cfg.boundary = BoundaryMode::Exact;
             else fail(source, k, "unknown boundary mode '" + b + "' (freeze, exact)");
         }},
        {"inner_radius", [&](const json& v, const std::string& k) { cfg.inner_radius = number(v, k, source); }},
        {"checks",
         [&](const json& v, const std::string& k) {
             if (!v.is_array()) fail(source, k, "expected an array of check names");
             cfg.checks.clear();
             for (const json& item : v) {
                 const std::string name = text(item, k, source);
                 const auto* it = std::find_if(std::begin(kCheckNames), std::end(kCheckNames),
                                               [&](const auto& p) { return p.second == name; });
                 if (it == std::end(kCheckNames)) fail(source, k, "unknown check '" + name + "'");
                 if (!cfg.enabled(it->first)) cfg.checks.push_back(it->first);
             }
         }},
        {"probe_radii", [&](const json& v, const std::string& k) { cfg.probe_radii = numbers(v, k, source); }},
        {"rate_bound_max", [&](const json& v, const std::string& k) { cfg.rate_bound_max = number(v, k, source); }},
        {"snapshot_stride", [&](const json& v, const std::string& k) { cfg.snapshot_stride = count(v, k, source); }},
        {"output_dir", [&](const json& v, const std::string& k) { output_dir = text(v, k, source); }},
    };

    for (const auto& [key, value] : j.items()) {
        const auto it = handlers.find(key);
        if (it == handlers.end()) throw ConfigError(source + ": unknown key '" + key + "'");
        it->second(value, key);
    }

    if (!metric_name) throw ConfigError(source + ": missing required key 'metric'");
    if (!t_end) throw ConfigError(source + ": missing required key 't_end'");
    cfg.t_end = *t_end;
    if (!(cfg.t_end > 0.0)) fail(source, "t_end", "must be positive");

    const std::string& m = *metric_name;
    if (m == "flat") cfg.initial_metric = metric::Flat{c};
    else if (m == "hyperbolic_cusp") cfg.initial_metric = metric::HyperbolicCusp{shift};
    else if (m == "hyperbolic_band") cfg.initial_metric = metric::HyperbolicBand{delta};
    else if (m == "sphere") cfg.initial_metric = metric::Sphere{lambda, shift};
    else if (m == "cigar") cfg.initial_metric = metric::Cigar{};
    else if (m == "truncated_cusp") cfg.initial_metric = metric::TruncatedCusp{1.0, shift};
    else fail(source, "metric", "unknown metric '" + m + "'");
    try {
        validate(cfg.initial_metric);
    } catch (const DomainError& e) {
        fail(source, "metric", e.what());
    }

    const bool truncated = m == "truncated_cusp";
    if (truncated) {
        if (cfg.truncation_levels.empty()) fail(source, "truncation_levels", "required for truncated_cusp");
        if (!strictly_increasing(cfg.truncation_levels)) fail(source, "truncation_levels", "must be strictly increasing");
        if (cfg.truncation_levels.front() < 1.0) fail(source, "truncation_levels", "levels must be >= 1");
        if (shift > 0.0) fail(source, "shift", "must be <= 0 for truncated_cusp (curvature <= -1)");
        if (cfg.boundary == BoundaryMode::Exact) fail(source, "boundary", "truncated flows have no closed form");
    } else if (!cfg.truncation_levels.empty()) {
        fail(source, "truncation_levels", "only applies to metric truncated_cusp");
    }

    try {
        cfg.grid.build();
    } catch (const DomainError& e) {
        fail(source, "grid", e.what());
    }
    if (cfg.grid.r_max < 0.5) fail(source, "r_max", "must be >= 0.5 so that dist_half is defined");

    if (const auto* band = std::get_if<metric::HyperbolicBand>(&cfg.initial_metric)) {
        if (!(cfg.grid.r_max < std::exp(-band->delta))) fail(source, "r_max", "must be below e^{-delta} for the band");
        if (!(cfg.inner_radius > std::exp(-std::acos(-1.0) / band->delta - band->delta))) {
            fail(source, "inner_radius", "must exceed e^{-pi/delta - delta} for the band");
        }
    }
    if (cfg.annulus() && !(cfg.inner_radius > 0.0 && cfg.inner_radius < cfg.grid.r_max)) {
        fail(source, "inner_radius", "must lie in (0, r_max)");
    }
    if (const auto* sph = std::get_if<metric::Sphere>(&cfg.initial_metric)) {
        if (cfg.boundary == BoundaryMode::Exact && !(cfg.t_end < 0.5 * std::exp(2.0 * sph->shift))) {
            fail(source, "t_end", "the sphere flow becomes extinct before t_end");
        }
    }

    if (have_times) {
        if (!strictly_increasing(cfg.snapshot_times)) fail(source, "snapshot_times", "must be strictly increasing");
        if (!cfg.snapshot_times.empty() && !(cfg.snapshot_times.front() > 0.0 && cfg.snapshot_times.back() <= cfg.t_end)) {
            fail(source, "snapshot_times", "must lie in (0, t_end]");
        }
    } else {
        if (snapshot_count < 2) fail(source, "snapshot_count", "must be >= 2");
        const double lo = snapshot_t_min.value_or(cfg.t_end * 1e-3);
        if (!(lo > 0.0 && lo < cfg.t_end)) fail(source, "snapshot_t_min", "must lie in (0, t_end)");
        for (std::size_t i = 0; i < snapshot_count; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(snapshot_count - 1);
            cfg.snapshot_times.push_back(i + 1 == snapshot_count ? cfg.t_end : lo * std::pow(cfg.t_end / lo, f));
        }
    }

    try {
        cfg.solver.validate();
    } catch (const DomainError& e) {
        fail(source, "solver", e.what());
    }
    for (double r : cfg.probe_radii) {
        if (!(r > 0.0 && r < cfg.grid.r_max)) fail(source, "probe_radii", "radii must lie in (0, r_max)");
    }
    if (!(cfg.rate_bound_max > 0.0)) fail(source, "rate_bound_max", "must be positive");
    if (cfg.snapshot_stride < 1) fail(source, "snapshot_stride", "must be >= 1");

    if (output_dir) cfg.output_dir = *output_dir;
    else if (const char* env = std::getenv("CUSPFLOW_OUT_DIR"); env && *env) cfg.output_dir = env;
    else cfg.output_dir = "out";
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

}  // namespace cuspflow
