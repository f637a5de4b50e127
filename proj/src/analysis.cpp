#include "cuspflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cuspflow/error.hpp"
#include "cuspflow/metrics.hpp"
#include "cuspflow/profiles.hpp"

namespace cuspflow {

namespace {

struct Rows {
    std::vector<double> t;
    std::vector<double> y;
};

// Diagnostics rows with t > 0 and the chosen observable.
template <class Get>
Rows observable(const TimeSeries& series, Get get) {
    if (series.diagnostics.empty()) throw DomainError("fit: series has no diagnostics rows");
    Rows rows;
    for (const DiagnosticsRow& d : series.diagnostics) {
        if (d.t > 0.0) {
            rows.t.push_back(d.t);
            rows.y.push_back(get(d));
        }
    }
    return rows;
}

Rows restrict(const Rows& all, const std::optional<Window>& window) {
    const Window w = window ? *window : auto_window(all.t, all.y);
    if (!(w.t_lo < w.t_hi)) throw DomainError("fit: window needs t_lo < t_hi");
    Rows out;
    for (std::size_t i = 0; i < all.t.size(); ++i) {
        if (all.t[i] >= w.t_lo && all.t[i] <= w.t_hi) {
            out.t.push_back(all.t[i]);
            out.y.push_back(all.y[i]);
        }
    }
    if (out.t.empty()) throw DomainError("fit: empty window");
    return out;
}

FitResult fit_in_window(const Rows& rows, auto x_of, auto y_of) {
    std::vector<double> x(rows.t.size()), y(rows.t.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = x_of(rows.t[i]);
        y[i] = y_of(rows.y[i]);
    }
    FitResult fit = least_squares(x, y);
    fit.t_lo = rows.t.front();
    fit.t_hi = rows.t.back();
    return fit;
}

}  // namespace

double distance_to_half(const Field& u) {
    if (u.grid().r_max() < 0.5) throw DomainError("distance_to_half: grid does not reach r = 1/2");
    return integrate_radial(u, 0.0, 0.5);
}

FitResult least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("least_squares: size mismatch");
    if (x.size() < 2) throw DomainError("least_squares: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("least_squares: x values are all equal");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = x.size();
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

Window auto_window(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw DomainError("auto_window: size mismatch");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > 0.0) idx.push_back(i);
    }
    if (idx.size() < 2) throw DomainError("auto_window: need at least two positive times");
    const double lo = std::log(t[idx.front()]);
    const double hi = std::log(t[idx.back()]);
    const double cut = 0.15 * (hi - lo);
    std::vector<std::size_t> kept;
    for (std::size_t i : idx) {
        const double lt = std::log(t[i]);
        if (lt >= lo + cut && lt <= hi - cut) kept.push_back(i);
    }
    if (kept.size() < 2) throw DomainError("auto_window: fewer than two rows after trimming");

    // Longest run of consecutive rows with a strictly monotone observable.
    std::size_t best_begin = 0, best_len = 1;
    for (int dir : {1, -1}) {
        std::size_t begin = 0;
        for (std::size_t j = 1; j <= kept.size(); ++j) {
            const bool continues = j < kept.size() && dir * (y[kept[j]] - y[kept[j - 1]]) > 0.0;
            if (!continues) {
                if (j - begin > best_len) {
                    best_len = j - begin;
                    best_begin = begin;
                }
                begin = j;
            }
        }
    }
    if (best_len < 2) throw DomainError("auto_window: observable is not monotone on any pair of rows");
    return {t[kept[best_begin]], t[kept[best_begin + best_len - 1]]};
}

Window sup_band_window(const TimeSeries& series, double lo, double hi) {
    std::vector<double> inside;
    for (const DiagnosticsRow& d : series.diagnostics) {
        if (d.t > 0.0 && d.sup_u_half >= lo && d.sup_u_half <= hi) inside.push_back(d.t);
    }
    if (inside.size() < 2) throw DomainError("sup_band_window: fewer than two rows in the band");
    return {*std::min_element(inside.begin(), inside.end()), *std::max_element(inside.begin(), inside.end())};
}

FitResult fit_diameter_law(const TimeSeries& series, std::optional<Window> window) {
    const Rows rows = restrict(observable(series, [](const DiagnosticsRow& d) { return d.dist_half; }), window);
    if (rows.t.size() < 6) throw DomainError("fit_diameter_law: fewer than 6 snapshots in the window");
    return fit_in_window(rows, [](double t) { return -std::log(t); }, [](double y) { return y; });
}

FitResult fit_sup_factor_exponent(const TimeSeries& series, std::optional<Window> window) {
    const Rows rows = restrict(observable(series, [](const DiagnosticsRow& d) { return d.sup_u_half; }), window);
    if (rows.t.size() < 2) throw DomainError("fit_sup_factor_exponent: fewer than 2 snapshots in the window");
    for (double y : rows.y) {
        if (!(y > 0.0)) throw DomainError("fit_sup_factor_exponent: nonpositive sup in the window");
    }
    return fit_in_window(rows, [](double t) { return std::log(t); }, [](double y) { return std::log(y); });
}

BlowupFit fit_curvature_blowup(const TimeSeries& series, std::optional<Window> window) {
    const Rows rows = restrict(observable(series, [](const DiagnosticsRow& d) { return d.sup_abs_K; }), window);
    if (rows.t.size() < 2) throw DomainError("fit_curvature_blowup: fewer than 2 snapshots in the window");
    for (double y : rows.y) {
        if (!(y > 0.0)) throw DomainError("fit_curvature_blowup: nonpositive sup|K| in the window");
    }
    BlowupFit out;
    out.fit = fit_in_window(rows, [](double t) { return std::log(t); }, [](double y) { return std::log(y); });
    out.type_iic = true;
    for (std::size_t i = 1; i < rows.t.size(); ++i) {
        if (!(rows.t[i - 1] * rows.y[i - 1] > rows.t[i] * rows.y[i])) out.type_iic = false;
    }
    return out;
}

std::optional<double> persistence_time(const TimeSeries& series, double r_probe) {
    if (series.snapshots.empty()) throw DomainError("persistence_time: empty series");
    const Field& u0 = series.snapshots.front().u;
    if (!(r_probe > 0.0 && r_probe <= u0.grid().r_max())) {
        throw DomainError("persistence_time: probe radius outside the grid");
    }
    const double threshold = u0.interpolate(r_probe) - 1.0;
    double t_prev = series.snapshots.front().t;
    double v_prev = threshold + 1.0;
    for (std::size_t j = 1; j < series.snapshots.size(); ++j) {
        const Snapshot& s = series.snapshots[j];
        const double v = s.u.interpolate(r_probe);
        if (v < threshold) return t_prev + (threshold - v_prev) * (s.t - t_prev) / (v - v_prev);
        t_prev = s.t;
        v_prev = v;
    }
    return std::nullopt;
}

double monotone_functional(const Field& u, double M, double region_r) {
    const RadialGrid& g = u.grid();
    if (!(region_r > 0.0 && region_r <= g.r_max())) throw DomainError("monotone_functional: region exceeds the grid");
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double inner = i == 0 ? 0.0 : g.face(i - 1);
        if (inner >= region_r) break;
        const double outer = i + 1 < g.size() ? g.face(i) : g.r_max();
        const double area =
            outer <= region_r ? g.cell_area(i) : std::numbers::pi * (region_r * region_r - inner * inner);
        total += phi_convex(M - u[i]) * area;
    }
    return total;
}

void compute_diagnostics(TimeSeries& series, double M, double region_r) {
    series.diagnostics.clear();
    for (const Snapshot& s : series.snapshots) {
        const Field K = resolved_curvature(s.u);
        const RadialGrid& g = s.u.grid();
        DiagnosticsRow row;
        row.t = s.t;
        row.sup_u_half = s.u.max_up_to(0.5);
        row.dist_half = distance_to_half(s.u);
        row.min_K = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            if (g.r(i) <= 0.5) row.sup_abs_K = std::max(row.sup_abs_K, std::abs(K[i]));
            row.min_K = std::min(row.min_K, K[i]);
        }
        row.functional_value = monotone_functional(s.u, M, region_r);
        series.diagnostics.push_back(row);
    }
}

}  // namespace cuspflow
