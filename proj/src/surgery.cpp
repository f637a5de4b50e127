#include "cuspflow/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cuspflow/error.hpp"

namespace cuspflow {

Field truncate(const Field& a, double k) {
    if (!(k >= 1.0)) throw DomainError("truncate: level k must be >= 1");
    if (!a.all_finite()) throw DomainError("truncate: non-finite input factor");
    if (a[0] < k + 1.0 || a[1] < k + 1.0) {
        throw DomainError("truncate: factor does not exceed k + 1 near the origin (cusp not diverging or cap unresolved)");
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = truncate_value(a[i], k);
    return Field(a.grid_ptr(), std::move(out));
}

Field truncate(const MetricSpec& a, const GridPtr& grid, double k) {
    if (!(k >= 1.0)) throw DomainError("truncate: level k must be >= 1");
    const auto* cusp = std::get_if<metric::HyperbolicCusp>(&a);
    if (!cusp) throw DomainError("truncate: metric " + describe(a) + " does not diverge at the origin");
    const MetricSpec capped = metric::TruncatedCusp{k, cusp->shift};
    return sample(capped, grid);
}

TruncationReport verify_truncation(const Field& u_k, const Field& a, double k, double curvature_bound,
                                   double tol, double r_min_curvature) {
    if (!u_k.same_grid(a)) throw DomainError("verify_truncation: mismatched grids");
    const RadialGrid& g = u_k.grid();
    const std::size_t n = g.size();
    TruncationReport rep;

    // (i): exact equality wherever a <= k - 1, plus the measured radius beyond which u_k == a.
    rep.equal_outside = true;
    std::size_t first_equal = n;
    for (std::size_t i = n; i-- > 0;) {
        if (u_k[i] != a[i]) break;
        first_equal = i;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] <= k - 1.0 && u_k[i] != a[i]) rep.equal_outside = false;
    }
    rep.equality_radius = first_equal < n ? g.r(first_equal) : g.r_max();

    // (ii)
    rep.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) rep.max_excess = std::max(rep.max_excess, u_k[i] - a[i]);
    rep.below_original = rep.max_excess <= 1e-12;

    // (iii)
    rep.cap_min = std::numeric_limits<double>::infinity();
    bool any_cap = false;
    rep.cap_at_level = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] >= k + 1.0) {
            any_cap = true;
            rep.cap_min = std::min(rep.cap_min, u_k[i]);
            if (u_k[i] != k) rep.cap_at_level = false;
        }
    }
    rep.cap_at_level = rep.cap_at_level && any_cap;

    // (iv) and the regional curvature identities.
    const Field K = gauss_curvature(u_k);
    const Field Ka = gauss_curvature(a);
    rep.min_curvature = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (g.r(i) < r_min_curvature) continue;
        rep.min_curvature = std::min(rep.min_curvature, K[i]);
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const bool stencil_in_cap = a[lo] >= k + 1.0 && a[i] >= k + 1.0 && a[i + 1] >= k + 1.0;
        const bool stencil_untouched = a[lo] <= k - 1.0 && a[i] <= k - 1.0 && a[i + 1] <= k - 1.0;
        if (stencil_in_cap) rep.cap_curvature = std::max(rep.cap_curvature, std::abs(K[i]));
        if (stencil_untouched) {
            rep.untouched_curvature_gap = std::max(rep.untouched_curvature_gap, std::abs(K[i] - Ka[i]));
        }
    }
    rep.curvature_floor = rep.min_curvature >= -std::exp(2.0) * curvature_bound - tol;
    return rep;
}

Field standard_cutoff(const GridPtr& grid) { return Field::sample(grid, Cutoff{}); }

Field glue_hyperbolic(const Field& a, const Field& phi) {
    if (!a.same_grid(phi)) throw DomainError("glue_hyperbolic: mismatched grids");
    const RadialGrid& g = a.grid();
    if (g.r_max() >= 1.0) throw DomainError("glue_hyperbolic: grid must stay inside the unit disc");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = g.r(i);
        const double w = phi[i];
        if (!(w >= 0.0 && w <= 1.0)) throw DomainError("glue_hyperbolic: cut-off outside [0, 1]");
        if (r <= 0.5 && w != 1.0) throw DomainError("glue_hyperbolic: cut-off must equal 1 on r <= 1/2");
        if (r >= 0.75 && w != 0.0) throw DomainError("glue_hyperbolic: cut-off must vanish on r >= 3/4");
        out[i] = w == 1.0 ? a[i] : w * a[i] + (1.0 - w) * cusp_factor(r);
    }
    return Field(a.grid_ptr(), std::move(out));
}

SchwarzReport schwarz_check(const Field& alpha, double beta, double slack) {
    if (!(beta >= 1.0)) throw DomainError("schwarz_check: curvature bound beta must be >= 1");
    const RadialGrid& g = alpha.grid();
    SchwarzReport rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    const double half_log_beta = 0.5 * std::log(beta);
    for (std::size_t i = 1; i < alpha.size(); ++i) {
        const double margin = cusp_factor(g.r(i)) - (half_log_beta + alpha[i]);
        if (margin > rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_r = g.r(i);
        }
    }
    rep.holds = rep.worst_margin <= slack;
    return rep;
}

}  // namespace cuspflow
