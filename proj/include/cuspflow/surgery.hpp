#pragma once

#include "cuspflow/grid.hpp"
#include "cuspflow/metrics.hpp"
#include "cuspflow/profiles.hpp"

namespace cuspflow {

/// u_k = psi(a - k) + k on every node, with a given on the grid. The innermost node must
/// already satisfy a >= k + 1 (the cap is resolved); k >= 1.
Field truncate(const Field& a, double k);

/// u_k for a cusp-type metric sampled on the grid; u_k(0) = k since a -> infinity at the
/// puncture. Only HyperbolicCusp qualifies (shift <= 0 keeps curvature <= -1).
Field truncate(const MetricSpec& a, const GridPtr& grid, double k);

struct TruncationReport {
    bool equal_outside = false;     ///< (i) u_k == a wherever a <= k - 1
    double equality_radius = 0.0;   ///< smallest r with u_k == a on every node beyond it
    bool below_original = false;    ///< (ii) u_k <= a everywhere
    double max_excess = 0.0;        ///< max(u_k - a)
    bool cap_at_level = false;      ///< (iii) u_k == k on the cap {a >= k + 1}
    double cap_min = 0.0;           ///< min of u_k over the cap
    bool curvature_floor = false;   ///< (iv) discrete K(u_k) >= -e^2 M - tol
    double min_curvature = 0.0;
    double cap_curvature = 0.0;     ///< max |K| on cap nodes whose stencil stays in the cap
    double untouched_curvature_gap = 0.0;  ///< max |K(u_k) - K(a)| on untouched-stencil nodes
    bool pass() const { return equal_outside && below_original && cap_at_level && curvature_floor; }
};

/// Checks the four truncation properties. The boundary node (one-sided Laplacian) and
/// nodes with r < r_min_curvature are left out of the curvature statistics.
TruncationReport verify_truncation(const Field& u_k, const Field& a, double k, double curvature_bound,
                                   double tol = 0.05, double r_min_curvature = 0.0);

/// Cut-off sampled on a grid: 1 for r <= 1/2, 0 for r >= 3/4.
Field standard_cutoff(const GridPtr& grid);

/// alpha = phi a + (1 - phi) v with v the hyperbolic cusp. phi must take values in [0, 1],
/// be 1 for r <= 1/2 and 0 for r >= 3/4; v is only evaluated where phi < 1.
Field glue_hyperbolic(const Field& a, const Field& phi);

struct SchwarzReport {
    bool holds = false;
    double worst_margin = 0.0;  ///< max over r > 0 of v - (1/2 ln beta + alpha)
    double worst_r = 0.0;
};

/// Checks v <= 1/2 ln(beta) + alpha at every node with r in (0, r_max]. beta >= 1.
SchwarzReport schwarz_check(const Field& alpha, double beta, double slack = 0.0);

}  // namespace cuspflow
