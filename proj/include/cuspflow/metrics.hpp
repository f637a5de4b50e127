#pragma once

#include <string>
#include <variant>

#include "cuspflow/grid.hpp"

namespace cuspflow {

namespace metric {

/// Constant factor c (curvature 0).
struct Flat {
    double c = 0.0;
};

/// Complete hyperbolic cusp v = -ln(-r ln r) on the punctured disc, plus a constant
/// shift (curvature -e^{-2 shift}). Defined for r in (0, 1).
struct HyperbolicCusp {
    double shift = 0.0;
};

/// Hyperbolic band v_delta = -ln[sin(delta (s - delta)) / delta] in the cylinder coordinate
/// s = -ln r, for s in (delta, pi/delta + delta).
struct HyperbolicBand {
    double delta = 0.1;
};

/// Round sphere s(r / lambda) - ln(lambda) + shift, s(x) = ln(2 / (1 + x^2)).
struct Sphere {
    double lambda = 1.0;
    double shift = 0.0;
};

/// Cigar soliton -1/2 ln(1 + r^2), curvature 2 / (1 + r^2).
struct Cigar {};

/// Cusp capped at level k: psi(v + shift - k) + k, smooth across r = 0.
struct TruncatedCusp {
    double k = 8.0;
    double shift = 0.0;
};

}  // namespace metric

using MetricSpec = std::variant<metric::Flat, metric::HyperbolicCusp, metric::HyperbolicBand,
                                metric::Sphere, metric::Cigar, metric::TruncatedCusp>;

std::string describe(const MetricSpec& spec);

/// Throws DomainError if a parameter is non-finite or out of range.
void validate(const MetricSpec& spec);

/// Smallest and largest admissible radius (open or closed as documented per kind).
struct RadiusDomain {
    double lo = 0.0;
    double hi = 1.0;
    bool lo_open = false;
};
RadiusDomain domain_of(const MetricSpec& spec);

/// Closed-form conformal factor u at radius r (metric e^{2u}|dz|^2).
/// Throws DomainError outside the metric's domain; the cusp is never clamped at r = 0.
double eval_factor(const MetricSpec& spec, double r);

/// Hyperbolic cusp factor v(r) = -ln(-r ln r), r in (0, 1).
double cusp_factor(double r);

/// Spherical factor s(x) = ln(2 / (1 + x^2)).
double sphere_factor(double x);

/// Samples the metric on every node. Fails for metrics singular at the origin.
Field sample(const MetricSpec& spec, const GridPtr& grid);

/// Samples the metric on nodes with r >= r_inner; nodes inside are filled with the value
/// at the first sampled node. For annulus computations that never read the inner values.
Field sample_annulus(const MetricSpec& spec, const GridPtr& grid, double r_inner);

/// Discrete Gauss curvature K_i = -e^{-2 u_i} (Laplacian u)_i.
Field gauss_curvature(const Field& u);

/// gauss_curvature with every node whose Laplacian is below its floating-point noise
/// floor 8 eps max|u| (lower + upper) set to 0. On geometric grids the flat cap sits at
/// r ~ 1e-9, where one-ulp differences in u would otherwise read as |K| ~ 1e4.
Field resolved_curvature(const Field& u);

/// Conformal factor with respect to ds^2 + dtheta^2, s = -ln r: u + ln r. r in (0, 1).
double to_cylinder(double u_value, double r);

/// Inverse of to_cylinder: u = u_hat - ln r.
double from_cylinder(double u_hat, double r);

/// Exact hyperbolic radial length ln(-ln r_lo) - ln(-ln r_hi), 0 < r_lo < r_hi < 1.
double cusp_distance(double r_lo, double r_hi);

}  // namespace cuspflow
