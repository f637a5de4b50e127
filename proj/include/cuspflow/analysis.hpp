#pragma once

#include <optional>
#include <span>

#include "cuspflow/grid.hpp"
#include "cuspflow/time_series.hpp"

namespace cuspflow {

/// Radial length from the origin to r = 1/2, integrate_radial(u, 0, 1/2).
double distance_to_half(const Field& u);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t points = 0;
};

/// Closed time interval [t_lo, t_hi] selecting diagnostics rows.
struct Window {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

/// Ordinary least squares y = slope x + intercept. r_squared is 1 for a perfect fit
/// (including constant y) and clamped to [0, 1]. Needs two distinct x values.
FitResult least_squares(std::span<const double> x, std::span<const double> y);

/**
 * Scaling window for an observable y(t), t > 0: drop the first and last 15% of the
 * log-time range, then keep the longest run of consecutive rows on which y is strictly
 * monotone. Throws DomainError when fewer than two rows survive.
 */
Window auto_window(std::span<const double> t, std::span<const double> y);

/// Smallest window holding every row with t > 0 and sup_u_half in [lo, hi]. Throws
/// DomainError when fewer than two rows qualify.
Window sup_band_window(const TimeSeries& series, double lo, double hi);

/// dist_half against -ln t; at least 6 rows in the window. Window defaults to auto_window.
FitResult fit_diameter_law(const TimeSeries& series, std::optional<Window> window = {});

/// ln(sup_u_half) against ln t; every sup in the window must be positive.
FitResult fit_sup_factor_exponent(const TimeSeries& series, std::optional<Window> window = {});

struct BlowupFit {
    FitResult fit;
    /// t sup|K| strictly increases as t decreases through the window.
    bool type_iic = false;
};

/// ln(sup_abs_K) against ln t.
BlowupFit fit_curvature_blowup(const TimeSeries& series, std::optional<Window> window = {});

/// First time at which u(r_probe, t) < u(r_probe, 0) - 1, linearly interpolated between
/// snapshots; nullopt when the threshold is never crossed ("beyond horizon"). The first
/// snapshot is taken as the initial profile.
std::optional<double> persistence_time(const TimeSeries& series, double r_probe);

/// int_{r <= region_r} phi(M - u) dA with the flat area element, summed over dual cells
/// clipped at region_r. Throws DomainError if region_r exceeds the grid.
double monotone_functional(const Field& u, double M, double region_r);

/// Fills series.diagnostics, one row per snapshot. Curvatures use resolved_curvature;
/// sup_abs_K is taken over r <= 1/2 and min_K over every node but the boundary node.
void compute_diagnostics(TimeSeries& series, double M, double region_r);

}  // namespace cuspflow
