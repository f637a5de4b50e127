#pragma once

#include <span>
#include <string>
#include <variant>

#include "cuspflow/grid.hpp"
#include "cuspflow/time_series.hpp"

namespace cuspflow {

/// Absolute slack allowed by every barrier check.
inline constexpr double kBarrierSlack = 1e-6;

/// lambda(t) = e^{-6/t}, t > 0. Underflows to 0 for t below about 0.008.
double lambda_of_t(double t);

/// h(r) = v(r) + 1/2 ln 3 for r in (0, 1).
double barrier_h(double r);

/// S(r, t) = s(r / lambda) - ln(lambda (-ln lambda)) + 1/2 ln 3, evaluated in log space so
/// that tiny lambda neither underflows nor overflows. r >= 0, t > 0.
double barrier_S(double r, double t);

/// U = S for r < lambda(t), h for lambda(t) <= r < 1. Requires t in (0, 1], r in [0, 1).
double barrier_U(double r, double t);

/// The two sides of dU/dt - e^{-2U} Laplacian(U) on the sphere piece.
struct ResidualTerms {
    double time_term = 0.0;     ///< dS/dt, with d lambda / dt = (6 / t^2) lambda
    double spatial_term = 0.0;  ///< e^{-2S} Laplacian(S), from the closed form of S
    double residual = 0.0;      ///< time_term - spatial_term
};

/// Residual of the sphere piece at 0 <= r < lambda(t), t in (0, 1].
ResidualTerms supersolution_residual(double r, double t);

struct ViolationReport {
    std::string check;
    double t = 0.0;
    double worst_r = 0.0;
    double margin = 0.0;  ///< max over the checked nodes of u - barrier
    bool pass = false;
};

namespace barrier {
struct StaticUpper {};
struct MovingCap {};
struct RateBound {
    double beta_hat = 1.0;
};
}  // namespace barrier

using BarrierSpec = std::variant<barrier::StaticUpper, barrier::MovingCap, barrier::RateBound>;

/// max over nodes with r > 0 of u - [v(r) + 1/2 ln(1 + 2t)]. t >= 0.
ViolationReport check_static_upper(const Field& u, double t);

/// max over all nodes of u - U(r, t). t in (0, 1].
ViolationReport check_moving_cap(const Field& u, double t);

/// max over nodes with r <= 1/2 of u - beta_hat / t. t > 0, beta_hat > 0.
ViolationReport check_rate_bound(const Field& u, double t, double beta_hat);

ViolationReport check_barrier(const BarrierSpec& spec, const Field& u, double t);

/// beta_hat = max over snapshots with t in (0, 1] of t sup_{r <= 1/2} u, counting positive
/// sups only (0 if there are none). Throws DomainError for a series without snapshots.
double fit_rate_bound(const TimeSeries& series);

/// One beta_hat covering every series.
double fit_rate_bound(std::span<const TimeSeries> runs);

}  // namespace cuspflow
