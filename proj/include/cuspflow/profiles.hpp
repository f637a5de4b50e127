#pragma once

namespace cuspflow {

/// Concave transition profile for cusp truncation: x for x <= -1, -(x-1)^2/4 on (-1, 1),
/// 0 for x >= 1. C^1 with psi' in [0, 1] and psi'' in {0, -1/2}.
constexpr double psi(double x) {
    if (x <= -1.0) return x;
    if (x >= 1.0) return 0.0;
    return -0.25 * (x - 1.0) * (x - 1.0);
}

constexpr double psi_prime(double x) {
    if (x <= -1.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return -0.5 * (x - 1.0);
}

/// psi(a - k) + k, returning a and k themselves off the transition band so that the
/// untouched region and the cap are reproduced bit for bit.
constexpr double truncate_value(double a, double k) {
    const double x = a - k;
    if (x <= -1.0) return a;
    if (x >= 1.0) return k;
    return psi(x) + k;
}

/// Convex profile for the monotone functional: 0 for x <= -1, (x+1)^2/4 on (-1, 1),
/// x for x >= 1. Note phi(x) = x - psi(x).
constexpr double phi_convex(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return x;
    return 0.25 * (x + 1.0) * (x + 1.0);
}

constexpr double phi_convex_prime(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return 0.5 * (x + 1.0);
}

constexpr double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

/// Radial cut-off: 1 on [0, plateau], 0 on [support, inf), smoothstep of smoothstep between.
struct Cutoff {
    double plateau = 0.5;
    double support = 0.75;

    constexpr double operator()(double r) const {
        return 1.0 - smoothstep(smoothstep((r - plateau) / (support - plateau)));
    }
};

}  // namespace cuspflow
