#include "cuspflow/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "cuspflow/barriers.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/metrics.hpp"
#include "cuspflow/surgery.hpp"

namespace cuspflow {

namespace {

constexpr double kRMax = 0.9;
constexpr double kInner = 0.05;

struct Deviation {
    double value = 0.0;  // K at the worst node
    double error = 0.0;  // |K - expected| there
};

// Worst deviation of sign * K from `expected` over nodes [first, last].
Deviation worst(const Field& K, double sign, double expected, std::size_t first, std::size_t last) {
    Deviation d;
    d.value = sign * K[first];
    for (std::size_t i = first; i <= last; ++i) {
        const double e = std::abs(sign * K[i] - expected);
        if (e >= d.error) {
            d.error = e;
            d.value = sign * K[i];
        }
    }
    return d;
}

Deviation cusp_like(const MetricSpec& spec, std::size_t intervals, double sign) {
    const GridPtr g = RadialGrid::uniform(intervals + 1, kRMax);
    const Field K = gauss_curvature(sample_annulus(spec, g, kInner));
    return worst(K, sign, -1.0, g->lower_bound(kInner) + 1, g->size() - 2);
}

Deviation sphere(std::size_t intervals, double sign) {
    const GridPtr g = RadialGrid::uniform(intervals + 1, kRMax);
    const Field K = gauss_curvature(sample(metric::Sphere{}, g));
    return worst(K, sign, 1.0, 0, g->size() - 2);
}

Deviation cigar_origin(std::size_t intervals, double sign) {
    const GridPtr g = RadialGrid::uniform(intervals + 1, kRMax);
    const Field K = gauss_curvature(sample(metric::Cigar{}, g));
    return worst(K, sign, 2.0, 0, 0);
}

IdentityRow equal(std::string name, double value, double expected, double tol) {
    return {std::move(name), value, expected, tol, false, std::abs(value - expected) <= tol};
}

IdentityRow at_least(std::string name, double value, double bound, double tol) {
    return {std::move(name), value, bound, tol, true, value >= bound - tol};
}

// err(N/4) / err(N/2) must lie in [2.8, 5.5].
IdentityRow refinement(std::string name, auto&& error_at, std::size_t n) {
    const double ratio = error_at(n / 4).error / error_at(n / 2).error;
    return equal(std::move(name), ratio, 4.15, 1.35);
}

}  // namespace

std::vector<IdentityRow> identity_suite(const IdentityOptions& opts) {
    const std::size_t n = opts.resolution;
    const double sign = opts.curvature_sign;
    std::vector<IdentityRow> rows;

    rows.push_back(equal("K(cusp)", cusp_like(metric::HyperbolicCusp{}, n, sign).value, -1.0, 1e-3));
    rows.push_back(equal("K(sphere)", sphere(n, sign).value, 1.0, 1e-3));
    rows.push_back(equal("K(cigar) at r = 0", cigar_origin(n, sign).value, 2.0, 1e-3));
    for (double delta : {0.05, 0.1}) {
        char name[48];
        std::snprintf(name, sizeof name, "K(band, delta = %g)", delta);
        rows.push_back(equal(name, cusp_like(metric::HyperbolicBand{delta}, n, sign).value, -1.0, 1e-3));
    }

    rows.push_back(refinement("refinement ratio K(cusp)", [&](std::size_t m) { return cusp_like(metric::HyperbolicCusp{}, m, sign); }, n));
    rows.push_back(refinement("refinement ratio K(sphere)", [&](std::size_t m) { return sphere(m, sign); }, n));
    rows.push_back(refinement("refinement ratio K(cigar) at r = 0", [&](std::size_t m) { return cigar_origin(m, sign); }, n));
    rows.push_back(refinement("refinement ratio K(band, delta = 0.1)",
                              [&](std::size_t m) { return cusp_like(metric::HyperbolicBand{0.1}, m, sign); }, n));

    double seam = 0.0;
    for (int j = 1; j <= 9; ++j) {
        const double t = 0.1 * j;
        const double lam = lambda_of_t(t);
        seam = std::max(seam, std::abs(barrier_S(lam, t) - barrier_h(lam)));
    }
    rows.push_back(equal("seam |S(lambda) - h(lambda)|, t = 0.1..0.9", seam, 0.0, 1e-12));
    rows.push_back(equal("U(0, 1)", barrier_U(0.0, 1.0), 5.45069, 1e-5));

    const ResidualTerms at_one = supersolution_residual(0.0, 1.0);
    rows.push_back(equal("spatial term at t = 1", at_one.spatial_term, -12.0, 1e-6));
    rows.push_back(at_least("residual at (0, 1)", at_one.residual, 6.0, 1e-6));

    double min_ratio = std::numeric_limits<double>::infinity(), spatial_dev = 0.0;
    for (int j = 0; j < 20; ++j) {
        const double t = 0.05 + 0.9 * j / 19.0;
        for (int i = 0; i < 20; ++i) {
            const double r = lambda_of_t(t) * i / 20.0;
            const ResidualTerms rt = supersolution_residual(r, t);
            min_ratio = std::min(min_ratio, rt.residual / (6.0 / (t * t)));
            spatial_dev = std::max(spatial_dev, std::abs(rt.spatial_term / (-12.0 / (t * t)) - 1.0));
        }
    }
    rows.push_back(at_least("min residual / (6 / t^2), 20 x 20 samples", min_ratio, 1.0, 1e-6));
    rows.push_back(equal("max |spatial / (-12 / t^2) - 1|, 20 x 20", spatial_dev, 0.0, 1e-6));

    const GridPtr graded = RadialGrid::graded(kRMax, 2.2e-4, 0.005, 1e-8);
    for (double k : {4.0, 8.0, 12.0}) {
        const Field K = gauss_curvature(truncate(metric::HyperbolicCusp{}, graded, k));
        double min_k = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < K.size(); ++i) min_k = std::min(min_k, sign * K[i]);
        char name[48];
        std::snprintf(name, sizeof name, "min K(u_k), k = %g", k);
        rows.push_back(at_least(name, min_k, -std::exp(2.0), 0.05));
    }

    double circ = 0.0;
    for (double r : {1e-6, 1e-3, 0.05, 0.2, 0.5, 0.8}) {
        const double measured = 2.0 * std::numbers::pi * r * std::exp(cusp_factor(r));
        circ = std::max(circ, std::abs(measured - std::numbers::pi * 2.0 / -std::log(r)));
    }
    rows.push_back(equal("cusp circumference 2 pi r e^v - 2 pi / (-ln r)", circ, 0.0, 1e-12));
    return rows;
}

std::string format_identity_table(const std::vector<IdentityRow>& rows) {
    std::string out;
    char line[192];
    std::snprintf(line, sizeof line, "%-48s %16s   %-24s %s\n", "identity", "value", "expected", "result");
    out += line;
    for (const IdentityRow& r : rows) {
        char expected[48];
        std::snprintf(expected, sizeof expected, "%s %g +- %g", r.lower_bound ? ">=" : "=", r.expected, r.tolerance);
        std::snprintf(line, sizeof line, "%-48s %16.9g   %-24s %s\n", r.name.c_str(), r.value, expected,
                      r.pass ? "PASS" : "FAIL");
        out += line;
    }
    return out;
}

}  // namespace cuspflow
