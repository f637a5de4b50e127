#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cuspflow/barriers.hpp"
#include "cuspflow/error.hpp"
#include "cuspflow/flow.hpp"
#include "cuspflow/metrics.hpp"
#include "support.hpp"

using namespace cuspflow;
using cuspflow::testing::Gen;

namespace {

// Direct evaluation of S without the log-space rewrite; fine while lambda stays representable.
double naive_S(double r, double t) {
    const double lam = std::exp(-6.0 / t);
    const double x = r / lam;
    return std::log(2.0 / (1.0 + x * x)) - std::log(lam * (-std::log(lam))) + 0.5 * std::log(3.0);
}

TimeSeries series_of(const GridPtr& g, std::vector<std::pair<double, double>> t_and_level) {
    TimeSeries s;
    for (auto [t, c] : t_and_level) s.snapshots.push_back({t, Field::constant(g, c)});
    return s;
}

}  // namespace

TEST_SUITE("barriers") {

TEST_CASE("closed-form values") {
    CHECK(lambda_of_t(1.0) == doctest::Approx(std::exp(-6.0)));
    CHECK(lambda_of_t(0.001) == 0.0);
    CHECK(barrier_h(0.3) == doctest::Approx(cusp_factor(0.3) + 0.5 * std::log(3.0)));
    CHECK(barrier_U(0.0, 1.0) == doctest::Approx(5.45069).epsilon(1e-6));
    CHECK(barrier_U(0.5, 1.0) == barrier_h(0.5));
    CHECK(barrier_U(1e-4, 1.0) == barrier_S(1e-4, 1.0));
    const ResidualTerms at_one = supersolution_residual(0.0, 1.0);
    CHECK(at_one.spatial_term == doctest::Approx(-12.0).epsilon(1e-12));
    CHECK(at_one.residual >= 6.0);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(lambda_of_t(0.0), DomainError);
    CHECK_THROWS_AS(barrier_S(-1e-3, 0.5), DomainError);
    CHECK_THROWS_AS(barrier_U(0.1, 1.5), DomainError);
    CHECK_THROWS_AS(barrier_U(1.0, 0.5), DomainError);
    CHECK_THROWS_AS(supersolution_residual(0.1, 0.5), DomainError);  // beyond lambda
    CHECK_THROWS_AS(supersolution_residual(0.0, 0.0), DomainError);
    const Field u = Field::constant(RadialGrid::uniform(33, 0.9), 0.0);
    CHECK_THROWS_AS(check_moving_cap(u, 0.0), DomainError);
    CHECK_THROWS_AS(check_moving_cap(u, 1.2), DomainError);
    CHECK_THROWS_AS(check_static_upper(u, -0.1), DomainError);
    CHECK_THROWS_AS(check_rate_bound(u, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(fit_rate_bound(TimeSeries{}), DomainError);
    CHECK_THROWS_AS(fit_rate_bound(std::span<const TimeSeries>{}), DomainError);
}

TEST_CASE("log-space S agrees with the direct formula and is continuous at the seam") {
    Gen gen(51);
    for (int c = 0; c < 200; ++c) {
        const double t = gen.uniform(0.2, 1.0);
        const double r = lambda_of_t(t) * gen.uniform(0.0, 3.0);
        CHECK(barrier_S(r, t) == doctest::Approx(naive_S(r, t)).epsilon(1e-12));
    }
    for (int c = 0; c < 100; ++c) {
        const double t = gen.uniform(0.05, 1.0);
        const double lam = lambda_of_t(t);
        CHECK(std::abs(barrier_S(lam, t) - barrier_h(lam)) <= 1e-12);
    }
}

TEST_CASE("residual terms match finite differences of S") {
    Gen gen(52);
    for (int c = 0; c < 60; ++c) {
        const double t = gen.uniform(0.1, 0.95);
        const double r = lambda_of_t(t) * gen.uniform(0.05, 0.95);
        const double ht = 1e-5 * t, hr = 1e-3 * r;
        const double S_t = (barrier_S(r, t + ht) - barrier_S(r, t - ht)) / (2.0 * ht);
        const double S_r = (barrier_S(r + hr, t) - barrier_S(r - hr, t)) / (2.0 * hr);
        const double S_rr = (barrier_S(r + hr, t) - 2.0 * barrier_S(r, t) + barrier_S(r - hr, t)) / (hr * hr);
        const double spatial = std::exp(-2.0 * barrier_S(r, t)) * (S_rr + S_r / r);
        const ResidualTerms rt = supersolution_residual(r, t);
        CHECK(rt.time_term == doctest::Approx(S_t).epsilon(1e-6));
        CHECK(rt.spatial_term == doctest::Approx(spatial).epsilon(1e-5));
        CHECK(rt.spatial_term == doctest::Approx(-12.0 / (t * t)).epsilon(1e-9));
        CHECK(rt.residual >= 6.0 / (t * t) * (1.0 - 1e-9));
    }
}

TEST_CASE("residual stays positive on the 20 x 20 sample, including the origin") {
    for (int j = 0; j < 20; ++j) {
        const double t = 0.05 + 0.9 * j / 19.0;
        for (int i = 0; i < 20; ++i) {
            const double r = lambda_of_t(t) * i / 20.0;
            const ResidualTerms rt = supersolution_residual(r, t);
            CHECK(rt.residual >= 6.0 / (t * t) * (1.0 - 1e-6));
            CHECK(std::abs(rt.spatial_term / (-12.0 / (t * t)) - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("static upper barrier: exact cusp flow sits on it, a lifted copy fails by the lift") {
    const GridPtr g = RadialGrid::uniform(513, 0.9);
    Gen gen(53);
    for (int c = 0; c < 30; ++c) {
        const double t = gen.uniform(0.0, 1.0);
        const Field exact = Field::sample(g, [&](double r) { return r > 0.0 ? exact_solution(ExactFlow::Cusp, r, t) : 1e300; });
        const ViolationReport on = check_static_upper(exact, t);
        CHECK(on.pass);
        CHECK(std::abs(on.margin) <= 1e-12);
        const double eps = gen.log_uniform(1e-5, 1e-1);
        const ViolationReport off = check_static_upper(exact + eps, t);
        CHECK_FALSE(off.pass);
        CHECK(off.margin == doctest::Approx(on.margin + eps).epsilon(1e-9));
        CHECK(off.check == "static_upper");
        CHECK(off.t == t);
    }
}

TEST_CASE("moving cap and rate bound") {
    const GridPtr g = RadialGrid::graded(0.9, 1e-3, 0.01, 1e-9);
    const Field u = sample(metric::TruncatedCusp{8.0, 0.0}, g);
    const ViolationReport cap = check_moving_cap(u, 0.5);
    CHECK(cap.pass);
    CHECK(cap.margin < 0.0);
    const ViolationReport over = check_moving_cap(Field::constant(g, 30.0), 1.0);
    CHECK_FALSE(over.pass);
    CHECK(over.worst_r > 0.1);

    const ViolationReport rb = check_rate_bound(u, 0.25, 2.0);
    CHECK(rb.margin == doctest::Approx(8.0 - 2.0 / 0.25));
    CHECK(rb.worst_r == 0.0);
    CHECK(check_barrier(barrier::RateBound{2.0}, u, 0.25).margin == rb.margin);
    CHECK(check_barrier(barrier::MovingCap{}, u, 0.5).margin == cap.margin);
    CHECK(check_barrier(barrier::StaticUpper{}, u, 0.5).margin == check_static_upper(u, 0.5).margin);
}

TEST_CASE("fitted rate bound is the largest t sup u over (0, 1]") {
    const GridPtr g = RadialGrid::uniform(33, 0.9);
    const TimeSeries a = series_of(g, {{0.0, 50.0}, {0.1, 8.0}, {0.5, 2.0}, {1.5, 4.0}});
    const TimeSeries b = series_of(g, {{0.2, 3.0}, {0.4, -1.0}});
    CHECK(fit_rate_bound(a) == doctest::Approx(1.0));
    CHECK(fit_rate_bound(b) == doctest::Approx(0.6));
    const std::vector<TimeSeries> both{a, b};
    CHECK(fit_rate_bound(both) == doctest::Approx(1.0));
    CHECK(fit_rate_bound(series_of(g, {{0.3, -2.0}})) == 0.0);
}

}
