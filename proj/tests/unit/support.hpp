#pragma once

#include <cstdint>
#include <cmath>
#include <random>

// Seeded generators for the property tests; every case is reproducible from its seed.
namespace cuspflow::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi);
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
};

inline double Gen::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

inline constexpr int kCases = 50;

}  // namespace cuspflow::testing
