#pragma once

#include <string>
#include <vector>

namespace cuspflow {

/// One closed-form identity: `value` must lie within `tolerance` of `expected`, or for
/// bound rows (`lower_bound`) at or above `expected - tolerance`.
struct IdentityRow {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool lower_bound = false;
    bool pass = false;
};

struct IdentityOptions {
    std::size_t resolution = 4096;  ///< intervals on [0, 0.9]
    /// Multiplies every discrete curvature before it is compared; -1 injects a sign bug so
    /// the checker can be seen to fail.
    double curvature_sign = 1.0;
};

/// Curvature of cusp, sphere, cigar and bands, their refinement ratios, the seam of U,
/// the supersolution residual on a 20 x 20 sample, the truncation curvature floor and the
/// cusp circumference identity.
std::vector<IdentityRow> identity_suite(const IdentityOptions& opts = {});

/// Fixed-width table of the rows, one per line.
std::string format_identity_table(const std::vector<IdentityRow>& rows);

}  // namespace cuspflow
