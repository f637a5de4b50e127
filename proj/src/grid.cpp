#include "cuspflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cuspflow/error.hpp"

namespace cuspflow {

namespace {

// Fornberg's recursion: weights for the first and second derivative at z
// from the sample points x.
void derivative_weights(double z, const std::array<double, 4>& x, std::array<double, 4>& d1,
                        std::array<double, 4>& d2) {
    constexpr int n = 4;
    constexpr int m = 2;
    double c[n][m + 1] = {};
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    for (int i = 0; i < n; ++i) {
        d1[i] = c[i][1];
        d2[i] = c[i][2];
    }
}

}  // namespace

RadialGrid::RadialGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    if (n < kMinNodes) {
        throw DomainError("RadialGrid: need at least " + std::to_string(kMinNodes) +
                          " nodes, got " + std::to_string(n));
    }
    if (nodes_.front() != 0.0) throw DomainError("RadialGrid: first node must be r = 0");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i])) {
            throw DomainError("RadialGrid: nodes must be finite and strictly increasing");
        }
    }
    if (!(nodes_.back() < 1.0)) throw DomainError("RadialGrid: r_max must lie in (0, 1)");

    const double pi = std::numbers::pi;
    stencils_.resize(n - 1);
    cell_area_.resize(n);

    // Origin: disc of radius r_1 / 2, one flux through its rim.
    const double r1 = nodes_[1];
    stencils_[0] = {0.0, -4.0 / (r1 * r1), 4.0 / (r1 * r1)};
    const double half = 0.5 * r1;
    cell_area_[0] = pi * half * half;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double fm = 0.5 * (nodes_[i - 1] + nodes_[i]);
        const double fp = 0.5 * (nodes_[i] + nodes_[i + 1]);
        const double ring = fp * fp - fm * fm;
        const double up = 2.0 * fp / ((nodes_[i + 1] - nodes_[i]) * ring);
        const double lo = 2.0 * fm / ((nodes_[i] - nodes_[i - 1]) * ring);
        stencils_[i] = {lo, -(lo + up), up};
        cell_area_[i] = pi * ring;
    }
    const double fm = 0.5 * (nodes_[n - 2] + nodes_[n - 1]);
    cell_area_[n - 1] = pi * (nodes_[n - 1] * nodes_[n - 1] - fm * fm);

    std::array<double, 4> x{nodes_[n - 1], nodes_[n - 2], nodes_[n - 3], nodes_[n - 4]};
    std::array<double, 4> d1{}, d2{};
    derivative_weights(nodes_[n - 1], x, d1, d2);
    for (int k = 0; k < 4; ++k) boundary_weights_[k] = d2[k] + d1[k] / nodes_[n - 1];

    double hmin = nodes_[1] - nodes_[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double h = nodes_[i] - nodes_[i - 1];
        max_spacing_ = std::max(max_spacing_, h);
        hmin = std::min(hmin, h);
    }
    uniform_ = (max_spacing_ - hmin) <= 1e-9 * max_spacing_;
}

GridPtr RadialGrid::uniform(std::size_t n_nodes, double r_max) {
    if (n_nodes < kMinNodes) {
        throw DomainError("RadialGrid::uniform: n_nodes must be >= 16");
    }
    if (!(r_max > 0.0 && r_max < 1.0)) {
        throw DomainError("RadialGrid::uniform: r_max must lie in (0, 1)");
    }
    std::vector<double> nodes(n_nodes);
    const double h = r_max / static_cast<double>(n_nodes - 1);
    for (std::size_t i = 0; i < n_nodes; ++i) nodes[i] = static_cast<double>(i) * h;
    nodes.back() = r_max;
    return GridPtr(new RadialGrid(std::move(nodes)));
}

GridPtr RadialGrid::graded(double r_max, double h_outer, double log_step, double r_inner) {
    if (!(r_max > 0.0 && r_max < 1.0)) throw DomainError("RadialGrid::graded: r_max must lie in (0, 1)");
    if (!(h_outer > 0.0)) throw DomainError("RadialGrid::graded: h_outer must be positive");
    if (!(log_step > 0.0 && log_step < 1.0)) throw DomainError("RadialGrid::graded: log_step must lie in (0, 1)");
    if (!(r_inner > 0.0 && r_inner < r_max)) throw DomainError("RadialGrid::graded: r_inner must lie in (0, r_max)");

    std::vector<double> rev{r_max};
    double r = r_max;
    while (r >= r_inner) {
        r -= std::min(h_outer, log_step * r);
        rev.push_back(r);
    }
    rev.push_back(0.0);
    std::reverse(rev.begin(), rev.end());
    return from_nodes(std::move(rev));
}

GridPtr RadialGrid::from_nodes(std::vector<double> nodes) {
    return GridPtr(new RadialGrid(std::move(nodes)));
}

std::size_t RadialGrid::lower_bound(double r) const {
    return static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), r) - nodes_.begin());
}

std::size_t RadialGrid::nearest(double r) const {
    const std::size_t i = lower_bound(r);
    if (i == 0) return 0;
    if (i >= nodes_.size()) return nodes_.size() - 1;
    return (nodes_[i] - r) < (r - nodes_[i - 1]) ? i : i - 1;
}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw DomainError("Field: null grid");
    if (values_.size() != grid_->size()) {
        throw DomainError("Field: " + std::to_string(values_.size()) + " values for a grid of " +
                          std::to_string(grid_->size()) + " nodes");
    }
}

Field Field::constant(GridPtr grid, double c) {
    const std::size_t n = grid->size();
    return Field(std::move(grid), std::vector<double>(n, c));
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

bool Field::same_grid(const Field& other) const {
    if (grid_ == other.grid_) return true;
    const auto a = grid_->nodes();
    const auto b = other.grid_->nodes();
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

double Field::interpolate(double r) const {
    const auto& g = *grid_;
    if (!(r >= 0.0 && r <= g.r_max())) throw DomainError("Field::interpolate: r outside [0, r_max]");
    std::size_t i = g.lower_bound(r);
    if (i == 0) return values_[0];
    if (i >= size()) i = size() - 1;
    const double w = (r - g.r(i - 1)) / (g.r(i) - g.r(i - 1));
    return (1.0 - w) * values_[i - 1] + w * values_[i];
}

double Field::max_up_to(double r_hi) const {
    double m = values_[0];
    for (std::size_t i = 1; i < size() && grid_->r(i) <= r_hi; ++i) m = std::max(m, values_[i]);
    return m;
}

Field& Field::operator+=(const Field& other) {
    if (!same_grid(other)) throw DomainError("Field: grid mismatch");
    for (std::size_t i = 0; i < size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Field& Field::operator+=(double c) {
    for (double& x : values_) x += c;
    return *this;
}

Field& Field::operator*=(double c) {
    for (double& x : values_) x *= c;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) {
    if (!a.same_grid(b)) throw DomainError("Field: grid mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
Field operator+(Field a, double c) { return a += c; }
Field operator*(double c, Field a) { return a *= c; }

Field laplacian(const Field& f) {
    if (!f.all_finite()) throw DomainError("laplacian: non-finite input values");
    const RadialGrid& g = f.grid();
    const std::size_t n = g.size();
    std::vector<double> out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Stencil& s = g.stencil(i);
        // Written as differences so constants are annihilated exactly.
        out[i] = s.lower * (f[i - 1] - f[i]) + s.upper * (f[i + 1] - f[i]);
    }
    out[0] = g.stencil(0).upper * (f[1] - f[0]);
    const auto& w = g.boundary_weights();
    out[n - 1] = w[1] * (f[n - 2] - f[n - 1]) + w[2] * (f[n - 3] - f[n - 1]) + w[3] * (f[n - 4] - f[n - 1]);
    return Field(f.grid_ptr(), std::move(out));
}

double integrate_radial(const Field& f, double r_lo, double r_hi) {
    const RadialGrid& g = f.grid();
    if (!(r_lo >= 0.0 && r_lo < r_hi && r_hi <= g.r_max())) {
        throw DomainError("integrate_radial: need 0 <= r_lo < r_hi <= r_max");
    }
    double prev_r = r_lo;
    double prev_e = std::exp(f.interpolate(r_lo));
    double sum = 0.0;
    for (std::size_t i = g.lower_bound(r_lo); i < g.size() && g.r(i) < r_hi; ++i) {
        if (g.r(i) <= r_lo) continue;
        const double e = std::exp(f[i]);
        sum += 0.5 * (prev_e + e) * (g.r(i) - prev_r);
        prev_r = g.r(i);
        prev_e = e;
    }
    const double e_hi = std::exp(f.interpolate(r_hi));
    sum += 0.5 * (prev_e + e_hi) * (r_hi - prev_r);
    return sum;
}

}  // namespace cuspflow
