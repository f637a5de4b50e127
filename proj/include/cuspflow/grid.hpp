#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cuspflow {

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

/// Tridiagonal row of the discrete radial Laplacian at one node.
struct Stencil {
    double lower = 0.0;  ///< coefficient of f_{i-1}
    double diag = 0.0;   ///< coefficient of f_i
    double upper = 0.0;  ///< coefficient of f_{i+1}
};

/**
 * Radial nodes 0 = r_0 < r_1 < ... < r_{n-1} = r_max on the disc of radius r_max < 1.
 *
 * The grid is immutable and shared between fields through GridPtr. Two layouts are
 * provided: uniform spacing, and a graded layout that is uniform near r_max and
 * geometric (uniform in s = -ln r) towards the origin, which is what a truncated
 * cusp needs to resolve its cap.
 *
 * Each node owns a dual cell [f_{i-1/2}, f_{i+1/2}] with faces at arithmetic midpoints;
 * the Laplacian is the flux-difference over the cell divided by its flat area. On a
 * uniform grid this is exactly the 3-point stencil f_rr + f_r / r, and at the origin it
 * reduces to 4 (f_1 - f_0) / r_1^2.
 */
class RadialGrid {
public:
    static constexpr std::size_t kMinNodes = 16;

    /// n_nodes >= 16, r_max in (0, 1).
    static GridPtr uniform(std::size_t n_nodes, double r_max);

    /// Spacing min(h_outer, log_step * r) marching inwards from r_max until r < r_inner,
    /// then the origin. Requires 0 < r_inner < r_max < 1, h_outer > 0, log_step in (0, 1).
    static GridPtr graded(double r_max, double h_outer, double log_step, double r_inner);

    /// Arbitrary strictly increasing nodes starting at exactly 0.
    static GridPtr from_nodes(std::vector<double> nodes);

    std::size_t size() const { return nodes_.size(); }
    double r(std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const { return nodes_; }
    double r_max() const { return nodes_.back(); }
    std::size_t boundary_index() const { return nodes_.size() - 1; }
    bool is_uniform() const { return uniform_; }

    /// Uniform step for uniform grids; largest step otherwise.
    double spacing() const { return max_spacing_; }

    /// Flat area 2*pi*int r dr of the dual cell of node i (cells tile the disc exactly).
    double cell_area(std::size_t i) const { return cell_area_[i]; }

    /// Outer face of the dual cell of node i (i < size() - 1).
    double face(std::size_t i) const { return 0.5 * (nodes_[i] + nodes_[i + 1]); }

    /// Laplacian row for i in [0, size() - 2]; i = 0 is the origin regularity stencil.
    const Stencil& stencil(std::size_t i) const { return stencils_[i]; }

    /// One-sided weights on nodes n-1, n-2, n-3, n-4 for the boundary-quality Laplacian.
    const std::array<double, 4>& boundary_weights() const { return boundary_weights_; }

    /// First index with r_i >= r (size() if none).
    std::size_t lower_bound(double r) const;

    /// Index of the node closest to r.
    std::size_t nearest(double r) const;

private:
    explicit RadialGrid(std::vector<double> nodes);

    std::vector<double> nodes_;
    std::vector<Stencil> stencils_;
    std::vector<double> cell_area_;
    std::array<double, 4> boundary_weights_{};
    double max_spacing_ = 0.0;
    bool uniform_ = false;
};

/// Sampled conformal factor u (metric e^{2u}|dz|^2) on a radial grid.
class Field {
public:
    Field(GridPtr grid, std::vector<double> values);

    static Field constant(GridPtr grid, double c);

    template <class Fn>
    static Field sample(GridPtr grid, Fn&& fn) {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->r(i));
        return Field(std::move(grid), std::move(v));
    }

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double r(std::size_t i) const { return grid_->r(i); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    bool all_finite() const;
    /// Same grid object, or grids with identical nodes.
    bool same_grid(const Field& other) const;

    /// Piecewise-linear value at r in [0, r_max].
    double interpolate(double r) const;

    /// Largest value over nodes with r_i <= r_hi.
    double max_up_to(double r_hi) const;

    Field& operator+=(const Field& other);
    Field& operator+=(double c);
    Field& operator*=(double c);

private:
    GridPtr grid_;
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator+(Field a, double c);
Field operator*(double c, Field a);

/// Discrete flat Laplacian f_rr + f_r / r. The last node carries a one-sided,
/// boundary-quality estimate. Throws DomainError on non-finite input.
Field laplacian(const Field& f);

/// Trapezoidal approximation of int_{r_lo}^{r_hi} e^{f(r)} dr, with f linearly
/// interpolated at the endpoints. Requires 0 <= r_lo < r_hi <= r_max.
double integrate_radial(const Field& f, double r_lo, double r_hi);

}  // namespace cuspflow
