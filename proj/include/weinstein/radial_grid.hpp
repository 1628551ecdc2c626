#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace weinstein {

enum class Space { Euclidean, Hyperbolic };

const char* to_string(Space space) noexcept;

/// Surface area of the unit sphere S^{n-1}, 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Radial volume density: r^{n-1} on R^n, sinh^{n-1}(r) on H^n.
double radial_jacobian(Space space, int n, double r);

/// Cell-centred quadrature grid for radial functions on a ball of radius R.
///
/// Node i (0-based) sits at r_i = (i + 1/2) h, h = R / N. Weights are
/// |S^{n-1}| J(r_i) h, so sums against the weights approximate integrals over
/// the ball with the midpoint rule. Face radii r_{i+1/2} = (i+1) h carry the
/// flux coefficients used by the Laplacian; the face at r = 0 is implicit and
/// has zero area.
class RadialGrid {
public:
    RadialGrid(Space space, int n, std::size_t cells, double radius);

    Space space() const noexcept { return space_; }
    int dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double radius() const noexcept { return radius_; }
    double spacing() const noexcept { return h_; }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    /// |S^{n-1}| J at the outer face of each cell, r = (i+1) h.
    std::span<const double> face_areas() const noexcept { return face_areas_; }

    /// Same space, dimension, cell count and radius.
    bool same_as(const RadialGrid& other) const noexcept;

private:
    Space space_;
    int n_;
    double radius_;
    double h_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> face_areas_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(Space space, int n, std::size_t cells, double radius);

/// The grid in the other geometry with identical (n, N, R), hence identical radii.
GridPtr matched_grid(const GridPtr& grid, Space space);

/// Samples of a real radial function, one per grid node.
class RadialFunction {
public:
    RadialFunction(GridPtr grid, std::vector<double> values);
    explicit RadialFunction(GridPtr grid); // zero function

    static RadialFunction sample(GridPtr grid, const std::function<double(double)>& f);

    const GridPtr& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    RadialFunction& operator+=(const RadialFunction& other);
    RadialFunction& operator-=(const RadialFunction& other);
    RadialFunction& operator*=(double c) noexcept;

    /// Same values reinterpreted on another grid with the same node count.
    RadialFunction rebased(GridPtr grid) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

RadialFunction operator+(RadialFunction a, const RadialFunction& b);
RadialFunction operator-(RadialFunction a, const RadialFunction& b);
RadialFunction operator*(double c, RadialFunction a);

void require_same_grid(const RadialGrid& expected, const RadialFunction& f);
void require_same_grid(const RadialFunction& f, const RadialFunction& g);

/// Sum_i w_i f_i.
double integrate(const RadialGrid& grid, const RadialFunction& f);
double integrate(const RadialFunction& f);

/// Weighted inner product <f, g>_w.
double inner(const RadialFunction& f, const RadialFunction& g);

/// (Sum_i w_i |f_i|^s)^{1/s} for s >= 1.
double lp_norm(const RadialGrid& grid, const RadialFunction& f, double s);
double lp_norm(const RadialFunction& f, double s);

/// Sum_i w_i |f_i|^s without the outer root.
double lp_power(const RadialFunction& f, double s);

} // namespace weinstein
