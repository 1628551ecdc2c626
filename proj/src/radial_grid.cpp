#include "weinstein/radial_grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "weinstein/error.hpp"

namespace weinstein {

const char* to_string(Space space) noexcept {
    return space == Space::Euclidean ? "euclidean" : "hyperbolic";
}

double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double radial_jacobian(Space space, int n, double r) {
    const double base = space == Space::Euclidean ? r : std::sinh(r);
    return std::pow(base, n - 1);
}

RadialGrid::RadialGrid(Space space, int n, std::size_t cells, double radius)
    : space_(space), n_(n), radius_(radius) {
    if (n < 2) {
        throw Error(ErrorCode::InvalidDimension, "dimension must be >= 2, got " + std::to_string(n));
    }
    if (cells < 8) {
        throw Error(ErrorCode::InvalidSize, "need at least 8 cells, got " + std::to_string(cells));
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::InvalidSize, "radius must be positive and finite");
    }
    h_ = radius / static_cast<double>(cells);
    const double area = sphere_area(n);
    nodes_.resize(cells);
    weights_.resize(cells);
    face_areas_.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double r = (static_cast<double>(i) + 0.5) * h_;
        nodes_[i] = r;
        weights_[i] = area * radial_jacobian(space, n, r) * h_;
        face_areas_[i] = area * radial_jacobian(space, n, static_cast<double>(i + 1) * h_);
    }
}

bool RadialGrid::same_as(const RadialGrid& other) const noexcept {
    return this == &other || (space_ == other.space_ && n_ == other.n_ &&
                              size() == other.size() && radius_ == other.radius_);
}

GridPtr make_grid(Space space, int n, std::size_t cells, double radius) {
    return std::make_shared<const RadialGrid>(space, n, cells, radius);
}

GridPtr matched_grid(const GridPtr& grid, Space space) {
    if (grid->space() == space) {
        return grid;
    }
    return make_grid(space, grid->dimension(), grid->size(), grid->radius());
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) {
        throw Error(ErrorCode::InvalidArgument, "radial function needs a grid");
    }
    if (values_.size() != grid_->size()) {
        throw Error(ErrorCode::GridMismatch, "value count " + std::to_string(values_.size()) +
                                                 " does not match grid size " +
                                                 std::to_string(grid_->size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "radial function values must be finite");
        }
    }
}

RadialFunction::RadialFunction(GridPtr grid)
    : RadialFunction(grid, std::vector<double>(grid ? grid->size() : 0, 0.0)) {}

RadialFunction RadialFunction::sample(GridPtr grid, const std::function<double(double)>& f) {
    std::vector<double> values(grid->size());
    const auto nodes = grid->nodes();
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = f(nodes[i]);
    }
    return RadialFunction(std::move(grid), std::move(values));
}

RadialFunction& RadialFunction::operator+=(const RadialFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    return *this;
}

RadialFunction& RadialFunction::operator-=(const RadialFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= other.values_[i];
    }
    return *this;
}

RadialFunction& RadialFunction::operator*=(double c) noexcept {
    for (double& v : values_) {
        v *= c;
    }
    return *this;
}

RadialFunction RadialFunction::rebased(GridPtr grid) const {
    return RadialFunction(std::move(grid), values_);
}

RadialFunction operator+(RadialFunction a, const RadialFunction& b) { return a += b; }
RadialFunction operator-(RadialFunction a, const RadialFunction& b) { return a -= b; }
RadialFunction operator*(double c, RadialFunction a) { return a *= c; }

void require_same_grid(const RadialGrid& expected, const RadialFunction& f) {
    if (!expected.same_as(*f.grid())) {
        throw Error(ErrorCode::GridMismatch, "function does not live on the expected grid");
    }
}

void require_same_grid(const RadialFunction& f, const RadialFunction& g) {
    require_same_grid(*f.grid(), g);
}

double integrate(const RadialGrid& grid, const RadialFunction& f) {
    require_same_grid(grid, f);
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        sum += w[i] * f[i];
    }
    return sum;
}

double integrate(const RadialFunction& f) { return integrate(*f.grid(), f); }

double inner(const RadialFunction& f, const RadialFunction& g) {
    require_same_grid(f, g);
    const auto w = f.grid()->weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        sum += w[i] * f[i] * g[i];
    }
    return sum;
}

double lp_power(const RadialFunction& f, double s) {
    const auto w = f.grid()->weights();
    double sum = 0.0;
    if (s == 2.0) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            sum += w[i] * f[i] * f[i];
        }
    } else {
        for (std::size_t i = 0; i < w.size(); ++i) {
            sum += w[i] * std::pow(std::abs(f[i]), s);
        }
    }
    return sum;
}

double lp_norm(const RadialGrid& grid, const RadialFunction& f, double s) {
    require_same_grid(grid, f);
    if (!(s >= 1.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::InvalidArgument, "lp_norm exponent must be finite and >= 1");
    }
    return std::pow(lp_power(f, s), 1.0 / s);
}

double lp_norm(const RadialFunction& f, double s) { return lp_norm(*f.grid(), f, s); }

} // namespace weinstein
