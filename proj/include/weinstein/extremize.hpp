#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "weinstein/radial_grid.hpp"
#include "weinstein/radial_operators.hpp"
#include "weinstein/weinstein.hpp"

namespace weinstein {

struct ShootingOptions {
    double step = 1e-4;          // fixed RK4 step
    double start_radius = 1e-3;  // series start
    double max_radius = 40.0;
    double bisection_tol = 1e-12;
    double profile_floor = 1e-10;
    double spread_tol = 1e-3;    // cut where the bracketing trajectories separate
    int max_bracket_doublings = 60;
};

/// Positive decaying solution of Q'' + ((n-1)/r) Q' = Q - Q^p found by bisection
/// on the initial height. Dimension 1 is accepted for integrator validation.
class ShootingResult {
public:
    int n = 0;
    double p = 0.0;
    double height = 0.0;        // Q(0)
    double cutoff_radius = 0.0; // last trusted radius of the trajectory
    bool decayed = false;       // profile reached the floor or separated cleanly
    std::vector<double> radii;  // uniform, starting at start_radius
    std::vector<double> values;
    std::vector<double> derivatives;
    double mass = 0.0;          // |Q|_2^2
    double lp_power = 0.0;      // |Q|_{p+1}^{p+1}
    double kinetic = 0.0;       // |grad Q|_2^2
    double pohozaev_residual = 0.0;

    double l2_norm() const;
    double lp_norm() const;
    double gradient_norm() const;

    /// Q(r), using the series near 0 and the linearized exponential tail past the cutoff.
    double evaluate(double r) const;

    /// Samples Q(r / scale) on a grid.
    RadialFunction sample(const GridPtr& grid, double scale = 1.0) const;
};

ShootingResult shoot_ground_state(int n, double p, const ShootingOptions& opts = {});

struct BestConstant {
    double value; // W(Q)
    /// ((2 + 4/n)/(2C))^{n/4} when p = 1 + 4/n.
    std::optional<double> mass_threshold;
    ShootingResult ground_state;
};

BestConstant best_constant(int n, double p, const ShootingOptions& opts = {});

enum class Gauge { L2, Kinetic };

struct AscentOptions {
    double initial_step = 1.0;
    double step_growth = 2.0;
    double max_step = 1.0;
    double backtrack = 0.5;
    double armijo = 1e-4;
    int max_iterations = 5000;
    int max_backtracks = 60;
    double w_tol = 1e-10;
    double el_tol = 1e-6;
    /// Precondition the gradient with (lambda + L)^{-1} (a Sobolev gradient).
    bool preconditioned = true;
    /// Default: L2 on Euclidean grids, Kinetic on hyperbolic grids.
    std::optional<Gauge> gauge;
};

struct AscentSample {
    int iteration;
    double w;
    double l2;
    double gradient_norm; // sqrt of the kinetic form
    double el_residual;
};

enum class AscentStatus { Converged, Stalled, MaxIterations, NonAscent };

const char* to_string(AscentStatus status) noexcept;

struct MaximizerReport {
    std::vector<AscentSample> history;
    RadialFunction final_function;
    bool converged = false;
    AscentStatus status = AscentStatus::MaxIterations;
    EulerLagrangeConstants constants{};
    Gauge gauge = Gauge::L2;

    double final_w() const { return history.back().w; }
    bool monotone() const;
};

MaximizerReport ascend(const RadialOperator& op, const Exponents& exps, const RadialFunction& u0,
                       const AscentOptions& opts = {});
MaximizerReport ascend(const RadialOperator& op, const FractionalExponents& fexps,
                       const RadialFunction& u0, const AscentOptions& opts = {});

/// Equimeasurable non-increasing rearrangement of |f| against the grid weights.
/// Cells receive the root-mean-square of the sorted profile over their measure
/// interval, so the L2 norm is preserved exactly.
RadialFunction rearrange_decreasing(const RadialFunction& f);

/// Smallest node radius holding `fraction` of the L2 mass.
double support_radius(const RadialFunction& f, double fraction = 0.99);

struct ConcentrationRow {
    double radius;
    std::size_t cells;
    double w;
    double l2_at_gauge;    // |u|_2 with |grad u|_2 = 1
    double support_radius;
    double transplanted_w; // W_H(T u_R) for the Euclidean optimum on the same radii
    int iterations;
    AscentStatus status;
};

struct ConcentrationOptions {
    double spacing = 0.005;
    AscentOptions ascent{};
    double initial_width = 1.0;
    /// Start each radius from the previous optimum extended by zero.
    bool warm_start = true;
};

/// Hyperbolic ascent over an increasing schedule of outer radii at fixed spacing.
std::vector<ConcentrationRow> concentration_run(int n, double p, const std::vector<double>& radii,
                                                const ConcentrationOptions& opts = {});

} // namespace weinstein
