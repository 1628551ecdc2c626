#pragma once

#include "weinstein/potentials.hpp"
#include "weinstein/radial_grid.hpp"
#include "weinstein/radial_operators.hpp"
#include "weinstein/weinstein.hpp"

namespace weinstein {

/// Operators for a Euclidean grid and its radius-matched hyperbolic twin.
///
/// `conjugated` is L_R + diag(V_n + K2) on the Euclidean grid; `hyperbolic`
/// is -Delta_H on the hyperbolic grid (by default the exact conjugate of
/// `conjugated`).
struct TransplantContext {
    GridPtr euclidean_grid;
    GridPtr hyperbolic_grid;
    RadialOperator euclidean;
    RadialOperator hyperbolic;
    RadialOperator conjugated;

    static TransplantContext make(const GridPtr& euclidean_grid,
                                  HyperbolicScheme scheme = HyperbolicScheme::Conjugated);
};

/// T(u) = phi u on the matched hyperbolic grid.
RadialFunction transplant_to_hyperbolic(const RadialFunction& u, const GridPtr& hyperbolic_grid);
RadialFunction transplant_to_hyperbolic(const RadialFunction& u);

/// Inverse map, phi^{-1} v back on the matched Euclidean grid.
RadialFunction transplant_to_euclidean(const RadialFunction& v, const GridPtr& euclidean_grid);

struct FormGap {
    double gap;     // <L_H Tu, Tu> - <L_R u, u>
    double epsilon; // gap / |u|_2^2, zero for u = 0
};

FormGap quadratic_form_gap(const TransplantContext& ctx, const RadialFunction& u);

struct WeinsteinComparison {
    double w_euclidean;
    double w_hyperbolic;
    double l2_euclidean;
    double l2_hyperbolic;
    double lp_euclidean; // |u|_{p+1}
    double lp_hyperbolic;
    double kinetic_euclidean; // |grad u|^2
    double kinetic_hyperbolic;

    bool l2_isometric(double rel_tol = 1e-12) const;
    bool lp_strictly_smaller() const { return lp_hyperbolic < lp_euclidean; }
    bool kinetic_strictly_larger() const { return kinetic_hyperbolic > kinetic_euclidean; }
    bool w_strictly_smaller() const { return w_hyperbolic < w_euclidean; }
};

WeinsteinComparison weinstein_comparison(const TransplantContext& ctx, const RadialFunction& u,
                                         const Exponents& exps);

struct FOfT {
    double direct;     // resolvents of L_H on Tu and L_R on u
    double conjugated; // t <(V_n + K2) (t + Lbar)^{-1} u, (t + L_R)^{-1} u>_R
    double discrepancy() const;
};

/// F(t) = <(t + L_H)^{-1} L_H Tu, Tu>_H - <(t + L_R)^{-1} L_R u, u>_R, both routes.
FOfT f_of_t_routes(const TransplantContext& ctx, const RadialFunction& u, double t);

/// The direct route; throws NumericFailure when the routes disagree beyond 1e-8.
double f_of_t(const TransplantContext& ctx, const RadialFunction& u, double t);

struct FractionalGap {
    double spectral;   // <Lbar^a u, u> - <L_R^a u, u>
    double quadrature; // (sin a pi / pi) int t^{a-1} F(t) dt
    double relative_discrepancy() const;
};

FractionalGap fractional_form_gap_routes(const TransplantContext& ctx, const RadialFunction& u,
                                         double a, const QuadratureSpec& quad = {});

/// Spectral fractional gap, cross-checked against the F(t) integral to 1e-5.
double fractional_form_gap(const TransplantContext& ctx, const RadialFunction& u, double a,
                           const QuadratureSpec& quad = {});

} // namespace weinstein
