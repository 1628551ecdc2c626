#include "weinstein/transplant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "weinstein/error.hpp"

namespace weinstein {

TransplantContext TransplantContext::make(const GridPtr& euclidean_grid, HyperbolicScheme scheme) {
    if (euclidean_grid->space() != Space::Euclidean) {
        throw Error(ErrorCode::GridMismatch, "transplantation starts from a Euclidean grid");
    }
    auto hyp = matched_grid(euclidean_grid, Space::Hyperbolic);
    return TransplantContext{euclidean_grid, hyp, build_laplacian(euclidean_grid),
                             build_laplacian(hyp, scheme),
                             build_conjugated_hyperbolic(euclidean_grid)};
}

RadialFunction transplant_to_hyperbolic(const RadialFunction& u, const GridPtr& hyperbolic_grid) {
    const auto& src = *u.grid();
    if (src.space() != Space::Euclidean || hyperbolic_grid->space() != Space::Hyperbolic ||
        src.dimension() != hyperbolic_grid->dimension() || src.size() != hyperbolic_grid->size() ||
        src.radius() != hyperbolic_grid->radius()) {
        throw Error(ErrorCode::GridMismatch, "transplantation needs radius-matched grids");
    }
    std::vector<double> out(u.size());
    const auto r = src.nodes();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = phi(r[i], src.dimension()) * u[i];
    }
    return RadialFunction(hyperbolic_grid, std::move(out));
}

RadialFunction transplant_to_hyperbolic(const RadialFunction& u) {
    return transplant_to_hyperbolic(u, matched_grid(u.grid(), Space::Hyperbolic));
}

RadialFunction transplant_to_euclidean(const RadialFunction& v, const GridPtr& euclidean_grid) {
    const auto& src = *v.grid();
    if (src.space() != Space::Hyperbolic || euclidean_grid->space() != Space::Euclidean ||
        src.dimension() != euclidean_grid->dimension() || src.size() != euclidean_grid->size() ||
        src.radius() != euclidean_grid->radius()) {
        throw Error(ErrorCode::GridMismatch, "transplantation needs radius-matched grids");
    }
    std::vector<double> out(v.size());
    const auto r = src.nodes();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = v[i] / phi(r[i], src.dimension());
    }
    return RadialFunction(euclidean_grid, std::move(out));
}

FormGap quadratic_form_gap(const TransplantContext& ctx, const RadialFunction& u) {
    require_same_grid(*ctx.euclidean_grid, u);
    const auto tu = transplant_to_hyperbolic(u, ctx.hyperbolic_grid);
    const double gap = quadratic_form(ctx.hyperbolic, tu) - quadratic_form(ctx.euclidean, u);
    const double mass = lp_power(u, 2.0);
    return {gap, mass > 0.0 ? gap / mass : 0.0};
}

bool WeinsteinComparison::l2_isometric(double rel_tol) const {
    return std::abs(l2_hyperbolic - l2_euclidean) <= rel_tol * std::max(l2_euclidean, 1e-300);
}

WeinsteinComparison weinstein_comparison(const TransplantContext& ctx, const RadialFunction& u,
                                         const Exponents& exps) {
    require_same_grid(*ctx.euclidean_grid, u);
    const auto tu = transplant_to_hyperbolic(u, ctx.hyperbolic_grid);
    WeinsteinComparison out{};
    out.w_euclidean = weinstein_value(ctx.euclidean, u, exps);
    out.w_hyperbolic = weinstein_value(ctx.hyperbolic, tu, exps);
    out.l2_euclidean = lp_norm(u, 2.0);
    out.l2_hyperbolic = lp_norm(tu, 2.0);
    out.lp_euclidean = lp_norm(u, exps.p + 1.0);
    out.lp_hyperbolic = lp_norm(tu, exps.p + 1.0);
    out.kinetic_euclidean = quadratic_form(ctx.euclidean, u);
    out.kinetic_hyperbolic = quadratic_form(ctx.hyperbolic, tu);
    return out;
}

namespace {

// A = <(t + L)^{-1} L f, f>_w and B = t <(t + L)^{-1} f, f>_w, with A + B = |f|^2.
struct ResolventSplit {
    double a;
    double b;
    RadialFunction g; // (t + L)^{-1} f
};

ResolventSplit resolvent_split(const RadialOperator& op, const RadialFunction& f, double t) {
    auto g = apply_resolvent(op, t, f);
    const double a = inner(g, op.apply(f));
    const double b = t * inner(g, f);
    return {a, b, std::move(g)};
}

} // namespace

double FOfT::discrepancy() const {
    const double scale = std::max({std::abs(direct), std::abs(conjugated)});
    return scale > 0.0 ? std::abs(direct - conjugated) / scale : 0.0;
}

FOfT f_of_t_routes(const TransplantContext& ctx, const RadialFunction& u, double t) {
    require_same_grid(*ctx.euclidean_grid, u);
    if (!(t > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "F(t) needs t > 0");
    }
    if (lp_power(u, 2.0) == 0.0) {
        return {0.0, 0.0};
    }
    const auto tu = transplant_to_hyperbolic(u, ctx.hyperbolic_grid);
    const auto e = resolvent_split(ctx.euclidean, u, t);
    const auto h = resolvent_split(ctx.hyperbolic, tu, t);
    // F = A_H - A_R = (|Tu|^2 - |u|^2) + B_R - B_H; difference whichever pair is smaller.
    const double direct = e.a <= e.b ? h.a - e.a
                                     : (lp_power(tu, 2.0) - lp_power(u, 2.0)) + (e.b - h.b);

    // Resolvent identity: F = t <(Lbar - L_R) gbar, g> with Lbar - L_R = diag(V_n + K2).
    const auto gbar = apply_resolvent(ctx.conjugated, t, u);
    const auto r = ctx.euclidean_grid->nodes();
    const auto w = ctx.euclidean_grid->weights();
    const int n = ctx.euclidean_grid->dimension();
    double conjugated = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        conjugated += w[i] * conjugation_potential(r[i], n) * gbar[i] * e.g[i];
    }
    return {direct, t * conjugated};
}

double f_of_t(const TransplantContext& ctx, const RadialFunction& u, double t) {
    const auto routes = f_of_t_routes(ctx, u, t);
    if (routes.discrepancy() > 1e-8) {
        throw Error(ErrorCode::NumericFailure, "F(t) routes disagree by " +
                                                   std::to_string(routes.discrepancy()));
    }
    return routes.direct;
}

double FractionalGap::relative_discrepancy() const {
    const double scale = std::max(std::abs(spectral), std::abs(quadrature));
    return scale > 0.0 ? std::abs(spectral - quadrature) / scale : 0.0;
}

FractionalGap fractional_form_gap_routes(const TransplantContext& ctx, const RadialFunction& u,
                                         double a, const QuadratureSpec& quad) {
    require_same_grid(*ctx.euclidean_grid, u);
    if (!(a > 0.0 && a < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fractional order must lie in (0, 1)");
    }
    FractionalGap out{};
    out.spectral = fractional_kinetic(ctx.conjugated, u, a) - fractional_kinetic(ctx.euclidean, u, a);

    // F(t) = <(t + Lbar)^{-1} Lbar u, u> - <(t + L)^{-1} L u, u>, integrated on the log grid.
    const auto stiff_bar = ctx.conjugated.apply_stiffness(u.values());
    const auto stiff = ctx.euclidean.apply_stiffness(u.values());
    const double lambda_max =
        std::max(ctx.conjugated.spectral_upper_bound(), ctx.euclidean.spectral_upper_bound());
    const auto rule = log_quadrature(a, lambda_max, quad);
    double acc = 0.0;
    const auto w = u.grid()->weights();
    for (std::size_t k = 0; k < rule.count; ++k) {
        const double s = rule.node(k);
        const double t = std::exp(s);
        const auto g_bar = ctx.conjugated.solve_shifted_stiffness(t, stiff_bar);
        const auto g = ctx.euclidean.solve_shifted_stiffness(t, stiff);
        double f_t = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            f_t += w[i] * (g_bar[i] - g[i]) * u[i];
        }
        acc += std::exp(a * s) * rule.step * f_t;
    }
    out.quadrature = std::sin(a * std::numbers::pi) / std::numbers::pi * acc;
    return out;
}

double fractional_form_gap(const TransplantContext& ctx, const RadialFunction& u, double a,
                           const QuadratureSpec& quad) {
    const auto routes = fractional_form_gap_routes(ctx, u, a, quad);
    if (routes.relative_discrepancy() > 1e-5) {
        throw Error(ErrorCode::QuadratureNonConvergence,
                    "fractional gap routes disagree by " +
                        std::to_string(routes.relative_discrepancy()));
    }
    return routes.spectral;
}

} // namespace weinstein
