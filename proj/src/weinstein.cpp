#include "weinstein/weinstein.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "weinstein/error.hpp"

namespace weinstein {

namespace {

std::string describe(int n, double p) {
    std::ostringstream os;
    os << "(n = " << n << ", p = " << p << ")";
    return os.str();
}

void check_range(int n, double p, double p_max_two_dim, bool closed) {
    if (n < 2) {
        throw Error(ErrorCode::InvalidDimension, "dimension must be >= 2");
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::InvalidArgument, "p must exceed 1 " + describe(n, p));
    }
    const double pc = n == 2 ? p_max_two_dim : Exponents::critical_p(n);
    const bool ok = (n == 2 || closed) ? p <= pc : p < pc;
    if (!ok) {
        throw Error(ErrorCode::InvalidArgument, "p outside the admissible range " + describe(n, p));
    }
}

struct Parts {
    double lp;      // sum w |f|^{p+1}
    double mass;    // sum w f^2
    double kinetic; // <L f, f>, summed over faces: sum S f . f cancels to ~eps/h^2
};

void require_dimension(const RadialOperator& op, const RadialFunction& f, int n) {
    require_same_grid(*op.grid(), f);
    if (op.grid()->dimension() != n) {
        throw Error(ErrorCode::GridMismatch, "exponents are for n = " + std::to_string(n) +
                                                 " but the grid has n = " +
                                                 std::to_string(op.grid()->dimension()));
    }
}

Parts parts(const RadialOperator& op, const RadialFunction& f, int n, double p) {
    require_dimension(op, f, n);
    Parts out{lp_power(f, p + 1.0), lp_power(f, 2.0), quadratic_form_by_faces(op, f)};
    if (!(out.mass > 0.0)) {
        throw Error(ErrorCode::ZeroFunction, "Weinstein functional of the zero function");
    }
    if (!(out.kinetic > 0.0)) {
        throw Error(ErrorCode::ZeroGradient, "kinetic term vanished or underflowed");
    }
    return out;
}

double ratio(const Parts& q, double first, double second) {
    return q.lp / (std::pow(q.mass, 0.5 * first) * std::pow(q.kinetic, 0.5 * second));
}

// W [ (p+1)|f|^{p-1} f / P - first f / M - second (K f) / T ]
RadialFunction gradient_from(const RadialFunction& f, const RadialFunction& kinetic_f,
                             const Parts& q, double p, double first, double second) {
    const double value = ratio(q, first, second);
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = f[i];
        const double signed_pow = std::pow(std::abs(v), p - 1.0) * v;
        g[i] = value * ((p + 1.0) * signed_pow / q.lp - first * v / q.mass -
                        second * kinetic_f[i] / q.kinetic);
    }
    return RadialFunction(f.grid(), std::move(g));
}

} // namespace

double Exponents::critical_p(int n) {
    return n == 2 ? std::numeric_limits<double>::infinity()
                  : (n + 2.0) / (n - 2.0);
}

Exponents Exponents::make(int n, double p, double p_max_two_dim) {
    check_range(n, p, p_max_two_dim, false);
    return {n, p, 2.0 - 0.5 * (n - 2) * (p - 1.0), 0.5 * n * (p - 1.0)};
}

Exponents Exponents::make_closed(int n, double p, double p_max_two_dim) {
    check_range(n, p, p_max_two_dim, true);
    return {n, p, std::max(0.0, 2.0 - 0.5 * (n - 2) * (p - 1.0)), 0.5 * n * (p - 1.0)};
}

FractionalExponents FractionalExponents::make(int n, double p, double a, double p_max_two_dim) {
    if (n < 2) {
        throw Error(ErrorCode::InvalidDimension, "dimension must be >= 2");
    }
    if (!(a > 0.0 && a < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fractional order must lie in (0, 1)");
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::InvalidArgument, "p must exceed 1 " + describe(n, p));
    }
    const double upper = n > 2.0 * a ? (n + 2.0 * a) / (n - 2.0 * a) : p_max_two_dim;
    if (!(p < upper) || (n == 2 && p > p_max_two_dim)) {
        throw Error(ErrorCode::InvalidArgument, "p outside the fractional range " + describe(n, p));
    }
    return {n, p, a, 2.0 - (n - 2.0 * a) * (p - 1.0) / (2.0 * a), n * (p - 1.0) / (2.0 * a)};
}

double weinstein_value(const RadialOperator& op, const RadialFunction& f, const Exponents& exps) {
    return ratio(parts(op, f, exps.n, exps.p), exps.alpha, exps.beta);
}

RadialFunction weinstein_gradient(const RadialOperator& op, const RadialFunction& f,
                                  const Exponents& exps) {
    const auto q = parts(op, f, exps.n, exps.p);
    return gradient_from(f, op.apply(f), q, exps.p, exps.alpha, exps.beta);
}

EulerLagrangeConstants euler_lagrange_constants(const RadialOperator& op, const RadialFunction& f,
                                                const Exponents& exps) {
    const auto q = parts(op, f, exps.n, exps.p);
    return {exps.alpha / exps.beta * q.kinetic / q.mass, (exps.p + 1.0) / exps.beta * q.kinetic / q.lp};
}

double euler_lagrange_residual(const RadialOperator& op, const RadialFunction& f,
                               const Exponents& exps) {
    const auto c = euler_lagrange_constants(op, f, exps);
    const auto lf = op.apply(f);
    std::vector<double> r(f.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double v = f[i];
        r[i] = lf[i] + c.lambda * v - c.k * std::pow(std::abs(v), exps.p - 1.0) * v;
    }
    const RadialFunction res(f.grid(), std::move(r));
    return std::sqrt(lp_power(res, 2.0) / lp_power(f, 2.0));
}

double fractional_kinetic(const RadialOperator& op, const RadialFunction& f, double a) {
    return inner(fractional_apply_spectral(op, a, f), f);
}

double fractional_weinstein_value(const RadialOperator& op, const RadialFunction& f,
                                  const FractionalExponents& fexps) {
    require_dimension(op, f, fexps.n);
    Parts q{lp_power(f, fexps.p + 1.0), lp_power(f, 2.0), 0.0};
    if (!(q.mass > 0.0)) {
        throw Error(ErrorCode::ZeroFunction, "Weinstein functional of the zero function");
    }
    q.kinetic = fractional_kinetic(op, f, fexps.a);
    if (!(q.kinetic > 0.0)) {
        throw Error(ErrorCode::ZeroGradient, "fractional kinetic term vanished");
    }
    return ratio(q, fexps.gamma, fexps.rho);
}

RadialFunction fractional_weinstein_gradient(const RadialOperator& op, const RadialFunction& f,
                                             const FractionalExponents& fexps) {
    require_dimension(op, f, fexps.n);
    const auto la_f = fractional_apply_spectral(op, fexps.a, f);
    Parts q{lp_power(f, fexps.p + 1.0), lp_power(f, 2.0), inner(la_f, f)};
    if (!(q.mass > 0.0)) {
        throw Error(ErrorCode::ZeroFunction, "Weinstein functional of the zero function");
    }
    if (!(q.kinetic > 0.0)) {
        throw Error(ErrorCode::ZeroGradient, "fractional kinetic term vanished");
    }
    return gradient_from(f, la_f, q, fexps.p, fexps.gamma, fexps.rho);
}

double nls_mass_threshold(int n, double best_constant) {
    return std::pow((2.0 + 4.0 / n) / (2.0 * best_constant), 0.25 * n);
}

} // namespace weinstein
