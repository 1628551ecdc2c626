#pragma once

#include "weinstein/radial_grid.hpp"
#include "weinstein/radial_operators.hpp"

namespace weinstein {

/// Largest p accepted in two dimensions, where the Sobolev bound is vacuous.
inline constexpr double kDefaultPMaxTwoDim = 11.0;

/// Exponent bookkeeping for W(u) = |u|_{p+1}^{p+1} / (|u|_2^alpha |grad u|_2^beta).
struct Exponents {
    int n;
    double p;
    double alpha; // 2 - (n-2)(p-1)/2
    double beta;  // n(p-1)/2

    /// Validates 1 < p < (n+2)/(n-2) (n >= 3) or 1 < p <= p_max (n = 2).
    static Exponents make(int n, double p, double p_max_two_dim = kDefaultPMaxTwoDim);
    /// Also admits the Sobolev endpoint p = (n+2)/(n-2), where alpha = 0.
    static Exponents make_closed(int n, double p, double p_max_two_dim = kDefaultPMaxTwoDim);
    /// Upper end of the admissible range, +inf when n = 2.
    static double critical_p(int n);
};

/// W_a(u) = |u|_{p+1}^{p+1} / (|u|_2^gamma |(-Delta)^{a/2} u|_2^rho).
struct FractionalExponents {
    int n;
    double p;
    double a;
    double gamma; // 2 - (n - 2a)(p-1)/(2a)
    double rho;   // n(p-1)/(2a)

    static FractionalExponents make(int n, double p, double a,
                                    double p_max_two_dim = kDefaultPMaxTwoDim);
};

struct EulerLagrangeConstants {
    double lambda;
    double k;
};

/// Value of W with |grad f|^2 realized as <L f, f>_w.
double weinstein_value(const RadialOperator& op, const RadialFunction& f, const Exponents& exps);

/// Riesz representative (in <.,.>_w) of the first variation of W at f.
RadialFunction weinstein_gradient(const RadialOperator& op, const RadialFunction& f,
                                  const Exponents& exps);

/// lambda = (alpha/beta) |grad f|^2/|f|_2^2, K = ((p+1)/beta) |grad f|^2/|f|_{p+1}^{p+1}.
EulerLagrangeConstants euler_lagrange_constants(const RadialOperator& op, const RadialFunction& f,
                                                const Exponents& exps);

/// |L f + lambda f - K |f|^{p-1} f|_w / |f|_w with lambda, K from f itself.
double euler_lagrange_residual(const RadialOperator& op, const RadialFunction& f,
                               const Exponents& exps);

/// <L^a f, f>_w, the squared fractional kinetic term, via the eigendecomposition.
double fractional_kinetic(const RadialOperator& op, const RadialFunction& f, double a);

double fractional_weinstein_value(const RadialOperator& op, const RadialFunction& f,
                                  const FractionalExponents& fexps);

RadialFunction fractional_weinstein_gradient(const RadialOperator& op, const RadialFunction& f,
                                             const FractionalExponents& fexps);

/// The mass threshold ((2 + 4/n) / (2C))^{n/4} for the critical exponent p = 1 + 4/n.
double nls_mass_threshold(int n, double best_constant);

} // namespace weinstein
