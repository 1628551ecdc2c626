#pragma once

#include <vector>

namespace weinstein {

/// Transplantation weight (r / sinh r)^{(n-1)/2}; equals 1 at the origin.
double phi(double r, int n);

/// V(r) = 1/sinh^2 r - 1/r^2, with a series branch near the origin.
double potential_v(double r);

/// V(r) + 1/3 without the cancellation of forming V first.
double potential_v_plus_third(double r);

/// K1 = ((n-1)/2)((n-3)/2) and K2 = ((n-1)/2)^2.
double k1(int n);
double k2(int n);

/// V_n(r) = K1 V(r).
double potential_vn(double r, int n);

/// V_0(r) = (1 - n)/r, the first-order coefficient of the conjugated operator.
double potential_v0(double r, int n);

/// V_n(r) + K2: the zeroth-order term separating phi^{-1} Delta_H phi from Delta_R on radial functions.
double conjugation_potential(double r, int n);

/// h(r) = sinh r / cosh^{1/3} r.
double aux_h(double r);

/// h'(r) = (2 cosh^2 r + 1) / (3 cosh^{4/3} r).
double aux_h_prime(double r);

/// h'(r) - 1 in the factored form (z-1)^2 (8z+1) / (...), z = cosh^2 r, exact in sign.
double aux_h_prime_minus_one(double r);

/// Sampled potentials on a radius list.
struct PotentialProfile {
    int n = 2;
    double k1 = 0.0;
    double k2 = 0.0;
    std::vector<double> radii;
    std::vector<double> v;
    std::vector<double> v_plus_third;
    std::vector<double> v0;
    std::vector<double> vn;
    std::vector<double> h_prime_minus_one;
};

PotentialProfile potential_profile(int n, const std::vector<double>& radii);

/// count points log-spaced in [lo, hi], endpoints included.
std::vector<double> log_sample(double lo, double hi, std::size_t count);

} // namespace weinstein
