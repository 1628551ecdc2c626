#include "weinstein/potentials.hpp"

#include <cmath>
#include <string>

#include "weinstein/error.hpp"

namespace weinstein {

namespace {

// csch^2 r = 1/r^2 - 1/3 + r^2/15 - 2 r^4/189 + r^6/675 - 2 r^8/10395 + ...
constexpr double kSeriesCutoff = 0.05;

double v_series_tail(double r) {
    const double r2 = r * r;
    return r2 * (1.0 / 15.0 + r2 * (-2.0 / 189.0 + r2 * (1.0 / 675.0 + r2 * (-2.0 / 10395.0))));
}

} // namespace

double phi(double r, int n) {
    if (r < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "phi needs r >= 0");
    }
    double ratio;
    if (r < 1e-4) {
        const double r2 = r * r;
        ratio = 1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0;
    } else {
        ratio = r / std::sinh(r);
    }
    return std::pow(ratio, 0.5 * (n - 1));
}

double potential_v_plus_third(double r) {
    if (r < kSeriesCutoff) {
        return v_series_tail(r);
    }
    const double s = std::sinh(r);
    return 1.0 / (s * s) - 1.0 / (r * r) + 1.0 / 3.0;
}

double potential_v(double r) {
    if (!(r > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "V(r) needs r > 0");
    }
    if (r < kSeriesCutoff) {
        return -1.0 / 3.0 + v_series_tail(r);
    }
    const double s = std::sinh(r);
    return 1.0 / (s * s) - 1.0 / (r * r);
}

double k1(int n) { return 0.25 * (n - 1) * (n - 3); }
double k2(int n) { return 0.25 * (n - 1) * (n - 1); }

double potential_vn(double r, int n) { return k1(n) * potential_v(r); }

double potential_v0(double r, int n) { return (1.0 - n) / r; }

double conjugation_potential(double r, int n) { return potential_vn(r, n) + k2(n); }

double aux_h(double r) { return std::sinh(r) / std::cbrt(std::cosh(r)); }

double aux_h_prime(double r) {
    const double c = std::cosh(r);
    return (2.0 * c * c + 1.0) / (3.0 * std::pow(c, 4.0 / 3.0));
}

double aux_h_prime_minus_one(double r) {
    // a - b = (a^3 - b^3)/(a^2 + ab + b^2) with a = 2z + 1, b = 3 z^{2/3},
    // a^3 - b^3 = (z - 1)^2 (8z + 1) and z - 1 = sinh^2 r.
    const double c = std::cosh(r);
    const double s = std::sinh(r);
    const double z = c * c;
    const double a = 2.0 * z + 1.0;
    const double z23 = std::pow(c, 4.0 / 3.0);
    const double b = 3.0 * z23;
    const double s2 = s * s;
    const double numerator = s2 * s2 * (8.0 * z + 1.0);
    return numerator / ((a * a + a * b + b * b) * b);
}

PotentialProfile potential_profile(int n, const std::vector<double>& radii) {
    if (n < 2) {
        throw Error(ErrorCode::InvalidDimension, "dimension must be >= 2, got " + std::to_string(n));
    }
    PotentialProfile out;
    out.n = n;
    out.k1 = k1(n);
    out.k2 = k2(n);
    out.radii = radii;
    const std::size_t m = radii.size();
    out.v.resize(m);
    out.v_plus_third.resize(m);
    out.v0.resize(m);
    out.vn.resize(m);
    out.h_prime_minus_one.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = radii[i];
        out.v[i] = potential_v(r);
        out.v_plus_third[i] = potential_v_plus_third(r);
        out.v0[i] = potential_v0(r, n);
        out.vn[i] = out.k1 * out.v[i];
        out.h_prime_minus_one[i] = aux_h_prime_minus_one(r);
    }
    return out;
}

std::vector<double> log_sample(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
        throw Error(ErrorCode::InvalidArgument, "log_sample needs 0 < lo < hi and count >= 2");
    }
    std::vector<double> out(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace weinstein
