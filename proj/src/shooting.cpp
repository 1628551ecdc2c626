#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "weinstein/error.hpp"
#include "weinstein/extremize.hpp"

namespace weinstein {

namespace {

enum class Fate { Undershoot, Overshoot, Undecided };

struct Rhs {
    int n;
    double p;
    std::array<double, 2> operator()(double r, const std::array<double, 2>& y) const {
        const double q = y[0];
        const double dq = y[1];
        const double nonlinear = std::pow(std::abs(q), p - 1.0) * q;
        const double friction = n > 1 ? (n - 1) / r * dq : 0.0;
        return {dq, q - nonlinear - friction};
    }
};

std::array<double, 2> rk4_step(const Rhs& f, double r, const std::array<double, 2>& y, double h) {
    const auto k1 = f(r, y);
    const auto k2 = f(r + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const auto k3 = f(r + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const auto k4 = f(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

// Q = a + c r^2, c = (a - a^p) / (2n), from the regular expansion at the origin.
double series_coefficient(int n, double p, double a) { return (a - std::pow(a, p)) / (2.0 * n); }

struct Trajectory {
    Fate fate = Fate::Undecided;
    std::vector<double> q;
    std::vector<double> dq;
};

Trajectory integrate(int n, double p, double a, const ShootingOptions& opts, bool keep) {
    const Rhs rhs{n, p};
    const double c = series_coefficient(n, p, a);
    double r = opts.start_radius;
    std::array<double, 2> y{a + c * r * r, 2.0 * c * r};
    Trajectory out;
    const auto steps = static_cast<std::size_t>(std::ceil((opts.max_radius - r) / opts.step));
    if (keep) {
        out.q.reserve(steps + 1);
        out.dq.reserve(steps + 1);
        out.q.push_back(y[0]);
        out.dq.push_back(y[1]);
    }
    for (std::size_t k = 0; k < steps; ++k) {
        y = rk4_step(rhs, r, y, opts.step);
        r = opts.start_radius + static_cast<double>(k + 1) * opts.step;
        if (keep) {
            out.q.push_back(y[0]);
            out.dq.push_back(y[1]);
        }
        if (y[0] < 0.0) {
            out.fate = Fate::Overshoot;
            return out;
        }
        if (y[1] > 0.0) {
            out.fate = Fate::Undershoot;
            return out;
        }
    }
    return out;
}

// Trapezoid rule on the uniform trajectory plus the ball of radius start_radius.
double radial_integral(const std::vector<double>& radii, const std::vector<double>& f, int n,
                       double origin_value, std::size_t count) {
    const double area = sphere_area(n);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < count; ++k) {
        const double a = f[k] * std::pow(radii[k], n - 1);
        const double b = f[k + 1] * std::pow(radii[k + 1], n - 1);
        sum += 0.5 * (a + b) * (radii[k + 1] - radii[k]);
    }
    sum += origin_value * std::pow(radii.front(), n) / n;
    return area * sum;
}

} // namespace

double ShootingResult::l2_norm() const { return std::sqrt(mass); }
double ShootingResult::lp_norm() const { return std::pow(lp_power, 1.0 / (p + 1.0)); }
double ShootingResult::gradient_norm() const { return std::sqrt(kinetic); }

double ShootingResult::evaluate(double r) const {
    if (r <= radii.front()) {
        return height + series_coefficient(n, p, height) * r * r;
    }
    const double h = radii[1] - radii[0];
    const double last = radii.back();
    if (r >= last) {
        const double decay = std::exp(-(r - last)) * std::pow(last / r, 0.5 * (n - 1));
        return values.back() * decay;
    }
    const auto k = std::min(static_cast<std::size_t>((r - radii.front()) / h), radii.size() - 2);
    const double t = (r - radii[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    // cubic Hermite with the ODE derivatives
    return (2 * t3 - 3 * t2 + 1) * values[k] + (t3 - 2 * t2 + t) * h * derivatives[k] +
           (-2 * t3 + 3 * t2) * values[k + 1] + (t3 - t2) * h * derivatives[k + 1];
}

RadialFunction ShootingResult::sample(const GridPtr& grid, double scale) const {
    return RadialFunction::sample(grid, [this, scale](double r) { return evaluate(r / scale); });
}

ShootingResult shoot_ground_state(int n, double p, const ShootingOptions& opts) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidDimension, "shooting needs n >= 1");
    }
    if (!(p > 1.0) || (n >= 3 && !(p < Exponents::critical_p(n)))) {
        throw Error(ErrorCode::InvalidArgument, "shooting exponent outside the admissible range");
    }
    if (!(opts.step > 0.0) || !(opts.max_radius > opts.start_radius) || !(opts.start_radius > 0.0)) {
        throw Error(ErrorCode::BracketNotFound, "bad shooting options");
    }

    // Heights just above the equilibrium Q = 1 stay trapped; large heights cross zero.
    double lo = 1.0;
    if (integrate(n, p, lo + 1e-9, opts, false).fate != Fate::Undershoot) {
        throw Error(ErrorCode::BracketNotFound, "lower bracket does not undershoot");
    }
    double hi = 2.0;
    int doublings = 0;
    while (integrate(n, p, hi, opts, false).fate != Fate::Overshoot) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > opts.max_bracket_doublings) {
            throw Error(ErrorCode::BracketNotFound, "no overshooting height found");
        }
    }
    while (hi - lo > opts.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const auto fate = integrate(n, p, mid, opts, false).fate;
        if (fate == Fate::Overshoot) {
            hi = mid;
        } else if (fate == Fate::Undershoot) {
            lo = mid;
        } else {
            lo = hi = mid;
        }
    }

    const auto under = integrate(n, p, lo, opts, true);
    const auto over = integrate(n, p, hi, opts, true);
    const std::size_t common = std::min(under.q.size(), over.q.size());

    ShootingResult out;
    out.n = n;
    out.p = p;
    out.height = 0.5 * (lo + hi);
    std::size_t cut = common;
    for (std::size_t k = 0; k < common; ++k) {
        const double mid = 0.5 * (under.q[k] + over.q[k]);
        if (mid < opts.profile_floor) {
            cut = k;
            out.decayed = true;
            break;
        }
        if (std::abs(under.q[k] - over.q[k]) > opts.spread_tol * mid) {
            cut = k;
            out.decayed = true;
            break;
        }
    }
    if (cut < 8) {
        throw Error(ErrorCode::BracketNotFound, "separatrix trajectory too short");
    }
    out.radii.resize(cut);
    out.values.resize(cut);
    out.derivatives.resize(cut);
    for (std::size_t k = 0; k < cut; ++k) {
        out.radii[k] = opts.start_radius + static_cast<double>(k) * opts.step;
        out.values[k] = 0.5 * (under.q[k] + over.q[k]);
        out.derivatives[k] = 0.5 * (under.dq[k] + over.dq[k]);
        if (!(out.values[k] > 0.0) || (k > 0 && !(out.values[k] < out.values[k - 1]))) {
            throw Error(ErrorCode::NonMonotoneProfile,
                        "ground-state profile is not positive and decreasing at r = " +
                            std::to_string(out.radii[k]));
        }
    }
    out.cutoff_radius = out.radii.back();

    std::vector<double> sq(cut);
    std::vector<double> pw(cut);
    std::vector<double> dsq(cut);
    for (std::size_t k = 0; k < cut; ++k) {
        sq[k] = out.values[k] * out.values[k];
        pw[k] = std::pow(out.values[k], p + 1.0);
        dsq[k] = out.derivatives[k] * out.derivatives[k];
    }
    out.mass = radial_integral(out.radii, sq, n, out.height * out.height, cut);
    out.lp_power = radial_integral(out.radii, pw, n, std::pow(out.height, p + 1.0), cut);
    out.kinetic = radial_integral(out.radii, dsq, n, 0.0, cut);

    // Testing -Q'' - ((n-1)/r) Q' + Q = Q^p against Q and against r Q'.
    const double first = std::abs(out.kinetic + out.mass - out.lp_power) / out.lp_power;
    const double lhs = 0.5 * (n - 2) * out.kinetic + 0.5 * n * out.mass;
    const double rhs = n / (p + 1.0) * out.lp_power;
    const double second = std::abs(lhs - rhs) / rhs;
    out.pohozaev_residual = std::max(first, second);
    return out;
}

BestConstant best_constant(int n, double p, const ShootingOptions& opts) {
    const auto exps = Exponents::make(n, p);
    auto q = shoot_ground_state(n, p, opts);
    const double c =
        q.lp_power / (std::pow(q.mass, 0.5 * exps.alpha) * std::pow(q.kinetic, 0.5 * exps.beta));
    std::optional<double> threshold;
    if (std::abs(p - (1.0 + 4.0 / n)) < 1e-12) {
        threshold = nls_mass_threshold(n, c);
    }
    return {c, threshold, std::move(q)};
}

} // namespace weinstein
