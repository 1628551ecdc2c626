#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "weinstein/error.hpp"
#include "weinstein/extremize.hpp"
#include "weinstein/radial_operators.hpp"

using namespace weinstein;
using std::numbers::pi;

namespace {

RadialFunction random_function(const GridPtr& g, unsigned seed, double decay = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(g->size());
    const auto r = g->nodes();
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = u(rng) * std::exp(-decay * r[i]);
    }
    return RadialFunction(g, std::move(v));
}

RadialFunction smooth_random(const GridPtr& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a = u(rng), b = u(rng), c = u(rng);
    return RadialFunction::sample(g, [=](double r) {
        return std::exp(-r * r / 2.0) * (1.0 + a * std::cos(2.0 * r) + b * r) + c * std::exp(-r * r / 8.0);
    });
}

double wnorm(const RadialFunction& f) { return std::sqrt(inner(f, f)); }

double rel(const RadialFunction& a, const RadialFunction& b) { return wnorm(a - b) / wnorm(b); }

// L = diag(values) on an 8-cell grid.
RadialOperator diagonal_operator(std::vector<double> values) {
    const auto g = make_grid(Space::Euclidean, 2, values.size(), 1.0);
    std::vector<double> d(values.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = values[i] * g->weights()[i];
    }
    return RadialOperator(g, OperatorKind::Shifted, d, std::vector<double>(d.size() - 1, 0.0));
}

} // namespace

TEST_CASE("euclidean laplacian of a gaussian") {
    auto max_error = [](std::size_t cells) {
        const auto g = make_grid(Space::Euclidean, 3, cells, 8.0);
        const auto op = build_laplacian(g);
        const auto lf = op.apply(RadialFunction::sample(g, [](double r) { return std::exp(-r * r / 2); }));
        double worst = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i) {
            const double r = g->nodes()[i];
            if (r > 0.5 && r < 6.0) {
                worst = std::max(worst, std::abs(lf[i] - (3.0 - r * r) * std::exp(-r * r / 2)));
            }
        }
        return worst;
    };
    const double coarse = max_error(400);
    const double fine = max_error(800);
    CHECK(coarse < 1e-3);
    CHECK(coarse / fine > 3.8);
}

TEST_CASE("weighted symmetry and positivity") {
    for (auto space : {Space::Euclidean, Space::Hyperbolic}) {
        for (int n : {2, 3, 5}) {
            const auto g = make_grid(space, n, 500, 8.0);
            for (auto scheme : {HyperbolicScheme::Conjugated, HyperbolicScheme::SinhFlux}) {
                const auto op = build_laplacian(g, scheme);
                const auto f = random_function(g, 1, 0.5 * (n - 1));
                const auto h = random_function(g, 2, 0.5 * (n - 1));
                const double a = inner(op.apply(f), h);
                const double b = inner(f, op.apply(h));
                CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), wnorm(op.apply(f)) * wnorm(h)));
                CHECK(quadratic_form(op, f) > 0.0);
                CHECK(quadratic_form(op, f) == doctest::Approx(quadratic_form_by_faces(op, f)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("quadratic form values") {
    const auto g = make_grid(Space::Euclidean, 2, 4000, 12.0);
    const auto op = build_laplacian(g);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r / 2); });
    CHECK(std::abs(quadratic_form(op, f) / pi - 1.0) < 1e-3);

    // constant function: only the Dirichlet face contributes
    const auto one = RadialFunction::sample(g, [](double) { return 1.0; });
    CHECK(quadratic_form(op, one) > 0.0);

    // ground state gradient against the shooting oracle
    const auto q = shoot_ground_state(2, 3.0);
    const auto g20 = make_grid(Space::Euclidean, 2, 4000, 20.0);
    const double kinetic = quadratic_form(build_laplacian(g20), q.sample(g20));
    CHECK(std::abs(kinetic / q.kinetic - 1.0) < 5e-3);
}

TEST_CASE("hyperbolic bottom of the spectrum") {
    // Fixed spacing, growing ball: Dirichlet eigenvalue decreases toward (n-1)^2/4.
    const double h = 15.0 / 2000.0;
    double previous = 1e9;
    for (double radius : {5.0, 10.0, 15.0}) {
        const auto g = make_grid(Space::Hyperbolic, 2, static_cast<std::size_t>(std::lround(radius / h)), radius);
        const double lowest = build_laplacian(g).spectral().eigenvalues.front();
        CHECK(lowest > 0.25);
        CHECK(lowest < previous);
        previous = lowest;
    }
    CHECK(previous < 0.30);

    const auto g3 = make_grid(Space::Hyperbolic, 3, 1500, 15.0);
    const double lowest3 = build_laplacian(g3).spectral().eigenvalues.front();
    CHECK(lowest3 > 1.0);
    CHECK(lowest3 < 1.05);
}

TEST_CASE("spectral data") {
    const auto g = make_grid(Space::Hyperbolic, 3, 300, 6.0);
    const auto op = build_laplacian(g);
    CHECK_FALSE(op.has_spectral());
    const auto& sd = op.spectral();
    CHECK(op.has_spectral());
    CHECK(std::is_sorted(sd.eigenvalues.begin(), sd.eigenvalues.end()));
    CHECK(sd.eigenvalues.front() >= 0.0);

    const auto n = static_cast<Eigen::Index>(g->size());
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w[i] = g->weights()[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd gram = sd.eigenvectors.transpose() * w.asDiagonal() * sd.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);

    const auto f = random_function(g, 3);
    const auto direct = op.apply(f);
    const auto via = apply_spectral_function(op, [](double x) { return x; }, f);
    CHECK(rel(via, direct) < 1e-10);
    CHECK(sd.eigenvalues.back() <= op.spectral_upper_bound() * (1.0 + 1e-12));
}

TEST_CASE("resolvent") {
    const auto g = make_grid(Space::Euclidean, 3, 600, 10.0);
    const auto op = build_laplacian(g);
    const auto& sd = op.spectral();

    // eigenvector input
    const std::size_t k = 5;
    std::vector<double> ev(g->size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        ev[i] = sd.eigenvectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
    const RadialFunction e(g, ev);
    const double t = 0.7;
    CHECK(rel(apply_resolvent(op, t, e), (1.0 / (t + sd.eigenvalues[k])) * e) < 1e-10);

    // t g -> f as t grows
    const auto f = smooth_random(g, 4);
    const double big = 1e8;
    CHECK(rel(big * apply_resolvent(op, big, f), f) < 1e-6);

    // resolvent identity
    const double s = 2.5;
    const auto lhs = (s - t) * apply_resolvent(op, s, apply_resolvent(op, t, f));
    const auto rhs = apply_resolvent(op, t, f) - apply_resolvent(op, s, f);
    CHECK(wnorm(lhs - rhs) <= 1e-9 * wnorm(rhs));

    CHECK_THROWS_AS(apply_resolvent(op, 0.0, f), Error);
}

TEST_CASE("fractional powers on diagonal operators") {
    const auto four = diagonal_operator(std::vector<double>(8, 4.0));
    const auto f = RadialFunction::sample(four.grid(), [](double r) { return 1.0 + r; });
    CHECK(rel(fractional_apply_spectral(four, 0.5, f), 2.0 * f) < 1e-14);

    const auto two = diagonal_operator(std::vector<double>(8, 2.0));
    const auto one = RadialFunction::sample(two.grid(), [](double) { return 1.0; });
    const auto root = fractional_apply_balakrishnan(two, 0.5, one);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(root[i] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    }

    const auto mixed = diagonal_operator({1, 9, 1, 9, 1, 9, 1, 9});
    const auto out = fractional_apply_balakrishnan(mixed, 0.5, one);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(out[i] == doctest::Approx(i % 2 == 0 ? 1.0 : 3.0).epsilon(1e-8));
    }
}

TEST_CASE("fractional power identities") {
    const auto g = make_grid(Space::Euclidean, 2, 800, 10.0);
    const auto op = build_laplacian(g);
    const auto f = smooth_random(g, 5);
    const auto lf = op.apply(f);
    CHECK(rel(fractional_apply_spectral(op, 0.999, f), lf) < 1e-2);
    for (double a : {0.25, 0.5, 0.75}) {
        const auto composed = fractional_apply_spectral(op, 1.0 - a, fractional_apply_spectral(op, a, f));
        CHECK(rel(composed, lf) < 1e-9);
    }
    CHECK_THROWS_AS(fractional_apply_spectral(op, 0.0, f), Error);
    CHECK_THROWS_AS(fractional_apply_balakrishnan(op, 1.0, f), Error);
}

TEST_CASE("balakrishnan agrees with the spectral route") {
    for (auto space : {Space::Euclidean, Space::Hyperbolic}) {
        const auto g = make_grid(space, 2, 2000, space == Space::Euclidean ? 12.0 : 15.0);
        const auto op = build_laplacian(g);
        const auto f = random_function(g, 6, 0.5);
        for (double a : {0.25, 0.5, 0.75}) {
            const auto quad = fractional_apply_balakrishnan_detailed(op, a, f);
            CHECK(rel(quad.value, fractional_apply_spectral(op, a, f)) < 1e-6);
            CHECK(quad.error_estimate < 1e-8);
        }
    }
}

TEST_CASE("log quadrature window") {
    const QuadratureSpec quad;
    const auto q = log_quadrature(0.25, 1e6, quad);
    // both tails below the truncation tolerance at the extremes of the spectrum
    CHECK(std::exp(0.25 * q.s_lo) / 0.25 <= quad.truncation_tol * std::pow(quad.lambda_floor, 0.25) * 1.0001);
    CHECK(1e6 * std::exp(-0.75 * q.s_hi) / 0.75 <= quad.truncation_tol * std::pow(1e6, 0.25) * 1.0001);
    CHECK(q.node(0) > q.s_lo);
    CHECK(q.node(q.count - 1) < q.s_hi);
}

TEST_CASE("heat semigroup") {
    const auto g = make_grid(Space::Hyperbolic, 2, 600, 8.0);
    const auto op = build_laplacian(g);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });

    CHECK(rel(heat_apply(op, 1e-8, f), f) < 1e-6);
    const auto two_steps = heat_apply(op, 0.3, heat_apply(op, 0.2, f));
    CHECK(rel(two_steps, heat_apply(op, 0.5, f)) < 1e-9);

    // (<f,f> - <f, e^{-tL} f>) / t -> <Lf, f>, Richardson on t = 1e-4, 1e-5
    auto quotient = [&](double t) { return (inner(f, f) - inner(f, heat_apply(op, t, f))) / t; };
    const double q4 = quotient(1e-4);
    const double q5 = quotient(1e-5);
    const double extrapolated = (10.0 * q5 - q4) / 9.0;
    CHECK(std::abs(extrapolated / quadratic_form(op, f) - 1.0) < 1e-2);
    CHECK_THROWS_AS(heat_apply(op, 0.0, f), Error);
}

TEST_CASE("heat kernel positivity and radial shape") {
    for (auto space : {Space::Euclidean, Space::Hyperbolic}) {
        const auto g = make_grid(space, 3, 300, 6.0);
        const auto op = build_laplacian(g);
        for (double t : {0.05, 0.5}) {
            const auto k = heat_kernel(op, t);
            CHECK(k.minCoeff() >= -1e-10);
            // origin row decays away from the origin
            for (Eigen::Index j = 1; j < k.cols(); ++j) {
                CHECK(k(0, j) <= k(0, j - 1) + 1e-12);
            }
            // every row rises to a single peak then falls
            for (Eigen::Index i = 0; i < k.rows(); i += 37) {
                Eigen::Index peak = 0;
                k.row(i).maxCoeff(&peak);
                for (Eigen::Index j = 1; j <= peak; ++j) {
                    CHECK(k(i, j) >= k(i, j - 1) - 1e-12);
                }
                for (Eigen::Index j = peak + 1; j < k.cols(); ++j) {
                    CHECK(k(i, j) <= k(i, j - 1) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("subordination density") {
    for (double s : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
        CHECK(subordination_density(1.0, 0.5, s) >= 0.0);
    }
    CHECK_THROWS_AS(subordination_density(1.0, 0.3, 1.0), Error);
    try {
        subordination_density(1.0, 0.3, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedExponent);
    }

    // Laplace transform identity by adaptive quadrature
    boost::math::quadrature::exp_sinh<double> integrator;
    auto laplace = [&](double t, double lambda) {
        return integrator.integrate(
            [&](double s) { return subordination_density(t, 0.5, s) * std::exp(-s * lambda); });
    };
    CHECK(std::abs(laplace(1.0, 1.0) - std::exp(-1.0)) < 1e-6);
    CHECK(std::abs(laplace(2.0, 4.0) - std::exp(-4.0)) < 1e-6);
    CHECK(std::abs(laplace(0.5, 9.0) - std::exp(-1.5)) < 1e-6);
}

TEST_CASE("subordinated semigroup") {
    const auto g = make_grid(Space::Euclidean, 2, 800, 10.0);
    const auto op = build_laplacian(g);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r * r); });
    for (double t : {0.1, 1.0}) {
        const auto direct = fractional_heat_apply(op, t, 0.5, f);
        CHECK(rel(subordinated_heat_apply(op, t, 0.5, f), direct) < 1e-6);
        for (double a : {0.25, 0.5, 0.75}) {
            const auto v = fractional_heat_apply(op, t, a, f);
            CHECK(*std::min_element(v.values().begin(), v.values().end()) >= -1e-10);
        }
    }
}

TEST_CASE("shifted operator") {
    const auto g = make_grid(Space::Euclidean, 3, 200, 5.0);
    const auto op = build_laplacian(g);
    const auto plus = shifted(op, 1.0);
    CHECK(plus.kind() == OperatorKind::Shifted);
    const auto f = random_function(g, 9);
    CHECK(rel(plus.apply(f), op.apply(f) + f) < 1e-13);
}
