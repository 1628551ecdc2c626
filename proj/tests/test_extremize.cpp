#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "weinstein/error.hpp"
#include "weinstein/extremize.hpp"
#include "weinstein/transplant.hpp"

using namespace weinstein;

namespace {

RadialFunction gaussian(const GridPtr& g, double width = 1.0) {
    return RadialFunction::sample(g, [width](double r) { return std::exp(-r * r / (2.0 * width * width)); });
}

} // namespace

TEST_CASE("one-dimensional soliton height") {
    // Q(0) = ((p+1)/2)^{1/(p-1)}
    CHECK(shoot_ground_state(1, 3.0).height == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    CHECK(shoot_ground_state(1, 2.0).height == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(shoot_ground_state(1, 5.0).height == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-8));
}

TEST_CASE("ground state profiles") {
    for (auto [n, p] : {std::pair{2, 2.0}, std::pair{2, 3.0}, std::pair{3, 2.0}, std::pair{3, 3.0}}) {
        const auto q = shoot_ground_state(n, p);
        CHECK(q.decayed);
        CHECK(q.pohozaev_residual < 1e-4);
        CHECK(q.height > 1.0);
        for (std::size_t i = 1; i < q.values.size(); ++i) {
            REQUIRE(q.values[i] > 0.0);
            REQUIRE(q.values[i] < q.values[i - 1]);
        }
        CHECK(q.evaluate(0.0) == doctest::Approx(q.height));
        CHECK(q.evaluate(q.cutoff_radius + 5.0) > 0.0);
        CHECK(q.evaluate(q.cutoff_radius + 5.0) < q.evaluate(q.cutoff_radius));
        CHECK(q.l2_norm() == doctest::Approx(std::sqrt(q.mass)));
    }
}

TEST_CASE("shooting errors") {
    try {
        (void)shoot_ground_state(0, 3.0);
        FAIL("n = 0 accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidDimension);
    }
    CHECK_THROWS_AS(shoot_ground_state(3, 5.0), Error);
    CHECK_THROWS_AS(shoot_ground_state(2, 1.0), Error);
    ShootingOptions bad;
    bad.step = -1.0;
    try {
        (void)shoot_ground_state(2, 3.0, bad);
        FAIL("negative step accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BracketNotFound);
    }
    ShootingOptions short_range;
    short_range.max_radius = 0.5;
    CHECK_THROWS_AS(shoot_ground_state(2, 3.0, short_range), Error);
}

TEST_CASE("best constant") {
    const auto bc = best_constant(2, 3.0);
    REQUIRE(bc.mass_threshold.has_value());
    CHECK(std::abs(*bc.mass_threshold / bc.ground_state.l2_norm() - 1.0) < 5e-3);
    CHECK_FALSE(best_constant(3, 2.0).mass_threshold.has_value());

    const auto exps = Exponents::make(2, 3.0);
    auto sampled = [&](std::size_t cells) {
        const auto g = make_grid(Space::Euclidean, 2, cells, 20.0);
        return weinstein_value(build_laplacian(g), bc.ground_state.sample(g), exps);
    };
    const auto g = make_grid(Space::Euclidean, 2, 4000, 20.0);
    const auto q = bc.ground_state.sample(g);
    const auto op = build_laplacian(g);
    CHECK(std::abs(weinstein_value(op, 5.0 * q, exps) / weinstein_value(op, q, exps) - 1.0) < 1e-10);
    CHECK(std::abs(sampled(4000) / sampled(2000) - 1.0) < 1e-3);

    ShootingOptions half;
    half.step = 0.5e-4;
    CHECK(std::abs(best_constant(2, 3.0, half).value / bc.value - 1.0) < 1e-3);
}

TEST_CASE("euclidean ascent reaches the best constant") {
    for (auto [n, p] : {std::pair{2, 2.0}, std::pair{2, 3.0}, std::pair{3, 2.0}, std::pair{3, 3.0}}) {
        const auto g = make_grid(Space::Euclidean, n, 2000, 12.0);
        const auto report = ascend(build_laplacian(g), Exponents::make(n, p), gaussian(g));
        CAPTURE(n);
        CAPTURE(p);
        CHECK(report.monotone());
        CHECK(report.gauge == Gauge::L2);
        CHECK(std::abs(report.final_w() / best_constant(n, p).value - 1.0) < 5e-3);
        CHECK(std::abs(lp_norm(report.final_function, 2.0) - 1.0) < 1e-12);
        CHECK(report.status != AscentStatus::NonAscent);
    }
}

TEST_CASE("ascent from a perturbed ground state converges") {
    // The residual floor set by the grid is O(h^2); 16000 cells put it below 1e-6.
    const auto g = make_grid(Space::Euclidean, 2, 16000, 12.0);
    const auto exps = Exponents::make(2, 3.0);
    const auto q = best_constant(2, 3.0).ground_state.sample(g);
    const auto u0 = q + 0.01 * RadialFunction::sample(g, [](double r) {
                        return std::exp(-r * r) * std::cos(3.0 * r);
                    });
    AscentOptions opts;
    opts.w_tol = 0.0;
    opts.max_iterations = 100;
    const auto report = ascend(build_laplacian(g), exps, u0, opts);
    CHECK(report.converged);
    CHECK(report.status == AscentStatus::Converged);
    CHECK(report.history.back().el_residual < 1e-6);
    CHECK(report.history.front().el_residual > 1e-2);
    CHECK(std::abs(report.final_w() / best_constant(2, 3.0).value - 1.0) < 1e-3);
}

TEST_CASE("ascent history and status") {
    const auto g = make_grid(Space::Euclidean, 3, 400, 8.0);
    AscentOptions opts;
    opts.max_iterations = 3;
    const auto report = ascend(build_laplacian(g), Exponents::make(3, 2.0), gaussian(g, 2.5), opts);
    CHECK(report.history.size() == 4);
    CHECK(report.status == AscentStatus::MaxIterations);
    CHECK_FALSE(report.converged);
    CHECK(std::string(to_string(AscentStatus::Stalled)) == "stalled");
    for (std::size_t k = 1; k < report.history.size(); ++k) {
        CHECK(report.history[k].w >= report.history[k - 1].w);
        CHECK(report.history[k].iteration == static_cast<int>(k));
    }
    CHECK_THROWS_AS(ascend(build_laplacian(g), Exponents::make(3, 2.0), RadialFunction(g)), Error);
}

TEST_CASE("hyperbolic ascent concentrates") {
    const auto g = make_grid(Space::Hyperbolic, 2, 3000, 15.0);
    AscentOptions opts;
    opts.max_iterations = 60;
    const auto report = ascend(build_laplacian(g), Exponents::make(2, 3.0), gaussian(g), opts);
    CHECK(report.gauge == Gauge::Kinetic);
    CHECK(report.monotone());
    CHECK(report.history.back().w > report.history.front().w);
    CHECK(report.history.back().l2 < report.history.front().l2);
    CHECK(std::abs(report.history.back().gradient_norm - 1.0) < 1e-12);
    CHECK(support_radius(report.final_function) < support_radius(gaussian(g)));
}

TEST_CASE("fractional ascent") {
    const auto g = make_grid(Space::Euclidean, 2, 300, 10.0);
    const auto op = build_laplacian(g);
    const auto fe = FractionalExponents::make(2, 2.0, 0.5);
    AscentOptions opts;
    opts.max_iterations = 30;
    const auto report = ascend(op, fe, gaussian(g), opts);
    CHECK(report.monotone());
    CHECK(report.final_w() > fractional_weinstein_value(op, gaussian(g), fe));
}

TEST_CASE("rearrangement of a decreasing function is the identity") {
    const auto g = make_grid(Space::Hyperbolic, 3, 500, 6.0);
    const auto f = gaussian(g);
    const auto star = rearrange_decreasing(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs(star[i] - f[i]) <= 1e-12 * f[0]);
    }
}

TEST_CASE("rearrangement of a sign-flipped tail") {
    for (auto space : {Space::Euclidean, Space::Hyperbolic}) {
        const auto g = make_grid(space, 2, 2000, 10.0);
        const auto f = RadialFunction::sample(g, [](double r) { return (r < 2.0 ? 1.0 : -1.0) * std::exp(-r); });
        const auto star = rearrange_decreasing(f);
        const auto op = build_laplacian(g);
        CHECK(std::abs(lp_norm(star, 2.0) / lp_norm(f, 2.0) - 1.0) < 1e-3);
        CHECK(quadratic_form(op, star) < quadratic_form(op, f));
        for (std::size_t i = 1; i < star.size(); ++i) {
            REQUIRE(star[i] <= star[i - 1]);
            REQUIRE(star[i] >= 0.0);
        }
    }
}

TEST_CASE("rearrangement of an oscillating profile") {
    const auto g = make_grid(Space::Hyperbolic, 2, 1500, 8.0);
    const auto op = build_laplacian(g);
    const auto f = RadialFunction::sample(g, [](double r) {
        return std::exp(-0.5 * (r - 2.0) * (r - 2.0)) * (1.2 + std::sin(3.0 * r));
    });
    std::vector<double> mags(f.size());
    std::transform(f.values().begin(), f.values().end(), mags.begin(), [](double v) { return std::abs(v); });
    const RadialFunction abs_f(g, mags);
    const auto star = rearrange_decreasing(f);

    for (double s : {1.0, 2.0, 3.0, 4.0, 6.0}) {
        CHECK(std::abs(lp_norm(star, s) / lp_norm(f, s) - 1.0) < 1e-3);
    }
    CHECK(quadratic_form(op, star) <= quadratic_form(op, abs_f) * (1.0 + 1e-6));
    for (double t : {0.1, 1.0}) {
        CHECK(inner(star, heat_apply(op, t, star)) >= inner(abs_f, heat_apply(op, t, abs_f)));
    }
    const auto exps = Exponents::make(2, 3.0);
    CHECK(weinstein_value(op, star, exps) >= weinstein_value(op, f, exps));
    CHECK(support_radius(star) < support_radius(f));
}

TEST_CASE("support radius") {
    const auto g = make_grid(Space::Euclidean, 2, 1000, 10.0);
    // |e^{-r^2}|^2 in the plane: mass fraction 1 - e^{-2 rho^2}
    CHECK(support_radius(gaussian(g, std::sqrt(0.5))) ==
          doctest::Approx(std::sqrt(std::log(100.0) / 2.0)).epsilon(1e-2));
    CHECK(support_radius(gaussian(g), 1.0) <= 10.0);
}

TEST_CASE("concentration with a single radius") {
    ConcentrationOptions opts;
    opts.spacing = 0.01;
    opts.ascent.max_iterations = 40;
    const auto rows = concentration_run(2, 3.0, {4.0}, opts);
    REQUIRE(rows.size() == 1);
    const auto& row = rows.front();
    CHECK(row.radius == 4.0);
    CHECK(row.cells == 400);
    CHECK(row.w > 0.0);
    CHECK(row.l2_at_gauge > 0.0);
    CHECK(row.support_radius <= 4.0);
    CHECK(row.w >= row.transplanted_w);
    CHECK(row.iterations <= 40);
    CHECK_THROWS_AS(concentration_run(2, 3.0, {4.0, 2.0}, opts), Error);
}
