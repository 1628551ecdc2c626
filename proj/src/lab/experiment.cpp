#include "weinstein/lab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>

#include "weinstein/error.hpp"
#include "weinstein/extremize.hpp"
#include "weinstein/lab/battery.hpp"
#include "weinstein/lab/parallel.hpp"
#include "weinstein/potentials.hpp"
#include "weinstein/transplant.hpp"
#include "weinstein/weinstein.hpp"

namespace weinstein::lab {

namespace {

double relative_difference(const RadialFunction& a, const RadialFunction& b) {
    const double scale = std::sqrt(lp_power(b, 2.0));
    const double diff = std::sqrt(lp_power(a - b, 2.0));
    return scale > 0.0 ? diff / scale : diff;
}

RadialFunction absolute(const RadialFunction& f) {
    RadialFunction out = f;
    for (double& v : out.values()) {
        v = std::abs(v);
    }
    return out;
}

bool nonnegative(const RadialFunction& f) {
    return std::all_of(f.values().begin(), f.values().end(), [](double v) { return v >= 0.0; });
}

// The battery on the configured geometry; hyperbolic members are transplanted.
std::vector<BatteryMember> battery_on(const TransplantContext& ctx, Space space,
                                      std::uint64_t seed) {
    auto members = make_battery(ctx.euclidean_grid, seed);
    if (space == Space::Hyperbolic) {
        for (auto& m : members) {
            m.u = transplant_to_hyperbolic(m.u, ctx.hyperbolic_grid);
        }
    }
    return members;
}

std::vector<double> fractional_orders(const ExperimentConfig& c) {
    return c.a ? std::vector<double>{*c.a} : std::vector<double>{0.25, 0.5, 0.75};
}

void gn_constant(const ExperimentConfig& c, Report& report) {
    const auto exps = Exponents::make(c.n, c.p);
    const auto bc = best_constant(c.n, c.p);
    const auto& q = bc.ground_state;
    report.results["best_constant"] = bc.value;
    report.results["ground_state_height"] = q.height;
    report.results["ground_state_l2_norm"] = q.l2_norm();
    report.results["ground_state_lp_norm"] = q.lp_norm();
    report.results["ground_state_gradient_norm"] = q.gradient_norm();
    report.results["pohozaev_residual"] = q.pohozaev_residual;
    report.verdict("extremize.pohozaev_consistency", 1e-4)
        .record(q.pohozaev_residual < 1e-4, q.pohozaev_residual);
    if (bc.mass_threshold) {
        report.results["mass_threshold"] = *bc.mass_threshold;
        const double rel = *bc.mass_threshold / q.l2_norm() - 1.0;
        report.verdict("weinstein_core.critical_mass_identity", 5e-3).record(std::abs(rel) < 5e-3, rel);
    }

    const auto grid = make_grid(c.space, c.n, c.grid_n, c.radius);
    const auto op = build_laplacian(grid);
    const auto u0 = RadialFunction::sample(grid, [](double r) { return std::exp(-0.5 * r * r); });
    AscentOptions opts;
    opts.max_iterations = c.max_iterations;
    const auto run = ascend(op, exps, u0, opts);

    Table history{{"iteration", "W", "l2", "gradient_norm", "el_residual"}, {}};
    for (const auto& s : run.history) {
        history.add_row({s.iteration, s.w, s.l2, s.gradient_norm, s.el_residual});
    }
    report.tables["ascent"] = std::move(history);
    const double gap = run.final_w() / bc.value - 1.0;
    report.results["ascent_w"] = run.final_w();
    report.results["ascent_relative_gap"] = gap;
    report.results["ascent_iterations"] = run.history.back().iteration;
    report.results["ascent_el_residual"] = run.history.back().el_residual;
    report.results["lambda"] = run.constants.lambda;
    report.results["k"] = run.constants.k;
    report.verdict("extremize.ascent_monotone", 0.0).record(run.monotone(), 0.0);
    if (c.space == Space::Euclidean) {
        report.verdict("extremize.oracle_closure", 5e-3).record(std::abs(gap) < 5e-3, gap);
    } else {
        report.verdict("extremize.one_sided_bound", 1e-3).record(gap <= 1e-3, gap);
    }
    if (run.status == AscentStatus::NonAscent) {
        report.failure = "ascent stopped: no ascent step found after backtracking";
    }
}

void transplant_check(const ExperimentConfig& c, Report& report) {
    const auto exps = Exponents::make_closed(c.n, c.p);
    const auto ctx = TransplantContext::make(make_grid(Space::Euclidean, c.n, c.grid_n, c.radius));
    const auto members = make_battery(ctx.euclidean_grid, c.seed);
    const std::vector<double> times{1e-2, 1.0, 1e2};

    struct Outcome {
        WeinsteinComparison cmp;
        FormGap gap;
        std::vector<FOfT> f;
    };
    const auto outcomes = parallel_map(members.size(), worker_count(), [&](std::size_t i) {
        Outcome o{weinstein_comparison(ctx, members[i].u, exps), quadratic_form_gap(ctx, members[i].u), {}};
        for (double t : times) {
            o.f.push_back(f_of_t_routes(ctx, members[i].u, t));
        }
        return o;
    });

    Table table{{"function", "l2_euclidean", "l2_hyperbolic", "lp_euclidean", "lp_hyperbolic",
                 "form_gap", "epsilon", "w_euclidean", "w_hyperbolic"},
                {}};
    Table f_table{{"function", "t", "direct", "conjugated", "discrepancy"}, {}};
    auto& iso = report.verdict("transplant.l2_isometry", 1e-12);
    auto& lp = report.verdict("transplant.lp_strict_decrease", 0.0);
    auto& form = report.verdict("transplant.form_gap_positive", 0.0);
    auto& w = report.verdict("transplant.w_strict_decrease", 0.0);
    auto& dual = report.verdict("transplant.f_of_t_dual_route", 1e-8);
    auto& positive = report.verdict("transplant.f_of_t_positive", 0.0);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& o = outcomes[i];
        const auto& m = o.cmp;
        table.add_row({members[i].name, m.l2_euclidean, m.l2_hyperbolic, m.lp_euclidean,
                       m.lp_hyperbolic, o.gap.gap, o.gap.epsilon, m.w_euclidean, m.w_hyperbolic});
        iso.record(m.l2_isometric(1e-12), m.l2_hyperbolic / m.l2_euclidean - 1.0);
        lp.record(m.lp_strictly_smaller(), m.lp_hyperbolic / m.lp_euclidean - 1.0);
        form.record(o.gap.gap > 0.0, o.gap.epsilon);
        w.record(m.w_strictly_smaller(), m.w_hyperbolic / m.w_euclidean - 1.0);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto& f = o.f[k];
            f_table.add_row({members[i].name, times[k], f.direct, f.conjugated, f.discrepancy()});
            dual.record(f.discrepancy() <= 1e-8, f.discrepancy());
            positive.record(f.direct > 0.0, f.direct);
        }
    }
    report.tables["transplant"] = std::move(table);
    report.tables["f_of_t"] = std::move(f_table);
}

void sup_compare(const ExperimentConfig& c, Report& report) {
    const auto exps = Exponents::make(c.n, c.p);
    const auto bc = best_constant(c.n, c.p);
    report.results["best_constant"] = bc.value;
    const auto ctx = TransplantContext::make(make_grid(Space::Euclidean, c.n, c.grid_n, c.radius));

    // Concentrating ground states: W_H(T Q_l) / W_R(Q_l) approaches 1 from below.
    Table small{{"scale", "w_euclidean", "w_hyperbolic", "ratio"}, {}};
    auto& below = report.verdict("transplant.small_ball_ratio_below_one", 0.0);
    auto& rising = report.verdict("transplant.small_ball_ratio_increasing", 0.0);
    double previous_ratio = 0.0;
    double lower_bound = 0.0;
    for (double scale : {1.0, 0.5, 0.25, 0.125}) {
        const auto u = bc.ground_state.sample(ctx.euclidean_grid, scale);
        const auto cmp = weinstein_comparison(ctx, u, exps);
        const double ratio = cmp.w_hyperbolic / cmp.w_euclidean;
        small.add_row({scale, cmp.w_euclidean, cmp.w_hyperbolic, ratio});
        below.record(ratio < 1.0, ratio - 1.0);
        rising.record(ratio > previous_ratio, ratio - previous_ratio);
        previous_ratio = ratio;
        lower_bound = std::max(lower_bound, cmp.w_hyperbolic);
    }
    report.tables["small_ball"] = std::move(small);
    report.results["hyperbolic_lower_bound"] = lower_bound;
    report.results["hyperbolic_lower_bound_relative_gap"] = lower_bound / bc.value - 1.0;

    const auto members = make_battery(ctx.euclidean_grid, c.seed);
    const auto values = parallel_map(members.size(), worker_count(), [&](std::size_t i) {
        return weinstein_comparison(ctx, members[i].u, exps);
    });
    Table battery{{"function", "w_euclidean", "w_hyperbolic"}, {}};
    auto& bounded = report.verdict("weinstein_core.gni_boundedness", 1.05);
    for (std::size_t i = 0; i < members.size(); ++i) {
        battery.add_row({members[i].name, values[i].w_euclidean, values[i].w_hyperbolic});
        for (double v : {values[i].w_euclidean, values[i].w_hyperbolic}) {
            bounded.record(v <= 1.05 * bc.value, v / bc.value);
        }
    }
    report.tables["battery"] = std::move(battery);
}

void fractional_check(const ExperimentConfig& c, Report& report) {
    const auto orders = fractional_orders(c);
    const auto ctx = TransplantContext::make(make_grid(Space::Euclidean, c.n, c.grid_n, c.radius));
    const auto& op = c.space == Space::Euclidean ? ctx.euclidean : ctx.hyperbolic;
    const auto members = battery_on(ctx, c.space, c.seed);
    const auto euclidean_members = make_battery(ctx.euclidean_grid, c.seed);
    const unsigned workers = worker_count();
    // Build the eigendecompositions before fanning out.
    (void)op.spectral();
    (void)ctx.euclidean.spectral();
    (void)ctx.conjugated.spectral();

    struct PowerRow {
        double a;
        double difference;
        double estimate;
    };
    const auto powers = parallel_map(members.size(), workers, [&](std::size_t i) {
        std::vector<PowerRow> rows;
        for (double a : orders) {
            const auto quad = fractional_apply_balakrishnan_detailed(op, a, members[i].u);
            const auto spectral = fractional_apply_spectral(op, a, members[i].u);
            rows.push_back({a, relative_difference(quad.value, spectral), quad.error_estimate});
        }
        return rows;
    });
    Table power_table{{"function", "a", "relative_difference", "error_estimate"}, {}};
    auto& agree = report.verdict("radial_operators.balakrishnan_agreement", 1e-6);
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (const auto& r : powers[i]) {
            power_table.add_row({members[i].name, r.a, r.difference, r.estimate});
            agree.record(r.difference <= 1e-6, r.difference);
        }
    }
    report.tables["powers"] = std::move(power_table);

    const std::vector<double> times{0.1, 1.0};
    Table sub_table{{"function", "t", "relative_difference", "min_value"}, {}};
    auto& sub = report.verdict("radial_operators.subordination_identity", 1e-6);
    auto& heat_positive = report.verdict("radial_operators.fractional_heat_positivity", 1e-10);
    for (const auto& m : members) {
        for (double t : times) {
            const auto direct = fractional_heat_apply(op, t, 0.5, m.u);
            const auto mixed = subordinated_heat_apply(op, t, 0.5, m.u);
            const double diff = relative_difference(mixed, direct);
            const double lowest = *std::min_element(direct.values().begin(), direct.values().end());
            sub_table.add_row({m.name, t, diff, lowest});
            sub.record(diff <= 1e-6, diff);
        }
        if (nonnegative(m.u)) {
            for (double a : orders) {
                for (double t : times) {
                    const auto v = fractional_heat_apply(op, t, a, m.u);
                    const double lowest = *std::min_element(v.values().begin(), v.values().end());
                    heat_positive.record(lowest >= -1e-10, lowest);
                }
            }
        }
    }
    report.tables["subordination"] = std::move(sub_table);

    struct GapRow {
        double a;
        FractionalGap gap;
    };
    const auto gaps = parallel_map(euclidean_members.size(), workers, [&](std::size_t i) {
        std::vector<GapRow> rows;
        for (double a : orders) {
            rows.push_back({a, fractional_form_gap_routes(ctx, euclidean_members[i].u, a)});
        }
        return rows;
    });
    Table gap_table{{"function", "a", "spectral", "quadrature", "discrepancy"}, {}};
    auto& gap_positive = report.verdict("transplant.fractional_gap_positive", 0.0);
    auto& gap_dual = report.verdict("transplant.fractional_gap_dual_route", 1e-5);
    for (std::size_t i = 0; i < euclidean_members.size(); ++i) {
        for (const auto& r : gaps[i]) {
            gap_table.add_row({euclidean_members[i].name, r.a, r.gap.spectral, r.gap.quadrature,
                               r.gap.relative_discrepancy()});
            gap_positive.record(r.gap.spectral > 0.0, r.gap.spectral);
            gap_dual.record(r.gap.relative_discrepancy() <= 1e-5, r.gap.relative_discrepancy());
        }
    }
    report.tables["fractional_gap"] = std::move(gap_table);

    Table w_table{{"function", "a", "w_fractional"}, {}};
    auto& homogeneous = report.verdict("weinstein_core.fractional_homogeneity", 1e-10);
    for (double a : orders) {
        std::optional<FractionalExponents> admissible;
        try {
            admissible = FractionalExponents::make(c.n, c.p, a);
        } catch (const Error&) {
            continue; // p outside the fractional range for this order
        }
        const auto& fexps = *admissible;
        for (const auto& m : members) {
            const double w = fractional_weinstein_value(op, m.u, fexps);
            w_table.add_row({m.name, a, w});
            for (double scale : {7.0, -0.3}) {
                const double ws = fractional_weinstein_value(op, scale * m.u, fexps);
                const double rel = ws / w - 1.0;
                homogeneous.record(std::abs(rel) <= 1e-10, rel);
            }
        }
    }
    report.tables["fractional_w"] = std::move(w_table);
}

void rearrange_check(const ExperimentConfig& c, Report& report) {
    const auto exps = Exponents::make(c.n, c.p);
    const auto ctx = TransplantContext::make(make_grid(Space::Euclidean, c.n, c.grid_n, c.radius));
    const auto& op = c.space == Space::Euclidean ? ctx.euclidean : ctx.hyperbolic;
    const auto members = battery_on(ctx, c.space, c.seed);
    (void)op.spectral();

    struct Outcome {
        double l2_change, lp_change, form_before, form_after, w_before, w_after;
        std::vector<double> heat_before, heat_after;
    };
    const std::vector<double> times{0.1, 1.0};
    const auto outcomes = parallel_map(members.size(), worker_count(), [&](std::size_t i) {
        const auto& f = members[i].u;
        const auto mod = absolute(f);
        const auto star = rearrange_decreasing(f);
        Outcome o{};
        o.l2_change = lp_norm(star, 2.0) / lp_norm(mod, 2.0) - 1.0;
        o.lp_change = lp_norm(star, exps.p + 1.0) / lp_norm(mod, exps.p + 1.0) - 1.0;
        o.form_before = quadratic_form(op, mod);
        o.form_after = quadratic_form(op, star);
        o.w_before = weinstein_value(op, f, exps);
        o.w_after = weinstein_value(op, star, exps);
        for (double t : times) {
            o.heat_before.push_back(inner(mod, heat_apply(op, t, mod)));
            o.heat_after.push_back(inner(star, heat_apply(op, t, star)));
        }
        return o;
    });

    Table table{{"function", "l2_change", "lp_change", "form_before", "form_after", "heat_0.1_before",
                 "heat_0.1_after", "heat_1_before", "heat_1_after", "w_before", "w_after"},
                {}};
    auto& norms = report.verdict("extremize.rearrangement_norm_preservation", 1e-3);
    auto& dirichlet = report.verdict("extremize.rearrangement_dirichlet_decrease", 1e-6);
    auto& heat = report.verdict("extremize.rearrangement_heat_form", 1e-12);
    auto& w = report.verdict("extremize.rearrangement_w_increase", 1e-12);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& o = outcomes[i];
        table.add_row({members[i].name, o.l2_change, o.lp_change, o.form_before, o.form_after,
                       o.heat_before[0], o.heat_after[0], o.heat_before[1], o.heat_after[1],
                       o.w_before, o.w_after});
        norms.record(std::abs(o.l2_change) <= 1e-3, o.l2_change);
        norms.record(std::abs(o.lp_change) <= 1e-3, o.lp_change);
        dirichlet.record(o.form_after <= o.form_before * (1.0 + 1e-6), o.form_after / o.form_before - 1.0);
        // Equality holds for already decreasing members; allow roundoff only.
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double rel = o.heat_after[k] / o.heat_before[k] - 1.0;
            heat.record(rel >= -1e-12, rel);
        }
        const double rel = o.w_after / o.w_before - 1.0;
        w.record(rel >= -1e-12, rel);
    }
    report.tables["rearrangement"] = std::move(table);
}

void potential_check(const ExperimentConfig& c, Report& report) {
    constexpr std::size_t kSamples = 10000;
    const auto profile = potential_profile(c.n, log_sample(1e-6, 50.0, kSamples));
    auto& range = report.verdict("transplant.potential_v_range", 0.0);
    auto& monotone = report.verdict("transplant.potential_v_monotone", 0.0);
    auto& h = report.verdict("transplant.aux_h_prime_above_one", 0.0);
    auto& shifted = report.verdict("transplant.conjugation_potential_positive", 0.0);
    Table table{{"r", "v", "h_prime_minus_one", "vn_plus_k2"}, {}};
    double v_min = 0.0, v_max = -1.0, h_min = 0.0, s_min = 0.0;
    for (std::size_t i = 0; i < profile.radii.size(); ++i) {
        const double v = profile.v[i];
        const double above_floor = profile.v_plus_third[i];
        const double hp = profile.h_prime_minus_one[i];
        const double s = profile.vn[i] + profile.k2;
        range.record(above_floor > 0.0 && v < 0.0, v);
        h.record(hp > 0.0, hp);
        shifted.record(s > 0.0, s);
        if (i > 0) {
            const double step = above_floor - profile.v_plus_third[i - 1];
            monotone.record(step > 0.0, step);
        }
        v_min = i == 0 ? v : std::min(v_min, v);
        v_max = i == 0 ? v : std::max(v_max, v);
        h_min = i == 0 ? hp : std::min(h_min, hp);
        s_min = i == 0 ? s : std::min(s_min, s);
        if (i % 100 == 0 || i + 1 == profile.radii.size()) {
            table.add_row({profile.radii[i], v, hp, s});
        }
    }
    report.results["samples"] = static_cast<double>(kSamples);
    report.results["k1"] = profile.k1;
    report.results["k2"] = profile.k2;
    report.results["v_min"] = v_min;
    report.results["v_max"] = v_max;
    report.results["h_prime_minus_one_min"] = h_min;
    report.results["vn_plus_k2_min"] = s_min;
    report.tables["profile"] = std::move(table);
}

void concentration(const ExperimentConfig& c, Report& report) {
    const auto bc = best_constant(c.n, c.p);
    report.results["best_constant"] = bc.value;
    ConcentrationOptions opts;
    opts.spacing = c.spacing;
    opts.ascent.max_iterations = c.max_iterations;
    const auto rows = concentration_run(c.n, c.p, c.schedule, opts);

    Table table{{"R", "W", "l2_at_gauge", "support_radius"}, {}};
    Table detail{{"R", "cells", "iterations", "status", "relative_gap", "transplanted_w"}, {}};
    auto& bound = report.verdict("extremize.one_sided_bound", 1e-3);
    auto& w_monotone = report.verdict("extremize.concentration_w_nondecreasing", 0.0);
    auto& l2_monotone = report.verdict("extremize.concentration_l2_nonincreasing", 0.0);
    auto& ordering = report.verdict("extremize.sup_ordering", 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        const double gap = r.w / bc.value - 1.0;
        table.add_row({r.radius, r.w, r.l2_at_gauge, r.support_radius});
        detail.add_row({r.radius, r.cells, r.iterations, to_string(r.status), gap, r.transplanted_w});
        bound.record(gap <= 1e-3, gap);
        ordering.record(r.w >= r.transplanted_w, r.w - r.transplanted_w);
        if (k > 0) {
            w_monotone.record(r.w >= rows[k - 1].w, r.w - rows[k - 1].w);
            l2_monotone.record(r.l2_at_gauge <= rows[k - 1].l2_at_gauge,
                               r.l2_at_gauge - rows[k - 1].l2_at_gauge);
        }
        if (r.status == AscentStatus::NonAscent) {
            report.failure = "ascent at R = " + std::to_string(r.radius) + " found no ascent step";
        }
    }
    report.results["final_relative_gap"] = rows.back().w / bc.value - 1.0;
    report.tables["concentration"] = std::move(table);
    report.tables["concentration_detail"] = std::move(detail);
}

} // namespace

unsigned worker_count() {
    if (const char* env = std::getenv("WEINSTEIN_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Report run_experiment(const ExperimentConfig& config) {
    config.validate();
    Report report;
    report.config = config_to_json(config);
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (config.experiment) {
        case Experiment::GnConstant: gn_constant(config, report); break;
        case Experiment::TransplantCheck: transplant_check(config, report); break;
        case Experiment::SupCompare: sup_compare(config, report); break;
        case Experiment::FractionalCheck: fractional_check(config, report); break;
        case Experiment::RearrangeCheck: rearrange_check(config, report); break;
        case Experiment::PotentialCheck: potential_check(config, report); break;
        case Experiment::Concentration: concentration(config, report); break;
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) {
            throw;
        }
        report.failure = e.what();
    }
    report.wall_clock =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace weinstein::lab
