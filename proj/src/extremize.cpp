#include "weinstein/extremize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "weinstein/error.hpp"
#include "weinstein/transplant.hpp"

namespace weinstein {

const char* to_string(AscentStatus status) noexcept {
    switch (status) {
    case AscentStatus::Converged: return "converged";
    case AscentStatus::Stalled: return "stalled";
    case AscentStatus::MaxIterations: return "max-iterations";
    case AscentStatus::NonAscent: return "non-ascent";
    }
    return "unknown";
}

bool MaximizerReport::monotone() const {
    for (std::size_t k = 1; k < history.size(); ++k) {
        if (history[k].w < history[k - 1].w) {
            return false;
        }
    }
    return true;
}

namespace {

// The ingredients shared by the local and the fractional functional:
// W = P / (M^{first/2} T^{second/2}) with T = <A f, f>, A = L or L^a.
struct Functional {
    const RadialOperator& op;
    double p;
    double first;
    double second;
    std::function<RadialFunction(const RadialFunction&)> kinetic_apply;
    std::function<RadialFunction(double, const RadialFunction&)> precondition;
};

struct Evaluation {
    double w;
    double mass;
    double lp;
    double kinetic;
    RadialFunction a_f;
};

Evaluation evaluate(const Functional& fn, const RadialFunction& f) {
    auto af = fn.kinetic_apply(f);
    const double mass = lp_power(f, 2.0);
    const double lp = lp_power(f, fn.p + 1.0);
    const double kinetic = inner(af, f);
    if (!(mass > 0.0)) {
        throw Error(ErrorCode::ZeroFunction, "ascent iterate vanished");
    }
    if (!(kinetic > 0.0)) {
        throw Error(ErrorCode::ZeroGradient, "ascent iterate has no kinetic energy");
    }
    const double w = lp / (std::pow(mass, 0.5 * fn.first) * std::pow(kinetic, 0.5 * fn.second));
    return {w, mass, lp, kinetic, std::move(af)};
}

EulerLagrangeConstants constants_of(const Functional& fn, const Evaluation& e) {
    return {fn.first / fn.second * e.kinetic / e.mass, (fn.p + 1.0) / fn.second * e.kinetic / e.lp};
}

// A f + lambda f - K |f|^{p-1} f
RadialFunction el_vector(const Functional& fn, const RadialFunction& f, const Evaluation& e) {
    const auto c = constants_of(fn, e);
    std::vector<double> r(f.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double v = f[i];
        r[i] = e.a_f[i] + c.lambda * v - c.k * std::pow(std::abs(v), fn.p - 1.0) * v;
    }
    return RadialFunction(f.grid(), std::move(r));
}

double gauge_factor(Gauge gauge, const Evaluation& e) {
    return gauge == Gauge::L2 ? 1.0 / std::sqrt(e.mass) : 1.0 / std::sqrt(e.kinetic);
}

MaximizerReport run_ascent(const Functional& fn, const RadialFunction& u0, const AscentOptions& opts) {
    require_same_grid(*fn.op.grid(), u0);
    MaximizerReport report{{}, u0, false, AscentStatus::MaxIterations, {}, Gauge::L2};
    report.gauge = opts.gauge.value_or(fn.op.grid()->space() == Space::Euclidean ? Gauge::L2
                                                                                  : Gauge::Kinetic);

    RadialFunction u = u0;
    auto e = evaluate(fn, u);
    u *= gauge_factor(report.gauge, e);
    e = evaluate(fn, u);

    auto record = [&](int it, const Evaluation& ev, double el) {
        report.history.push_back({it, ev.w, std::sqrt(ev.mass), std::sqrt(ev.kinetic), el});
    };
    auto residual_of = [&](const RadialFunction& f, const Evaluation& ev) {
        return std::sqrt(lp_power(el_vector(fn, f, ev), 2.0) / ev.mass);
    };

    double step = opts.initial_step;
    double el = residual_of(u, e);
    record(0, e, el);

    for (int it = 1; it <= opts.max_iterations; ++it) {
        if (el < opts.el_tol) {
            report.status = AscentStatus::Converged;
            break;
        }
        // Ascent direction: -(T / (second W)) * gradient = K|u|^{p-1}u - lambda u - A u,
        // optionally mapped through (lambda + A)^{-1}.
        const auto c = constants_of(fn, e);
        auto residual = el_vector(fn, u, e);
        residual *= -1.0;
        const auto direction = opts.preconditioned ? fn.precondition(c.lambda, residual) : residual;
        // Directional derivative of W along `direction`: (second W / T) <-r, d>.
        const double slope = fn.second * e.w / e.kinetic * inner(residual, direction);
        if (!(slope > 0.0)) {
            report.status = AscentStatus::Stalled;
            break;
        }

        bool accepted = false;
        RadialFunction trial(u.grid());
        std::optional<Evaluation> et;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
            trial = u;
            for (std::size_t i = 0; i < trial.size(); ++i) {
                trial[i] += step * direction[i];
            }
            const double trial_mass = lp_power(trial, 2.0);
            if (trial_mass > 0.0) {
                et = evaluate(fn, trial);
                if (std::isfinite(et->w) && et->w >= e.w + opts.armijo * step * slope) {
                    accepted = true;
                    break;
                }
            }
            step *= opts.backtrack;
        }
        if (!accepted) {
            report.status = AscentStatus::NonAscent;
            break;
        }
        trial *= gauge_factor(report.gauge, *et);
        const double previous = e.w;
        u = std::move(trial);
        e = evaluate(fn, u);
        el = residual_of(u, e);
        record(it, e, el);
        step = std::min(step * opts.step_growth, opts.max_step);

        if (std::abs(e.w - previous) <= opts.w_tol * e.w && el >= opts.el_tol) {
            report.status = AscentStatus::Stalled;
            break;
        }
    }
    if (el < opts.el_tol) {
        report.status = AscentStatus::Converged;
    }
    report.converged = report.status == AscentStatus::Converged;
    report.constants = constants_of(fn, e);
    report.final_function = std::move(u);
    return report;
}

} // namespace

MaximizerReport ascend(const RadialOperator& op, const Exponents& exps, const RadialFunction& u0,
                       const AscentOptions& opts) {
    const Functional fn{
        op, exps.p, exps.alpha, exps.beta,
        [&op](const RadialFunction& f) { return op.apply(f); },
        [&op](double lambda, const RadialFunction& g) { return apply_resolvent(op, lambda, g); }};
    return run_ascent(fn, u0, opts);
}

MaximizerReport ascend(const RadialOperator& op, const FractionalExponents& fexps,
                       const RadialFunction& u0, const AscentOptions& opts) {
    const double a = fexps.a;
    const Functional fn{
        op, fexps.p, fexps.gamma, fexps.rho,
        [&op, a](const RadialFunction& f) { return fractional_apply_spectral(op, a, f); },
        [&op, a](double lambda, const RadialFunction& g) {
            return apply_spectral_function(
                op, [lambda, a](double x) { return 1.0 / (lambda + std::pow(std::max(x, 0.0), a)); },
                g);
        }};
    return run_ascent(fn, u0, opts);
}

RadialFunction rearrange_decreasing(const RadialFunction& f) {
    const auto w = f.grid()->weights();
    const std::size_t n = f.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&f](std::size_t i, std::size_t j) {
        return std::abs(f[i]) > std::abs(f[j]);
    });

    // Sweep target cells [C_j, C_j + w_j) against sorted source segments.
    std::vector<double> out(n, 0.0);
    std::size_t src = 0;
    double src_left = n > 0 ? w[order[0]] : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double need = w[j];
        double acc = 0.0;
        while (need > 0.0 && src < n) {
            const double take = std::min(need, src_left);
            const double v = std::abs(f[order[src]]);
            acc += take * v * v;
            need -= take;
            src_left -= take;
            if (src_left <= 0.0) {
                ++src;
                src_left = src < n ? w[order[src]] : 0.0;
            }
        }
        out[j] = std::sqrt(acc / w[j]);
    }
    // Rounding in the sweep can break ties the wrong way by an ulp.
    for (std::size_t j = 1; j < n; ++j) {
        out[j] = std::min(out[j], out[j - 1]);
    }
    return RadialFunction(f.grid(), std::move(out));
}

double support_radius(const RadialFunction& f, double fraction) {
    const auto w = f.grid()->weights();
    const auto r = f.grid()->nodes();
    const double total = lp_power(f, 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        acc += w[i] * f[i] * f[i];
        if (acc >= fraction * total) {
            return r[i];
        }
    }
    return r.back();
}

std::vector<ConcentrationRow> concentration_run(int n, double p, const std::vector<double>& radii,
                                                const ConcentrationOptions& opts) {
    const auto exps = Exponents::make(n, p);
    if (radii.empty()) {
        return {};
    }
    for (std::size_t k = 1; k < radii.size(); ++k) {
        if (!(radii[k] > radii[k - 1])) {
            throw Error(ErrorCode::InvalidArgument, "radius schedule must be increasing");
        }
    }
    const auto ground = shoot_ground_state(n, p);
    std::vector<ConcentrationRow> rows;
    std::optional<RadialFunction> previous;
    for (double radius : radii) {
        const auto cells = static_cast<std::size_t>(std::llround(radius / opts.spacing));
        const auto euclid = make_grid(Space::Euclidean, n, cells, radius);
        const auto ctx = TransplantContext::make(euclid);

        RadialFunction start(ctx.hyperbolic_grid);
        if (previous && opts.warm_start) {
            auto values = std::vector<double>(cells, 0.0);
            std::copy(previous->values().begin(), previous->values().end(), values.begin());
            start = RadialFunction(ctx.hyperbolic_grid, std::move(values));
        } else {
            const double width = opts.initial_width;
            start = RadialFunction::sample(ctx.hyperbolic_grid, [width](double r) {
                return std::exp(-0.5 * r * r / (width * width));
            });
        }
        const auto report = ascend(ctx.hyperbolic, exps, start, opts.ascent);
        const auto& u = report.final_function;
        const double kinetic = quadratic_form(ctx.hyperbolic, u);
        const double l2_at_gauge = lp_norm(u, 2.0) / std::sqrt(kinetic);

        const auto q = ground.sample(euclid);
        const double transplanted =
            weinstein_value(ctx.hyperbolic, transplant_to_hyperbolic(q, ctx.hyperbolic_grid), exps);

        rows.push_back({radius, cells, report.final_w(), l2_at_gauge, support_radius(u),
                        transplanted, report.history.back().iteration, report.status});
        previous = u;
    }
    return rows;
}

} // namespace weinstein
