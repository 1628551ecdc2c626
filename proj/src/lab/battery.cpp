#include "weinstein/lab/battery.hpp"

#include <cmath>
#include <random>

#include "weinstein/error.hpp"
#include "weinstein/extremize.hpp"
#include "weinstein/weinstein.hpp"

namespace weinstein::lab {

namespace {

// Uniform in [lo, hi) from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

double bump(double r, double radius) {
    const double x = r / radius;
    return x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
}

std::string format_number(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
    }
    return s;
}

} // namespace

std::vector<double> battery_ground_state_exponents(int n) {
    const double crit = Exponents::critical_p(n);
    std::vector<double> out;
    for (double p : {2.0, 2.5}) {
        out.push_back(p < crit ? p : 1.0 + (p - 1.0) / 3.0 * (crit - 1.0));
    }
    return out;
}

std::vector<BatteryMember> make_battery(const GridPtr& grid, std::uint64_t seed) {
    if (grid->space() != Space::Euclidean) {
        throw Error(ErrorCode::InvalidArgument, "the battery lives on a Euclidean grid");
    }
    std::vector<BatteryMember> out;
    for (double width : {0.5, 1.0, 2.0}) {
        out.push_back({"gaussian-" + format_number(width),
                       RadialFunction::sample(grid, [width](double r) {
                           return std::exp(-0.5 * r * r / (width * width));
                       })});
    }
    for (double p : battery_ground_state_exponents(grid->dimension())) {
        const auto q = shoot_ground_state(grid->dimension(), p);
        out.push_back({"ground-state-p" + format_number(p), q.sample(grid)});
    }
    for (double radius : {0.1, 1.0, 2.5}) {
        out.push_back({"bump-" + format_number(radius),
                       RadialFunction::sample(grid, [radius](double r) { return bump(r, radius); })});
    }

    // Even-in-r sums of Gaussian bumps, so each profile is smooth through the origin.
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 4; ++k) {
        struct Term {
            double amplitude, center, width;
        };
        std::vector<Term> terms;
        for (int j = 0; j < 3; ++j) {
            const double amplitude = uniform(rng, -1.0, 1.0);
            const double center = uniform(rng, 0.0, 3.0);
            const double width = uniform(rng, 0.3, 1.2);
            terms.push_back({amplitude, center, width});
        }
        // keep the first bump dominant so the profile is never negligible
        terms.front().amplitude = 1.0 + std::abs(terms.front().amplitude);
        out.push_back({"random-" + std::to_string(k),
                       RadialFunction::sample(grid, [terms](double r) {
                           double v = 0.0;
                           for (const auto& t : terms) {
                               const double s = 2.0 * t.width * t.width;
                               v += t.amplitude * (std::exp(-(r - t.center) * (r - t.center) / s) +
                                                   std::exp(-(r + t.center) * (r + t.center) / s));
                           }
                           return v;
                       })});
    }
    return out;
}

} // namespace weinstein::lab
