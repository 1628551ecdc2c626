#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weinstein/radial_grid.hpp"

namespace weinstein::lab {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct BatteryMember {
    std::string name;
    RadialFunction u;
};

/// Twelve test functions on a Euclidean grid: Gaussians of widths 0.5, 1, 2;
/// two ground states; compact bumps of radii 0.1, 1, 2.5; four random smooth
/// profiles drawn from `seed`. The random members may change sign.
std::vector<BatteryMember> make_battery(const GridPtr& euclidean_grid,
                                        std::uint64_t seed = kDefaultSeed);

/// Exponents of the two ground-state members for dimension n.
std::vector<double> battery_ground_state_exponents(int n);

} // namespace weinstein::lab
