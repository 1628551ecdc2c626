#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weinstein/radial_grid.hpp"
#include "weinstein/lab/battery.hpp"

namespace weinstein::lab {

enum class Experiment {
    GnConstant,
    TransplantCheck,
    SupCompare,
    FractionalCheck,
    RearrangeCheck,
    PotentialCheck,
    Concentration,
};

const char* to_string(Experiment experiment) noexcept;
std::optional<Experiment> parse_experiment(std::string_view name);

enum class Format { Json, Csv };
const char* to_string(Format format) noexcept;

struct ExperimentConfig {
    Experiment experiment = Experiment::GnConstant;
    int n = 2;
    double p = 3.0;
    std::optional<double> a;
    std::size_t grid_n = 2000;
    double radius = 12.0;
    Space space = Space::Euclidean;
    Format format = Format::Json;
    std::optional<std::filesystem::path> out;
    std::uint64_t seed = kDefaultSeed;

    // solver options
    int max_iterations = 5000;
    double spacing = 0.005;                       // concentration runs
    std::vector<double> schedule{4.0, 8.0, 12.0, 15.0};

    /// Throws Error(InvalidConfig) when the parameters are not admissible.
    void validate() const;
};

/// Flat key = value settings; keys match the long flag names without dashes
/// ("grid-n", "radius", ...).
using Settings = std::map<std::string, std::string>;

/// Parses a config file: one `key = value` per line, `#` starts a comment.
Settings read_settings(const std::filesystem::path& path);
Settings parse_settings(std::string_view text);

/// Applies settings over the defaults, then validates. Unknown keys are rejected.
ExperimentConfig make_config(const Settings& settings);

std::uint64_t parse_seed(std::string_view text);

} // namespace weinstein::lab
