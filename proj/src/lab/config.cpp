#include "weinstein/lab/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "weinstein/error.hpp"
#include "weinstein/weinstein.hpp"

namespace weinstein::lab {

namespace {

constexpr std::array<std::pair<Experiment, const char*>, 7> kExperiments{{
    {Experiment::GnConstant, "gn-constant"},
    {Experiment::TransplantCheck, "transplant-check"},
    {Experiment::SupCompare, "sup-compare"},
    {Experiment::FractionalCheck, "fractional-check"},
    {Experiment::RearrangeCheck, "rearrange-check"},
    {Experiment::PotentialCheck, "potential-check"},
    {Experiment::Concentration, "concentration"},
}};

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_real(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        invalid("'" + key + "' expects a real number, got '" + std::string(text) + "'");
    }
    return v;
}

long long parse_integer(const std::string& key, std::string_view text) {
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        invalid("'" + key + "' expects an integer, got '" + std::string(text) + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_real(key, trim(text.substr(0, comma))));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace

const char* to_string(Experiment experiment) noexcept {
    for (const auto& [e, name] : kExperiments) {
        if (e == experiment) {
            return name;
        }
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (const auto& [e, text] : kExperiments) {
        if (name == text) {
            return e;
        }
    }
    return std::nullopt;
}

const char* to_string(Format format) noexcept {
    return format == Format::Json ? "json" : "csv";
}

std::uint64_t parse_seed(std::string_view text) {
    text = trim(text);
    if (text.starts_with("0x") || text.starts_with("0X")) {
        text.remove_prefix(2);
    }
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v, 16);
    if (text.empty() || ec != std::errc() || ptr != end) {
        invalid("seed must be hexadecimal, got '" + std::string(text) + "'");
    }
    return v;
}

Settings parse_settings(std::string_view text) {
    Settings out;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            invalid("config line " + std::to_string(number) + " is not 'key = value'");
        }
        const auto key = trim(view.substr(0, eq));
        const auto value = trim(view.substr(eq + 1));
        if (key.empty()) {
            invalid("config line " + std::to_string(number) + " has an empty key");
        }
        out[std::string(key)] = std::string(value);
    }
    return out;
}

Settings read_settings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        invalid("cannot read config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_settings(buffer.str());
}

ExperimentConfig make_config(const Settings& settings) {
    ExperimentConfig c;
    for (const auto& [key, value] : settings) {
        if (key == "experiment") {
            const auto e = parse_experiment(value);
            if (!e) {
                invalid("unknown experiment '" + value + "'");
            }
            c.experiment = *e;
        } else if (key == "n") {
            c.n = static_cast<int>(parse_integer(key, value));
        } else if (key == "p") {
            c.p = parse_real(key, value);
        } else if (key == "a") {
            c.a = parse_real(key, value);
        } else if (key == "grid-n") {
            const auto v = parse_integer(key, value);
            if (v < 0) {
                invalid("grid-n must be positive");
            }
            c.grid_n = static_cast<std::size_t>(v);
        } else if (key == "radius") {
            c.radius = parse_real(key, value);
        } else if (key == "space") {
            if (value == "euclidean") {
                c.space = Space::Euclidean;
            } else if (value == "hyperbolic") {
                c.space = Space::Hyperbolic;
            } else {
                invalid("space must be euclidean or hyperbolic");
            }
        } else if (key == "format") {
            if (value == "json") {
                c.format = Format::Json;
            } else if (value == "csv") {
                c.format = Format::Csv;
            } else {
                invalid("format must be json or csv");
            }
        } else if (key == "out") {
            c.out = value;
        } else if (key == "seed") {
            c.seed = parse_seed(value);
        } else if (key == "max-iterations") {
            c.max_iterations = static_cast<int>(parse_integer(key, value));
        } else if (key == "spacing") {
            c.spacing = parse_real(key, value);
        } else if (key == "schedule") {
            c.schedule = parse_list(key, value);
        } else {
            invalid("unknown setting '" + key + "'");
        }
    }
    // A bare radius on a concentration run ends the default schedule there.
    if (c.experiment == Experiment::Concentration && settings.contains("radius") &&
        !settings.contains("schedule")) {
        std::erase_if(c.schedule, [&c](double r) { return r >= c.radius; });
        c.schedule.push_back(c.radius);
    }
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    try {
        if (n < 2) {
            invalid("n must be at least 2");
        }
        if (grid_n < 8) {
            invalid("grid-n must be at least 8");
        }
        if (!(radius > 0.0)) {
            invalid("radius must be positive");
        }
        if (max_iterations < 1) {
            invalid("max-iterations must be positive");
        }
        if (experiment != Experiment::PotentialCheck) {
            if (experiment == Experiment::TransplantCheck) {
                (void)Exponents::make_closed(n, p);
            } else {
                (void)Exponents::make(n, p);
            }
        }
        if (a) {
            if (!(*a > 0.0 && *a < 1.0)) {
                invalid("a must lie in (0, 1)");
            }
            (void)FractionalExponents::make(n, p, *a);
        }
        if (experiment == Experiment::Concentration) {
            if (!(spacing > 0.0)) {
                invalid("spacing must be positive");
            }
            if (schedule.empty()) {
                invalid("schedule must not be empty");
            }
            for (std::size_t k = 0; k < schedule.size(); ++k) {
                if (!(schedule[k] > 0.0) || (k > 0 && !(schedule[k] > schedule[k - 1]))) {
                    invalid("schedule must be positive and increasing");
                }
                if (schedule[k] / spacing < 8.0) {
                    invalid("schedule radius too small for the spacing");
                }
            }
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) {
            throw;
        }
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
}

} // namespace weinstein::lab
