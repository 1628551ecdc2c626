#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weinstein/lab/config.hpp"

namespace weinstein::lab {

inline constexpr const char* kReportVersion = "1.0";

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows; // numbers or strings

    void add_row(std::vector<nlohmann::ordered_json> row);
};

/// Outcome of one named invariant over every case it was checked on.
struct Verdict {
    bool pass = true;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double tolerance = 0.0;
    double min = 0.0; // range of the checked quantity
    double max = 0.0;

    void record(bool ok, double value);
};

struct Report {
    nlohmann::ordered_json config;
    std::map<std::string, double> results;
    std::map<std::string, Table> tables;
    std::map<std::string, Verdict> verdicts; // keyed "<module>.<invariant>"
    double wall_clock = 0.0;                 // seconds
    std::optional<std::string> failure;      // solver non-convergence, report is partial

    Verdict& verdict(const std::string& invariant, double tolerance);
    bool all_pass() const;
};

nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// The full document. `timestamp` is stored under meta and is the only
/// field besides wall_clock that varies between identical runs.
nlohmann::ordered_json to_json(const Report& report, const std::string& timestamp);
std::string current_timestamp();

/// Writes the report. JSON goes to `path` or `out` when no path is given.
/// CSV writes one file per table: `path` itself when there is a single table,
/// otherwise `<stem>.<table><ext>` next to it. Throws Error(Io).
void emit_report(const Report& report, Format format,
                 const std::optional<std::filesystem::path>& path, std::ostream& out);

void write_csv(const Table& table, std::ostream& out);

} // namespace weinstein::lab
