#include "weinstein/lab/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "weinstein/error.hpp"

namespace weinstein::lab {

namespace {

void require_finite(const nlohmann::ordered_json& v, const std::string& where) {
    if (v.is_number_float() && !std::isfinite(v.get<double>())) {
        throw Error(ErrorCode::NumericFailure, "non-finite value in " + where);
    }
}

std::string csv_cell(const nlohmann::ordered_json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string quoted = "\"";
        for (char c : s) {
            quoted += c;
            if (c == '"') {
                quoted += '"';
            }
        }
        return quoted + "\"";
    }
    return v.dump();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
    }
}

} // namespace

void Table::add_row(std::vector<nlohmann::ordered_json> row) {
    if (row.size() != columns.size()) {
        throw Error(ErrorCode::InvalidArgument, "table row has the wrong width");
    }
    rows.push_back(std::move(row));
}

void Verdict::record(bool ok, double value) {
    ++checked;
    if (!ok) {
        ++violations;
        pass = false;
    }
    min = checked == 1 ? value : std::min(min, value);
    max = checked == 1 ? value : std::max(max, value);
}

Verdict& Report::verdict(const std::string& invariant, double tolerance) {
    auto& v = verdicts[invariant];
    v.tolerance = tolerance;
    return v;
}

bool Report::all_pass() const {
    for (const auto& [name, v] : verdicts) {
        if (!v.pass) {
            return false;
        }
    }
    return true;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = to_string(c.experiment);
    j["n"] = c.n;
    j["p"] = c.p;
    j["a"] = c.a ? nlohmann::ordered_json(*c.a) : nlohmann::ordered_json(nullptr);
    j["grid_n"] = c.grid_n;
    j["radius"] = c.radius;
    j["space"] = to_string(c.space);
    j["format"] = to_string(c.format);
    std::ostringstream seed;
    seed << "0x" << std::uppercase << std::hex << c.seed;
    j["seed"] = seed.str();
    j["max_iterations"] = c.max_iterations;
    if (c.experiment == Experiment::Concentration) {
        j["spacing"] = c.spacing;
        j["schedule"] = c.schedule;
    }
    return j;
}

nlohmann::ordered_json to_json(const Report& report, const std::string& timestamp) {
    nlohmann::ordered_json doc;
    doc["config"] = report.config;

    auto results = nlohmann::ordered_json::object();
    for (const auto& [name, value] : report.results) {
        require_finite(value, "results." + name);
        results[name] = value;
    }
    doc["results"] = std::move(results);

    auto tables = nlohmann::ordered_json::object();
    for (const auto& [name, table] : report.tables) {
        nlohmann::ordered_json t;
        t["columns"] = table.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            auto r = nlohmann::ordered_json::array();
            for (const auto& cell : row) {
                require_finite(cell, "tables." + name);
                r.push_back(cell);
            }
            rows.push_back(std::move(r));
        }
        t["rows"] = std::move(rows);
        tables[name] = std::move(t);
    }
    doc["tables"] = std::move(tables);

    auto verdicts = nlohmann::ordered_json::object();
    auto tolerances = nlohmann::ordered_json::object();
    for (const auto& [name, v] : report.verdicts) {
        require_finite(v.min, "verdicts." + name);
        require_finite(v.max, "verdicts." + name);
        verdicts[name] = {{"pass", v.pass},
                          {"checked", v.checked},
                          {"violations", v.violations},
                          {"min", v.min},
                          {"max", v.max}};
        tolerances[name] = v.tolerance;
    }
    doc["verdicts"] = std::move(verdicts);

    nlohmann::ordered_json meta;
    meta["version"] = kReportVersion;
    meta["timestamp"] = timestamp;
    meta["tolerances"] = std::move(tolerances);
    meta["wall_clock"] = report.wall_clock;
    meta["status"] = report.failure ? "non-convergence" : "ok";
    if (report.failure) {
        meta["failure"] = *report.failure;
    }
    doc["meta"] = std::move(meta);
    return doc;
}

std::string current_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream out;
    out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        out << (k ? "," : "") << csv_cell(table.columns[k]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            out << (k ? "," : "") << csv_cell(row[k]);
        }
        out << '\n';
    }
}

void emit_report(const Report& report, Format format,
                 const std::optional<std::filesystem::path>& path, std::ostream& out) {
    if (format == Format::Json) {
        const auto text = to_json(report, current_timestamp()).dump(2) + "\n";
        if (!path) {
            out << text;
            return;
        }
        auto file = open_output(*path);
        file << text;
        finish(file, *path);
        return;
    }

    for (const auto& [name, table] : report.tables) {
        for (const auto& row : table.rows) {
            for (const auto& cell : row) {
                require_finite(cell, "tables." + name);
            }
        }
    }
    if (!path) {
        bool first = true;
        for (const auto& [name, table] : report.tables) {
            out << (first ? "" : "\n") << "# " << name << '\n';
            write_csv(table, out);
            first = false;
        }
        return;
    }
    for (const auto& [name, table] : report.tables) {
        auto target = *path;
        if (report.tables.size() > 1) {
            target.replace_filename(path->stem().string() + "." + name + path->extension().string());
        }
        auto file = open_output(target);
        write_csv(table, file);
        finish(file, target);
    }
}

} // namespace weinstein::lab
