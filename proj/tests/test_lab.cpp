#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "weinstein/error.hpp"
#include "weinstein/lab/battery.hpp"
#include "weinstein/lab/config.hpp"
#include "weinstein/lab/experiment.hpp"
#include "weinstein/lab/parallel.hpp"
#include "weinstein/lab/report.hpp"

using namespace weinstein;
using namespace weinstein::lab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / ("weinstein-lab-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
    const std::string command = std::string(WEINSTEIN_LAB_BINARY) + " " + args + " > " +
                                stdout_path.string() + " 2> /dev/null";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json without_clock(json doc) {
    doc["meta"].erase("timestamp");
    doc["meta"].erase("wall_clock");
    return doc;
}

bool has_key(const json& j, const std::string& key) { return j.contains(key); }

} // namespace

TEST_CASE("settings parsing") {
    const auto s = parse_settings("# comment\nexperiment = gn-constant\n  n=3 # trailing\n\np = 2.5\n");
    CHECK(s.size() == 3);
    CHECK(s.at("experiment") == "gn-constant");
    CHECK(s.at("n") == "3");
    CHECK(s.at("p") == "2.5");
    CHECK_THROWS_AS(parse_settings("no equals sign"), Error);
    CHECK_THROWS_AS(parse_settings(" = 3"), Error);
}

TEST_CASE("config from settings") {
    const auto c = make_config({{"experiment", "transplant-check"}, {"n", "3"}, {"p", "2"},
                                {"grid-n", "500"}, {"radius", "8"}, {"space", "hyperbolic"},
                                {"format", "csv"}, {"seed", "0xBEEF"}, {"out", "x.csv"}});
    CHECK(c.experiment == Experiment::TransplantCheck);
    CHECK(c.n == 3);
    CHECK(c.p == 2.0);
    CHECK(c.grid_n == 500);
    CHECK(c.radius == 8.0);
    CHECK(c.space == Space::Hyperbolic);
    CHECK(c.format == Format::Csv);
    CHECK(c.seed == 0xBEEF);
    CHECK(c.out == fs::path("x.csv"));

    const auto d = make_config({{"experiment", "gn-constant"}});
    CHECK(d.n == 2);
    CHECK(d.p == 3.0);
    CHECK(d.seed == kDefaultSeed);
    CHECK_FALSE(d.a.has_value());

    const auto conc = make_config({{"experiment", "concentration"}, {"radius", "10"}});
    CHECK(conc.schedule == std::vector<double>{4.0, 8.0, 10.0});
    const auto sched = make_config({{"experiment", "concentration"}, {"schedule", "4, 6"}});
    CHECK(sched.schedule == std::vector<double>{4.0, 6.0});
}

TEST_CASE("invalid configs") {
    auto code_of = [](const Settings& s) {
        try {
            (void)make_config(s);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code_of({{"experiment", "bogus"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"n", "3"}, {"p", "5"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"n", "1"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"p", "three"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"a", "1.5"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"format", "xml"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"space", "spherical"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"colour", "blue"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"radius", "-1"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "gn-constant"}, {"grid-n", "4"}}) == ErrorCode::InvalidConfig);
    CHECK(code_of({{"experiment", "concentration"}, {"schedule", "8,4"}}) == ErrorCode::InvalidConfig);
    // the Sobolev endpoint is only admitted for the transplant battery
    CHECK(code_of({{"experiment", "gn-constant"}, {"n", "4"}, {"p", "3"}}) == ErrorCode::InvalidConfig);
    CHECK_NOTHROW(make_config({{"experiment", "transplant-check"}, {"n", "4"}, {"p", "3"}}));
}

TEST_CASE("seed parsing") {
    CHECK(parse_seed("5EED") == 0x5EED);
    CHECK(parse_seed("0x5eed") == 0x5EED);
    CHECK(parse_seed(" 0XFF ") == 255);
    CHECK_THROWS_AS(parse_seed("0x"), Error);
    CHECK_THROWS_AS(parse_seed("xyz"), Error);
}

TEST_CASE("battery") {
    const auto g = make_grid(Space::Euclidean, 3, 400, 10.0);
    const auto a = make_battery(g);
    const auto b = make_battery(g);
    REQUIRE(a.size() == 12);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].name == b[k].name);
        CHECK(lp_norm(a[k].u, 2.0) > 0.0);
        for (std::size_t i = 0; i < g->size(); ++i) {
            REQUIRE(a[k].u[i] == b[k].u[i]);
        }
    }
    const auto c = make_battery(g, 0x1234);
    CHECK(c[11].u[0] != a[11].u[0]);
    CHECK(c[0].u[0] == a[0].u[0]);
    CHECK_THROWS_AS(make_battery(make_grid(Space::Hyperbolic, 3, 400, 10.0)), Error);
    CHECK(battery_ground_state_exponents(2) == std::vector<double>{2.0, 2.5});
}

TEST_CASE("parallel map keeps order and propagates errors") {
    const auto squares = parallel_map(100, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < squares.size(); ++i) {
        CHECK(squares[i] == i * i);
    }
    CHECK(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
    CHECK_THROWS_AS(parallel_map(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) {
                                         throw Error(ErrorCode::NumericFailure, "seven");
                                     }
                                     return i;
                                 }),
                    Error);
}

TEST_CASE("json report layout") {
    Report empty;
    empty.config = config_to_json(make_config({{"experiment", "potential-check"}}));
    const auto doc = to_json(empty, "2000-01-01T00:00:00Z");
    for (const char* key : {"config", "results", "tables", "verdicts", "meta"}) {
        CHECK(has_key(doc, key));
    }
    CHECK(doc["tables"].is_object());
    CHECK(doc["tables"].empty());
    CHECK(doc["meta"]["version"] == kReportVersion);
    CHECK(doc["meta"]["timestamp"] == "2000-01-01T00:00:00Z");
    CHECK(doc["config"]["seed"] == "0x5EED");
    CHECK(doc.dump().find("\"tables\":{}") != std::string::npos);

    Report bad;
    bad.results["x"] = std::nan("");
    CHECK_THROWS_AS(to_json(bad, "t"), Error);
    Table t{{"a", "b"}, {}};
    CHECK_THROWS_AS(t.add_row({1.0}), Error);
}

TEST_CASE("numbers round-trip exactly") {
    Report r;
    const std::vector<double> values{0.1, 1.0 / 3.0, std::nextafter(1.0, 2.0), 6.02214076e23,
                                     -2.2250738585072014e-308, 0.15915494309189535};
    Table t{{"v"}, {}};
    for (std::size_t k = 0; k < values.size(); ++k) {
        r.results["v" + std::to_string(k)] = values[k];
        t.add_row({values[k]});
    }
    r.tables["values"] = t;
    std::ostringstream out;
    emit_report(r, Format::Json, std::nullopt, out);
    const auto doc = json::parse(out.str());
    for (std::size_t k = 0; k < values.size(); ++k) {
        CHECK(doc["results"]["v" + std::to_string(k)].get<double>() == values[k]);
        CHECK(doc["tables"]["values"]["rows"][k][0].get<double>() == values[k]);
    }
}

TEST_CASE("csv output") {
    Table t{{"name", "value"}, {}};
    t.add_row({"plain", 1.5});
    t.add_row({"with \"quote\", comma", 2.0});
    std::ostringstream out;
    write_csv(t, out);
    CHECK(out.str() == "name,value\nplain,1.5\n\"with \"\"quote\"\", comma\",2.0\n");
}

TEST_CASE("experiments are deterministic") {
    auto config = make_config({{"experiment", "transplant-check"}, {"n", "2"}, {"p", "2"},
                               {"grid-n", "300"}, {"radius", "8"}});
    const auto a = to_json(run_experiment(config), "a");
    const auto b = to_json(run_experiment(config), "b");
    CHECK(without_clock(a).dump() == without_clock(b).dump());
    CHECK(a["meta"]["status"] == "ok");
    for (const auto& [name, verdict] : a["verdicts"].items()) {
        CAPTURE(name);
        CHECK(name.find('.') != std::string::npos);
        CHECK(verdict["pass"].get<bool>());
    }
}

TEST_CASE("gn-constant report") {
    const auto report = run_experiment(make_config({{"experiment", "gn-constant"}}));
    CHECK_FALSE(report.failure.has_value());
    CHECK(report.all_pass());
    CHECK(report.results.contains("best_constant"));
    CHECK(report.results.contains("mass_threshold"));
    CHECK(report.results.contains("pohozaev_residual"));
    CHECK(report.results.at("pohozaev_residual") < 1e-4);
    CHECK(report.tables.contains("ascent"));
}

TEST_CASE("potential-check report") {
    const auto report = run_experiment(make_config({{"experiment", "potential-check"}, {"n", "4"}}));
    CHECK(report.all_pass());
    CHECK(report.results.at("samples") == 10000.0);
    CHECK(report.verdicts.at("transplant.aux_h_prime_above_one").checked == 10000);
}

TEST_CASE("command line") {
    const auto dir = scratch_dir();
    const auto stdout_path = dir / "stdout.txt";

    CHECK(run_cli("potential-check --n 3", stdout_path) == 0);
    const auto doc = json::parse(slurp(stdout_path));
    CHECK(doc["config"]["n"] == 3);
    CHECK(doc["meta"]["status"] == "ok");

    // file settings, overridden by flags
    const auto cfg = dir / "run.cfg";
    std::ofstream(cfg) << "experiment = potential-check\nn = 5\nformat = json\n";
    CHECK(run_cli("--config " + cfg.string() + " --n 6", stdout_path) == 0);
    CHECK(json::parse(slurp(stdout_path))["config"]["n"] == 6);
    CHECK(run_cli("--config " + cfg.string(), stdout_path) == 0);
    CHECK(json::parse(slurp(stdout_path))["config"]["n"] == 5);

    const auto out = dir / "report.json";
    CHECK(run_cli("potential-check --out " + out.string(), stdout_path) == 0);
    CHECK(json::parse(slurp(out))["config"]["experiment"] == "potential-check");

    CHECK(run_cli("bogus", stdout_path) == 1);
    CHECK(run_cli("gn-constant --n 3 --p 5", stdout_path) == 1);
    CHECK(run_cli("gn-constant --n two", stdout_path) == 1);
    CHECK(run_cli("--unknown-flag 3", stdout_path) == 1);
    CHECK(run_cli("", stdout_path) == 1);
    CHECK(run_cli("--config " + (dir / "missing.cfg").string(), stdout_path) == 1);
    // shooting cannot bracket a ground state this close to p = 1
    CHECK(run_cli("gn-constant --n 8 --p 1.0000001", stdout_path) == 2);
    CHECK(run_cli("potential-check --out /nonexistent-dir/x.json", stdout_path) == 3);

    fs::remove_all(dir);
}

TEST_CASE("concentration csv") {
    const auto dir = scratch_dir();
    const auto out = dir / "conc.csv";
    const auto stdout_path = dir / "stdout.txt";
    REQUIRE(run_cli("concentration --schedule 2,3 --spacing 0.02 --max-iterations 20 --format csv --out " +
                        out.string(),
                    stdout_path) == 0);
    const auto main_table = dir / "conc.concentration.csv";
    REQUIRE(fs::exists(main_table));
    std::istringstream lines(slurp(main_table));
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "R,W,l2_at_gauge,support_radius");
    int rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
    }
    CHECK(rows == 2);
    CHECK(fs::exists(dir / "conc.concentration_detail.csv"));
    fs::remove_all(dir);
}
