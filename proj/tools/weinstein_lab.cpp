// weinstein-lab: batch driver for the Weinstein functional experiments.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "weinstein/error.hpp"
#include "weinstein/lab/config.hpp"
#include "weinstein/lab/experiment.hpp"
#include "weinstein/lab/report.hpp"

namespace {

enum ExitCode : int { kOk = 0, kInvalidConfig = 1, kNonConvergence = 2, kIo = 3 };

} // namespace

int main(int argc, char** argv) {
    using namespace weinstein;

    CLI::App app{"Weinstein functional laboratory"};
    app.set_help_flag("-h,--help", "Print this help message and exit");

    std::string experiment;
    std::string config_path;
    // Flag name -> value, filled only for flags given on the command line.
    std::vector<std::pair<std::string, std::string>> flags{
        {"n", ""}, {"p", ""}, {"a", ""}, {"grid-n", ""}, {"radius", ""}, {"space", ""},
        {"format", ""}, {"out", ""}, {"seed", ""}, {"max-iterations", ""}, {"spacing", ""},
        {"schedule", ""}};

    app.add_option("experiment", experiment,
                   "gn-constant | transplant-check | sup-compare | fractional-check | "
                   "rearrange-check | potential-check | concentration");
    app.add_option("--config", config_path, "key = value config file; flags override it");
    std::vector<CLI::Option*> options;
    for (auto& [name, value] : flags) {
        options.push_back(app.add_option("--" + name, value));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalidConfig;
    }

    lab::ExperimentConfig config;
    try {
        lab::Settings settings;
        if (!config_path.empty()) {
            settings = lab::read_settings(config_path);
        }
        for (std::size_t k = 0; k < flags.size(); ++k) {
            if (options[k]->count() > 0) {
                settings[flags[k].first] = flags[k].second;
            }
        }
        if (!experiment.empty()) {
            settings["experiment"] = experiment;
        }
        if (!settings.contains("experiment")) {
            throw Error(ErrorCode::InvalidConfig, "no experiment given");
        }
        config = lab::make_config(settings);
    } catch (const Error& e) {
        std::cerr << "weinstein-lab: " << e.what() << '\n';
        return kInvalidConfig;
    }

    lab::Report report;
    try {
        report = lab::run_experiment(config);
    } catch (const Error& e) {
        std::cerr << "weinstein-lab: " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidConfig ? kInvalidConfig : kNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "weinstein-lab: " << e.what() << '\n';
        return kNonConvergence;
    }

    try {
        lab::emit_report(report, config.format, config.out, std::cout);
    } catch (const Error& e) {
        std::cerr << "weinstein-lab: " << e.what() << '\n';
        return e.code() == ErrorCode::Io ? kIo : kNonConvergence;
    }

    if (report.failure) {
        std::cerr << "weinstein-lab: " << *report.failure << '\n';
        return kNonConvergence;
    }
    return kOk;
}
