// simulate: command-line front end for the experiments

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccme/ccme.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Collective-coordinate master equation experiments"};
    app.set_version_flag("--version", ccme::kCodeVersion);

    std::string experiment;
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    bool svg = false;
    int workers = 1;
    std::string mode;

    std::string names;
    for (const auto& n : ccme::experiment_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("experiment", experiment, "One of: " + names)->required();
    app.add_option("--config", config_file, "key = value parameter file");
    app.add_option("--set", overrides, "Override a parameter, key=value (repeatable)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--svg", svg, "Also write an SVG plot");
    app.add_option("--workers", workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
    app.add_option("--mode", mode, "additive, nonadditive or both")
        ->check(CLI::IsMember({"additive", "nonadditive", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ccme::kExitConfig;
    }

    ccme::ExperimentSpec spec;
    spec.name = experiment;
    spec.out_dir = out_dir;
    spec.svg = svg;
    spec.workers = workers;
    try {
        ccme::Config cfg;
        if (!config_file.empty()) cfg.merge_file(config_file);
        for (const auto& o : overrides) cfg.set_assignment(o);
        if (!mode.empty()) cfg.set("mode", mode);
        spec.settings = ccme::resolve_settings(cfg);
    } catch (const ccme::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ccme::kExitConfig;
    }

    const auto known = ccme::experiment_names();
    if (std::find(known.begin(), known.end(), experiment) == known.end()) {
        std::cerr << "unknown experiment '" << experiment << "'; expected one of: " << names << "\n";
        return ccme::kExitConfig;
    }

    ccme::ExperimentOutput out;
    try {
        out = ccme::run_experiment(spec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ccme::kExitConvergence;
    }
    for (const auto& m : out.messages) (out.exit_code == 0 ? std::cout : std::cerr) << m << (m.ends_with('\n') ? "" : "\n");
    for (const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
    return out.exit_code;
}
