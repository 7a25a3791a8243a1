// smdlab: Smagorinsky-with-wall-damping shear-flow laboratory.
//
// Subcommands:
//   run            time-integrate one configuration, write diagnostics + summary
//   sweep          cartesian parameter sweep with a combined CSV
//   bounds         evaluate dissipation bounds only (no solver)
//   damping-table  sample the selected damping profile to a two-column table
//   verify         run the built-in property suite
//
// Exit codes: 0 success, 1 failed verification, 2 configuration error.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "smd/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Smagorinsky wall-damping dissipation laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool deterministic = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "configuration file");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory (overrides the config)");
        cmd->add_option("--seed", seed, "perturbation seed (overrides the config)")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_flag("--deterministic", deterministic, "force deterministic reductions");
    };

    auto* cmd_run = app.add_subcommand("run", "single time integration");
    auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep");
    auto* cmd_bounds = app.add_subcommand("bounds", "bound evaluation only");
    auto* cmd_table = app.add_subcommand("damping-table", "sample the damping profile");
    auto* cmd_verify = app.add_subcommand("verify", "built-in property suite");
    add_common(cmd_run, true);
    add_common(cmd_sweep, true);
    add_common(cmd_bounds, true);
    add_common(cmd_table, true);
    add_common(cmd_verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    smd::RunMode mode = smd::RunMode::verify;
    if (cmd_run->parsed()) mode = smd::RunMode::run;
    else if (cmd_sweep->parsed()) mode = smd::RunMode::sweep;
    else if (cmd_bounds->parsed()) mode = smd::RunMode::bounds;
    else if (cmd_table->parsed()) mode = smd::RunMode::damping_table;

    smd::ExperimentConfig config;
    try {
        if (!config_path.empty()) config = smd::parse_config_file(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (seed_set) config.solver.seed = seed;
        if (deterministic) config.solver.deterministic_reduction = true;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        return smd::run_experiment(config, mode, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
