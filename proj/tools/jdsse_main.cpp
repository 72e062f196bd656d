// Command-line front end: simulate / solve / trajectory / compare.

#include <CLI11.hpp>
#include <iostream>

#include "jdsse/commands.hpp"
#include "jdsse/errors.hpp"
#include "jdsse/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo wave-function simulator for jump-diffusion stochastic "
                 "Schrodinger equations with a deterministic rate-equation reference"};
    app.set_version_flag("--version", std::string("jdsse ") + jdsse::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    jdsse::CliOptions options;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", options.out_dir, "output directory (default: out)");
        sub->add_option("--threads", options.threads,
                        "worker threads (0 = all cores; affects wall time only)");
        sub->add_option("--seed", seed, "override the config master seed")
            ->each([&](const std::string&) { options.has_seed_override = true; });
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte-Carlo ensemble");
    CLI::App* solve = app.add_subcommand("solve", "solve the rate equation with RK4");
    CLI::App* trajectory = app.add_subcommand("trajectory", "record a single realization");
    CLI::App* compare = app.add_subcommand("compare", "ensemble vs rate equation, 3-sigma check");
    for (CLI::App* sub : {simulate, solve, trajectory, compare}) add_common(sub);

    CLI11_PARSE(app, argc, argv);
    options.seed_override = seed;

    jdsse::RunConfig cfg;
    try {
        cfg = jdsse::load_run_config(config_path);
    } catch (const jdsse::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return jdsse::kExitConfig;
    }

    if (simulate->parsed()) {
        options.command = "simulate";
        return jdsse::cmd_simulate(cfg, options);
    }
    if (solve->parsed()) {
        options.command = "solve";
        return jdsse::cmd_solve(cfg, options);
    }
    if (trajectory->parsed()) {
        options.command = "trajectory";
        return jdsse::cmd_trajectory(cfg, options);
    }
    options.command = "compare";
    return jdsse::cmd_compare(cfg, options);
}
