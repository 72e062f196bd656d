#pragma once

#include <cstdint>
#include <string>

#include "jdsse/config.hpp"

namespace jdsse {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCompareFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSimulationAbort = 3;
inline constexpr int kExitIo = 4;

struct CliOptions {
    std::string out_dir = "out";
    int threads = 0;  // 0 = hardware concurrency; wall time only, never results
    bool has_seed_override = false;
    std::uint64_t seed_override = 0;
    std::string command;  // recorded in the manifest
};

/// Monte-Carlo ensemble run; writes ensemble.csv and manifest.json.
int cmd_simulate(RunConfig cfg, const CliOptions& options);

/// Deterministic rate-equation solve; writes ode.csv and manifest.json.
int cmd_solve(RunConfig cfg, const CliOptions& options);

/// Single stochastic realization; writes trajectory.csv, jumps.csv and
/// manifest.json.
int cmd_trajectory(RunConfig cfg, const CliOptions& options);

/// Ensemble and rate-equation solve on the same grid; writes ensemble.csv,
/// ode.csv, compare.csv and compare_summary.json. Exit status is 0 iff
/// |mean - ode| <= 3 stderr + 1e-12 at every grid point.
int cmd_compare(RunConfig cfg, const CliOptions& options);

}  // namespace jdsse
