#pragma once

#include <cstdint>
#include <string>

#include "jdsse/sse_engine.hpp"
#include "jdsse/two_band.hpp"

namespace jdsse {

/// Validated run description shared by all CLI subcommands.
struct RunConfig {
    ModelParams params;
    JumpConvention convention = JumpConvention::Corrected;
    bool diffusion_enabled = true;

    double dt = 1e-3;
    double t_final = 10.0;
    int trajectories = 10000;
    std::uint64_t master_seed = 1;
    int output_stride = 10;

    CVec psi1;
    CVec psi2;

    ComponentState initial_state() const { return TwoBandModel::make_state(psi1, psi2); }
    IntegratorConfig integrator() const;
    TwoBandModel model() const { return TwoBandModel(params, convention, diffusion_enabled); }
};

/// Parse and validate a config document. Unknown keys are rejected; any
/// problem raises ConfigError with a message pointing at the offending key
/// (or line/column for malformed JSON).
RunConfig parse_run_config_text(const std::string& text);

RunConfig load_run_config(const std::string& path);

/// Canonical JSON echo of a config (used by run manifests).
std::string run_config_to_json_text(const RunConfig& cfg);

}  // namespace jdsse
