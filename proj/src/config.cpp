#include "jdsse/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "jdsse/errors.hpp"

namespace jdsse {

IntegratorConfig RunConfig::integrator() const {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_final = t_final;
    cfg.record_stride = output_stride;
    return cfg;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail_parse(const std::string& text, const json::parse_error& e) {
    // parse_error.byte is 1-based; turn it into line/column.
    std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    offset = std::min(offset, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
}

double number_field(const json& j, const std::string& key) {
    if (!j.at(key).is_number()) throw ConfigError(key + " must be a number");
    return j.at(key).get<double>();
}

CVec state_vector_field(const json& j, const std::string& key) {
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 2)
        throw ConfigError(key + " must be an array of two [re, im] pairs");
    CVec v(2);
    for (int i = 0; i < 2; ++i) {
        const auto& pair = arr[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ConfigError(key + " entries must be [re, im] pairs");
        v(i) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
    return v;
}

const std::set<std::string> kKnownKeys = {
    "gamma0",       "gamma1",          "gamma2",      "kappa",
    "omega1",       "omega2",          "epsilon",     "jump_convention",
    "diffusion_enabled", "dt",         "t_final",     "trajectories",
    "master_seed",  "output_stride",   "psi1",        "psi2",
};

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail_parse(text, e);
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    for (const auto& item : j.items())
        if (!kKnownKeys.count(item.key())) throw ConfigError("unknown config key \"" + item.key() + "\"");

    RunConfig cfg;
    try {
        cfg.params.gamma0 = number_field(j, "gamma0");
        cfg.params.gamma1 = number_field(j, "gamma1");
        cfg.params.gamma2 = number_field(j, "gamma2");
        cfg.params.kappa = number_field(j, "kappa");
        cfg.params.omega1 = number_field(j, "omega1");
        cfg.params.omega2 = number_field(j, "omega2");
        if (j.contains("epsilon")) cfg.params.epsilon = number_field(j, "epsilon");
        if (j.contains("jump_convention")) {
            if (!j["jump_convention"].is_string())
                throw ConfigError("jump_convention must be a string");
            cfg.convention = jump_convention_from_string(j["jump_convention"].get<std::string>());
        }
        if (j.contains("diffusion_enabled")) {
            if (!j["diffusion_enabled"].is_boolean())
                throw ConfigError("diffusion_enabled must be a boolean");
            cfg.diffusion_enabled = j["diffusion_enabled"].get<bool>();
        }
        cfg.dt = number_field(j, "dt");
        cfg.t_final = number_field(j, "t_final");
        if (j.contains("trajectories")) {
            if (!j["trajectories"].is_number_integer())
                throw ConfigError("trajectories must be an integer");
            cfg.trajectories = j["trajectories"].get<int>();
        }
        if (j.contains("master_seed")) {
            if (!j["master_seed"].is_number_integer())
                throw ConfigError("master_seed must be an integer");
            cfg.master_seed = j["master_seed"].get<std::uint64_t>();
        }
        if (j.contains("output_stride")) {
            if (!j["output_stride"].is_number_integer())
                throw ConfigError("output_stride must be an integer");
            cfg.output_stride = j["output_stride"].get<int>();
        }
        cfg.psi1 = state_vector_field(j, "psi1");
        cfg.psi2 = state_vector_field(j, "psi2");
    } catch (const json::out_of_range&) {
        for (const auto& key : kKnownKeys)
            if (key != "epsilon" && key != "jump_convention" && key != "diffusion_enabled" &&
                key != "trajectories" && key != "master_seed" && key != "output_stride" &&
                !j.contains(key))
                throw ConfigError("missing required config key \"" + key + "\"");
        throw ConfigError("missing required config key");
    }

    try {
        cfg.params.validate();
    } catch (const InvalidParamsError& e) {
        throw ConfigError(e.what());
    }

    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.t_final >= cfg.dt)) throw ConfigError("t_final must be >= dt");
    if (cfg.trajectories < 1) throw ConfigError("trajectories must be >= 1");
    if (cfg.output_stride < 1) throw ConfigError("output_stride must be >= 1");
    const long steps = std::lround(cfg.t_final / cfg.dt);
    if (steps < 1 || steps % cfg.output_stride != 0)
        throw ConfigError("output_stride must divide the number of time steps (" +
                          std::to_string(steps) + ")");

    const double norm2 = cfg.psi1.squaredNorm() + cfg.psi2.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-9)
        throw ConfigError("initial state must be normalized: |psi1|^2 + |psi2|^2 = " +
                          std::to_string(norm2) + ", expected 1 within 1e-9");

    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config_text(buf.str());
}

std::string run_config_to_json_text(const RunConfig& cfg) {
    json j;
    j["gamma0"] = cfg.params.gamma0;
    j["gamma1"] = cfg.params.gamma1;
    j["gamma2"] = cfg.params.gamma2;
    j["kappa"] = cfg.params.kappa;
    j["omega1"] = cfg.params.omega1;
    j["omega2"] = cfg.params.omega2;
    j["epsilon"] = cfg.params.epsilon;
    j["jump_convention"] = to_string(cfg.convention);
    j["diffusion_enabled"] = cfg.diffusion_enabled;
    j["dt"] = cfg.dt;
    j["t_final"] = cfg.t_final;
    j["trajectories"] = cfg.trajectories;
    j["master_seed"] = cfg.master_seed;
    j["output_stride"] = cfg.output_stride;
    j["psi1"] = {{cfg.psi1(0).real(), cfg.psi1(0).imag()}, {cfg.psi1(1).real(), cfg.psi1(1).imag()}};
    j["psi2"] = {{cfg.psi2(0).real(), cfg.psi2(0).imag()}, {cfg.psi2(1).real(), cfg.psi2(1).imag()}};
    return j.dump(2);
}

}  // namespace jdsse
