#include "jdsse/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "jdsse/ensemble.hpp"
#include "jdsse/errors.hpp"
#include "jdsse/lindblad.hpp"
#include "jdsse/version.hpp"

namespace jdsse {

namespace {

namespace fs = std::filesystem;

void apply_seed_override(RunConfig& cfg, const CliOptions& options) {
    if (options.has_seed_override) cfg.master_seed = options.seed_override;
}

fs::path prepare_out_dir(const CliOptions& options) {
    fs::path dir(options.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, const CliOptions& options) {
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["command"] = options.command;
    manifest["master_seed"] = cfg.master_seed;
    manifest["threads"] = options.threads;
    manifest["config"] = nlohmann::json::parse(run_config_to_json_text(cfg));
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

DensityVector initial_density(const RunConfig& cfg) {
    const ComponentState s = cfg.initial_state();
    DensityVector eta;
    for (const auto& psi : s.psi) eta.push_back(psi * psi.adjoint());
    return eta;
}

RateRhs rate_rhs_for(const RunConfig& cfg) {
    const ModelParams p = cfg.params;
    if (cfg.diffusion_enabled)
        return [p](const DensityVector& eta, DensityVector& out) { two_band_master_rhs(p, eta, out); };
    return [p](const DensityVector& eta, DensityVector& out) {
        two_band_master_rhs_no_diffusion(p, eta, out);
    };
}

EnsembleResult run_config_ensemble(const RunConfig& cfg, const CliOptions& options) {
    EnsembleConfig ecfg;
    ecfg.trajectories = cfg.trajectories;
    ecfg.master_seed = cfg.master_seed;
    ecfg.integrator = cfg.integrator();
    ecfg.threads = options.threads;
    const TwoBandModel model = cfg.model();
    return run_ensemble(model.interface(), cfg.initial_state(), ecfg,
                        [](const ComponentState& s) { return excited_population(s); });
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidParamsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SimulationAbortError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSimulationAbort;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int cmd_simulate(RunConfig cfg, const CliOptions& options) {
    return run_guarded([&] {
        apply_seed_override(cfg, options);
        const fs::path dir = prepare_out_dir(options);
        const EnsembleResult result = run_config_ensemble(cfg, options);
        write_ensemble_csv((dir / "ensemble.csv").string(), result.stats);
        write_manifest(dir, cfg, options);
        std::cout << "wrote " << (dir / "ensemble.csv").string() << " (trajectories="
                  << result.stats.completed << ", discarded=" << result.stats.discarded << ")\n";
        return kExitOk;
    });
}

int cmd_solve(RunConfig cfg, const CliOptions& options) {
    return run_guarded([&] {
        apply_seed_override(cfg, options);
        const fs::path dir = prepare_out_dir(options);
        const OdeSeries series =
            rk4_solve(rate_rhs_for(cfg), initial_density(cfg), cfg.dt, cfg.t_final, cfg.output_stride);
        write_ode_csv((dir / "ode.csv").string(), series);
        write_manifest(dir, cfg, options);
        std::cout << "wrote " << (dir / "ode.csv").string() << " (final excited population "
                  << excited_population(series.eta.back()) << ")\n";
        return kExitOk;
    });
}

int cmd_trajectory(RunConfig cfg, const CliOptions& options) {
    return run_guarded([&] {
        apply_seed_override(cfg, options);
        const fs::path dir = prepare_out_dir(options);
        const TwoBandModel model = cfg.model();
        TrajectoryRng rng(cfg.master_seed, 0);
        const TrajectoryRecord record =
            run_trajectory(model.interface(), cfg.initial_state(), cfg.integrator(), rng,
                           [](const ComponentState& s) { return excited_population(s); });
        write_trajectory_csv((dir / "trajectory.csv").string(), record);
        write_jump_csv((dir / "jumps.csv").string(), record, TwoBandModel::channel_names());
        write_manifest(dir, cfg, options);
        std::cout << "wrote " << (dir / "trajectory.csv").string() << " (" << record.jumps.size()
                  << " jumps)\n";
        return kExitOk;
    });
}

int cmd_compare(RunConfig cfg, const CliOptions& options) {
    return run_guarded([&] {
        apply_seed_override(cfg, options);
        const fs::path dir = prepare_out_dir(options);

        const EnsembleResult mc = run_config_ensemble(cfg, options);
        const OdeSeries ode =
            rk4_solve(rate_rhs_for(cfg), initial_density(cfg), cfg.dt, cfg.t_final, cfg.output_stride);

        write_ensemble_csv((dir / "ensemble.csv").string(), mc.stats);
        write_ode_csv((dir / "ode.csv").string(), ode);

        std::ofstream out(dir / "compare.csv");
        if (!out) throw IoError("cannot open output file: " + (dir / "compare.csv").string());
        out << "t,mean,stderr,ode,abs_dev_over_stderr\n";
        double max_ratio = 0.0;
        bool pass = true;
        for (std::size_t i = 0; i < mc.stats.t.size(); ++i) {
            const double reference = excited_population(ode.eta[i]);
            const double dev = std::abs(mc.stats.mean[i] - reference);
            const double se = mc.stats.std_error[i];
            double ratio = 0.0;
            if (se > 0.0)
                ratio = dev / se;
            else if (dev > 1e-12)
                ratio = std::numeric_limits<double>::infinity();
            max_ratio = std::max(max_ratio, ratio);
            if (dev > 3.0 * se + 1e-12) pass = false;
            out << fmt(mc.stats.t[i]) << ',' << fmt(mc.stats.mean[i]) << ',' << fmt(se) << ','
                << fmt(reference) << ',' << fmt(ratio) << '\n';
        }
        if (!out) throw IoError("failed writing compare.csv");
        out.close();

        nlohmann::json summary;
        summary["max_abs_dev_over_stderr"] = max_ratio;
        summary["grid_points"] = mc.stats.t.size();
        summary["pass_3sigma"] = pass;
        std::ofstream sum_out(dir / "compare_summary.json");
        if (!sum_out) throw IoError("cannot write compare_summary.json");
        sum_out << summary.dump(2) << '\n';

        write_manifest(dir, cfg, options);
        std::cout << "max |mean-ode|/stderr = " << max_ratio << (pass ? " (pass)" : " (FAIL)")
                  << '\n';
        return pass ? kExitOk : kExitCompareFailed;
    });
}

}  // namespace jdsse
