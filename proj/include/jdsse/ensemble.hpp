#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jdsse/linalg.hpp"
#include "jdsse/sse_engine.hpp"

namespace jdsse {

struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and standard error sqrt(s^2/R) with unbiased variance s^2.
/// Uses the same fixed-shape chunked summation as run_ensemble, so the two
/// reductions agree exactly. Throws InsufficientSamplesError for R < 2.
SampleStats sample_mean(std::span<const double> values);

/// Excited-state population sum_j <psi_j| P+ |psi_j> of a normalized
/// two-level composite state; lies in [0, 1].
double excited_population(const ComponentState& s);

/// Mean projector density eta_i = (1/R) sum_r |psi_i^r><psi_i^r| over a set
/// of composite states.
DensityVector ensemble_density(std::span<const ComponentState> states);

struct EnsembleConfig {
    int trajectories = 10000;
    std::uint64_t master_seed = 1;
    IntegratorConfig integrator;
    int threads = 0;  // 0 = hardware concurrency; never affects results
    double max_discard_fraction = 0.1;
};

struct EnsembleStats {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> std_error;
    long completed = 0;  // per grid point; discarded trajectories contribute nowhere
    long discarded = 0;
};

struct EnsembleResult {
    EnsembleStats stats;
    /// Mean projector densities, one per IntegratorConfig::snapshot_times entry.
    std::vector<DensityVector> densities;
    double mean_jump_count = 0.0;
    double mean_norm_drift_per_step = 0.0;
};

/// Run R trajectories with per-trajectory streams derived from
/// (master_seed, trajectory index) and reduce observable statistics in a
/// fixed chunk order, so the result is bit-identical for any worker count.
/// Throws SimulationAbortError when the discarded fraction exceeds the
/// configured bound.
EnsembleResult run_ensemble(const ModelInterface& model, const ComponentState& initial,
                            const EnsembleConfig& cfg, const Observable& observable);

/// Columns: t, mean, stderr, n_samples, n_discarded.
void write_ensemble_csv(const std::string& path, const EnsembleStats& stats);

}  // namespace jdsse
