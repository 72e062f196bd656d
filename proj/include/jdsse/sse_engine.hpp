#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jdsse/linalg.hpp"
#include "jdsse/rng.hpp"

namespace jdsse {

using DriftFn = std::function<void(const ComponentState&, ComponentState&)>;
using DiffusionFn = std::function<void(const ComponentState&, ComponentState&)>;
using IntensityFn = std::function<double(const ComponentState&)>;
using JumpFn = std::function<void(const ComponentState&, ComponentState&)>;
using Observable = std::function<double(const ComponentState&)>;

/// One Poisson-type channel: a state-dependent intensity and the
/// normalized map applied to the state when the channel fires.
struct CountingChannel {
    std::string name;
    IntensityFn intensity;
    JumpFn jump;
};

/// Evaluator bundle for d(psi) = a(psi) dt + sum_i b_i(psi) dW_i
/// + counting terms. The integrator sees only these callables, never the
/// operators behind them. Evaluators must be reentrant; outputs are
/// written into preallocated states shaped like the input.
struct ModelInterface {
    int components = 1;
    int dim = 1;
    DriftFn drift;
    std::vector<DiffusionFn> diffusion;
    std::vector<CountingChannel> counting;
};

struct IntegratorConfig {
    double dt = 1e-3;
    double t_final = 10.0;
    bool renormalize_each_step = true;
    double norm_guard_low = 0.25;   // discard below this pre-renormalization norm^2
    double norm_guard_high = 4.0;   // discard above
    bool jump_at_step_end = true;   // false: jump map acts on the pre-step state
    int record_stride = 10;
    std::vector<double> snapshot_times;  // grid times at which to store the state

    void validate() const;
    int steps() const;  // number of Euler steps on [0, t_final]
};

struct JumpEvent {
    double time = 0.0;
    int channel = -1;
    std::vector<double> post_component_norm2;  // per-component weight after the jump
};

enum class TerminationStatus { Completed, DiscardedUnstable };

struct TrajectoryRecord {
    std::vector<double> times;       // strided grid
    std::vector<double> observable;  // one sample per grid entry
    std::vector<double> survival;    // exp(-integral of total intensity since last jump)
    std::vector<JumpEvent> jumps;
    std::vector<ComponentState> snapshots;  // one per requested snapshot time
    TerminationStatus status = TerminationStatus::Completed;

    // Pre-renormalization |norm^2 - 1| accumulated over steps (stability diagnostics).
    double norm_drift_sum = 0.0;
    long steps_taken = 0;
};

/// One explicit Euler step s + a(s) dt + sum_i b_i(s) dW_i. `noise` holds
/// the Wiener increments (variance dt), one per diffusion evaluator.
/// Throws NonFiniteError if the result is not finite.
ComponentState euler_step(const ModelInterface& model, const ComponentState& s, double dt,
                          std::span<const double> noise);

/// Left-point accumulation of the intensity integral.
inline double survival_advance(double lambda, double intensity, double dt) {
    return lambda + intensity * dt;
}

/// Pick the firing channel: index i with probability intensities[i]/total.
/// Throws AllZeroIntensityError when the total is <= 1e-30.
int select_channel(std::span<const double> intensities, double u);

/// Simulate one trajectory of the jump-adapted scheme: Euler steps between
/// counts, survival-threshold jump times, conditional channel selection,
/// per-step renormalization and norm guarding.
TrajectoryRecord run_trajectory(const ModelInterface& model, const ComponentState& initial,
                                const IntegratorConfig& cfg, TrajectoryRng& rng,
                                const Observable& observable);

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record);
void write_jump_csv(const std::string& path, const TrajectoryRecord& record,
                    const std::vector<std::string>& channel_names);

}  // namespace jdsse
