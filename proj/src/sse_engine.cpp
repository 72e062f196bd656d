#include "jdsse/sse_engine.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "jdsse/errors.hpp"

namespace jdsse {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidParamsError("IntegratorConfig: dt must be positive");
    if (!(t_final >= dt)) throw InvalidParamsError("IntegratorConfig: t_final must be >= dt");
    if (!(norm_guard_low > 0.0 && norm_guard_low < 1.0 && norm_guard_high > 1.0))
        throw InvalidParamsError("IntegratorConfig: norm guard must satisfy 0 < low < 1 < high");
    if (record_stride < 1) throw InvalidParamsError("IntegratorConfig: record_stride must be >= 1");
    const int m = steps();
    if (m < 1) throw InvalidParamsError("IntegratorConfig: no steps on [0, t_final]");
    if (m % record_stride != 0)
        throw InvalidParamsError("IntegratorConfig: record_stride must divide the step count");
    for (double t : snapshot_times) {
        const long k = std::lround(t / dt);
        if (k < 0 || k > m || std::abs(static_cast<double>(k) * dt - t) > 1e-9 * (1.0 + std::abs(t)))
            throw InvalidParamsError("IntegratorConfig: snapshot time not on the step grid");
    }
}

int IntegratorConfig::steps() const { return static_cast<int>(std::llround(t_final / dt)); }

namespace {

void euler_step_into(const ModelInterface& model, const ComponentState& s, double dt,
                     std::span<const double> noise, ComponentState& drift_buf,
                     ComponentState& diff_buf, ComponentState& out) {
    out = s;
    if (model.drift) {
        model.drift(s, drift_buf);
        axpy(dt, drift_buf, out);
    }
    for (std::size_t i = 0; i < model.diffusion.size(); ++i) {
        model.diffusion[i](s, diff_buf);
        axpy(noise[i], diff_buf, out);
    }
}

}  // namespace

ComponentState euler_step(const ModelInterface& model, const ComponentState& s, double dt,
                          std::span<const double> noise) {
    if (noise.size() != model.diffusion.size())
        throw InvalidParamsError("euler_step: need one Wiener increment per diffusion channel");
    ComponentState drift_buf = ComponentState::zeros_like(s);
    ComponentState diff_buf = ComponentState::zeros_like(s);
    ComponentState out = ComponentState::zeros_like(s);
    euler_step_into(model, s, dt, noise, drift_buf, diff_buf, out);
    if (!out.all_finite()) throw NonFiniteError("euler_step: non-finite state entries");
    return out;
}

int select_channel(std::span<const double> intensities, double u) {
    double total = 0.0;
    for (double v : intensities)
        if (v > 0.0) total += v;
    if (total <= 1e-30)
        throw AllZeroIntensityError("select_channel: total intensity <= 1e-30 at a fire event");
    double acc = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        if (intensities[i] <= 0.0) continue;
        last_positive = static_cast<int>(i);
        acc += intensities[i] / total;
        if (u < acc) return static_cast<int>(i);
    }
    return last_positive;  // u at the top of the cumulative bracket
}

TrajectoryRecord run_trajectory(const ModelInterface& model, const ComponentState& initial,
                                const IntegratorConfig& cfg, TrajectoryRng& rng,
                                const Observable& observable) {
    cfg.validate();
    const int total_steps = cfg.steps();
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    const std::size_t n_diffusion = model.diffusion.size();
    const std::size_t n_counting = model.counting.size();

    // Snapshot times mapped onto step indices (may repeat, kept in order).
    std::vector<long> snapshot_steps;
    snapshot_steps.reserve(cfg.snapshot_times.size());
    for (double t : cfg.snapshot_times) snapshot_steps.push_back(std::lround(t / dt));

    TrajectoryRecord record;
    const int grid_points = total_steps / cfg.record_stride + 1;
    record.times.reserve(grid_points);
    record.observable.reserve(grid_points);
    record.survival.reserve(grid_points);

    ComponentState s = initial;
    ComponentState next = ComponentState::zeros_like(s);
    ComponentState drift_buf = ComponentState::zeros_like(s);
    ComponentState diff_buf = ComponentState::zeros_like(s);
    ComponentState jump_buf = ComponentState::zeros_like(s);
    std::vector<double> noise(n_diffusion);
    std::vector<double> fire_intensities(n_counting);

    double lambda = 0.0;
    double threshold = -std::log(rng.uniform_positive());

    auto record_grid_point = [&](double t) {
        record.times.push_back(t);
        record.observable.push_back(observable ? observable(s) : 0.0);
        record.survival.push_back(std::exp(-lambda));
    };
    auto take_snapshots = [&](long step) {
        for (std::size_t i = 0; i < snapshot_steps.size(); ++i)
            if (snapshot_steps[i] == step) {
                if (record.snapshots.size() < snapshot_steps.size())
                    record.snapshots.resize(snapshot_steps.size());
                record.snapshots[i] = s;
            }
    };

    record_grid_point(0.0);
    take_snapshots(0);

    for (int n = 0; n < total_steps; ++n) {
        // Step 5 bookkeeping: accumulate the intensity integral at the left
        // point; the jump fires once it reaches -log(tau).
        double total_intensity = 0.0;
        for (const auto& channel : model.counting) total_intensity += channel.intensity(s);
        lambda = survival_advance(lambda, total_intensity, dt);

        for (std::size_t i = 0; i < n_diffusion; ++i) noise[i] = rng.normal() * sqrt_dt;
        euler_step_into(model, s, dt, noise, drift_buf, diff_buf, next);

        const double norm2 = next.total_norm2();
        if (!std::isfinite(norm2)) throw NonFiniteError("run_trajectory: non-finite state norm");
        record.norm_drift_sum += std::abs(norm2 - 1.0);
        ++record.steps_taken;
        if (norm2 < cfg.norm_guard_low || norm2 > cfg.norm_guard_high) {
            record.status = TerminationStatus::DiscardedUnstable;
            return record;
        }

        const double t_next = static_cast<double>(n + 1) * dt;
        if (n_counting > 0 && lambda >= threshold) {
            // Channel choice uses the left limit of the state at the jump
            // time; the ratios are scale invariant, so renormalization
            // does not matter here.
            const ComponentState& basis = cfg.jump_at_step_end ? next : s;
            for (std::size_t c = 0; c < n_counting; ++c)
                fire_intensities[c] = model.counting[c].intensity(basis);
            const int channel = select_channel(fire_intensities, rng.uniform());
            model.counting[channel].jump(basis, jump_buf);
            s = jump_buf;
            lambda = 0.0;
            threshold = -std::log(rng.uniform_positive());

            JumpEvent event;
            event.time = t_next;
            event.channel = channel;
            event.post_component_norm2.reserve(s.psi.size());
            for (const auto& v : s.psi) event.post_component_norm2.push_back(v.squaredNorm());
            record.jumps.push_back(std::move(event));
        } else {
            s = next;
            if (cfg.renormalize_each_step) scale(s, 1.0 / std::sqrt(norm2));
        }

        if ((n + 1) % cfg.record_stride == 0) record_grid_point(t_next);
        take_snapshots(n + 1);
    }

    return record;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record) {
    auto out = open_out(path);
    out << "t,observable,P_survival\n";
    for (std::size_t i = 0; i < record.times.size(); ++i)
        out << fmt(record.times[i]) << ',' << fmt(record.observable[i]) << ','
            << fmt(record.survival[i]) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

void write_jump_csv(const std::string& path, const TrajectoryRecord& record,
                    const std::vector<std::string>& channel_names) {
    auto out = open_out(path);
    out << "t_jump,channel\n";
    for (const auto& event : record.jumps) {
        out << fmt(event.time) << ',';
        if (event.channel >= 0 && event.channel < static_cast<int>(channel_names.size()))
            out << channel_names[event.channel];
        else
            out << event.channel;
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace jdsse
