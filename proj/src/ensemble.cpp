#include "jdsse/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "jdsse/errors.hpp"

namespace jdsse {

namespace {

// Fixed reduction shape shared by sample_mean and run_ensemble: partial sums
// over consecutive blocks of 32 values, block results added in order.
constexpr std::size_t kChunk = 32;

double chunked_sum(std::span<const double> values) {
    double total = 0.0;
    for (std::size_t start = 0; start < values.size(); start += kChunk) {
        double partial = 0.0;
        const std::size_t end = std::min(values.size(), start + kChunk);
        for (std::size_t i = start; i < end; ++i) partial += values[i];
        total += partial;
    }
    return total;
}

double std_error_from_sums(double sum, double sumsq, long count) {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double variance = (sumsq - sum * sum / n) / (n - 1.0);
    return std::sqrt(std::max(0.0, variance) / n);
}

}  // namespace

SampleStats sample_mean(std::span<const double> values) {
    if (values.size() < 2)
        throw InsufficientSamplesError("sample_mean: need at least 2 values for a standard error");
    std::vector<double> squares(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) squares[i] = values[i] * values[i];
    const double sum = chunked_sum(values);
    const double sumsq = chunked_sum(squares);
    const long n = static_cast<long>(values.size());
    return {sum / static_cast<double>(n), std_error_from_sums(sum, sumsq, n)};
}

double excited_population(const ComponentState& s) {
    double sum = 0.0;
    for (const auto& psi : s.psi) sum += std::norm(psi(0));
    return sum;
}

DensityVector ensemble_density(std::span<const ComponentState> states) {
    if (states.empty()) throw InvalidParamsError("ensemble_density: need at least one state");
    const int n = states.front().components();
    DensityVector eta;
    for (int i = 0; i < n; ++i) {
        const auto dim = states.front().psi[i].size();
        eta.push_back(CMat::Zero(dim, dim));
    }
    for (const auto& s : states)
        for (int i = 0; i < n; ++i) eta[i] += s.psi[i] * s.psi[i].adjoint();
    for (auto& m : eta) m /= static_cast<double>(states.size());
    return eta;
}

namespace {

struct ChunkAccum {
    std::vector<double> sum;
    std::vector<double> sumsq;
    std::vector<DensityVector> density_sum;
    long completed = 0;
    long discarded = 0;
    long jumps = 0;
    double norm_drift = 0.0;
    long steps = 0;
};

}  // namespace

EnsembleResult run_ensemble(const ModelInterface& model, const ComponentState& initial,
                            const EnsembleConfig& cfg, const Observable& observable) {
    if (cfg.trajectories < 1) throw InvalidParamsError("run_ensemble: trajectories must be >= 1");
    cfg.integrator.validate();

    const long total = cfg.trajectories;
    const long n_chunks = (total + static_cast<long>(kChunk) - 1) / static_cast<long>(kChunk);
    const int grid_points = cfg.integrator.steps() / cfg.integrator.record_stride + 1;
    const std::size_t n_snapshots = cfg.integrator.snapshot_times.size();

    std::vector<ChunkAccum> chunks(n_chunks);
    std::atomic<long> next_chunk{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        try {
            for (;;) {
                const long c = next_chunk.fetch_add(1);
                if (c >= n_chunks) return;
                ChunkAccum& acc = chunks[c];
                acc.sum.assign(grid_points, 0.0);
                acc.sumsq.assign(grid_points, 0.0);
                acc.density_sum.assign(n_snapshots, DensityVector{});

                const long begin = c * static_cast<long>(kChunk);
                const long end = std::min(total, begin + static_cast<long>(kChunk));
                for (long r = begin; r < end; ++r) {
                    TrajectoryRng rng(cfg.master_seed, static_cast<std::uint64_t>(r));
                    TrajectoryRecord record =
                        run_trajectory(model, initial, cfg.integrator, rng, observable);
                    acc.norm_drift += record.norm_drift_sum;
                    acc.steps += record.steps_taken;
                    if (record.status == TerminationStatus::DiscardedUnstable) {
                        ++acc.discarded;
                        continue;
                    }
                    ++acc.completed;
                    acc.jumps += static_cast<long>(record.jumps.size());
                    for (int g = 0; g < grid_points; ++g) {
                        const double v = record.observable[g];
                        acc.sum[g] += v;
                        acc.sumsq[g] += v * v;
                    }
                    for (std::size_t si = 0; si < n_snapshots; ++si) {
                        const ComponentState& s = record.snapshots[si];
                        if (acc.density_sum[si].empty())
                            for (const auto& psi : s.psi)
                                acc.density_sum[si].push_back(CMat::Zero(psi.size(), psi.size()));
                        for (int i = 0; i < s.components(); ++i)
                            acc.density_sum[si][i] += s.psi[i] * s.psi[i].adjoint();
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next_chunk.store(n_chunks);  // drain remaining work
        }
    };

    int n_threads = cfg.threads > 0 ? cfg.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<int>(std::min<long>(n_threads, n_chunks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Deterministic reduction in chunk-index order.
    EnsembleResult result;
    std::vector<double> sum(grid_points, 0.0), sumsq(grid_points, 0.0);
    std::vector<DensityVector> density_sum(n_snapshots);
    long completed = 0, discarded = 0, jumps = 0, steps = 0;
    double norm_drift = 0.0;
    for (const ChunkAccum& acc : chunks) {
        for (int g = 0; g < grid_points; ++g) {
            sum[g] += acc.sum[g];
            sumsq[g] += acc.sumsq[g];
        }
        for (std::size_t si = 0; si < n_snapshots; ++si) {
            if (acc.density_sum[si].empty()) continue;
            if (density_sum[si].empty())
                density_sum[si] = acc.density_sum[si];
            else
                for (std::size_t i = 0; i < density_sum[si].size(); ++i)
                    density_sum[si][i] += acc.density_sum[si][i];
        }
        completed += acc.completed;
        discarded += acc.discarded;
        jumps += acc.jumps;
        steps += acc.steps;
        norm_drift += acc.norm_drift;
    }

    if (static_cast<double>(discarded) > cfg.max_discard_fraction * static_cast<double>(total))
        throw SimulationAbortError("run_ensemble: " + std::to_string(discarded) + " of " +
                                   std::to_string(total) + " trajectories discarded by the norm guard");
    if (completed == 0) throw SimulationAbortError("run_ensemble: no completed trajectories");

    result.stats.completed = completed;
    result.stats.discarded = discarded;
    result.stats.t.resize(grid_points);
    result.stats.mean.resize(grid_points);
    result.stats.std_error.resize(grid_points);
    for (int g = 0; g < grid_points; ++g) {
        result.stats.t[g] = static_cast<double>(g) * cfg.integrator.record_stride * cfg.integrator.dt;
        result.stats.mean[g] = sum[g] / static_cast<double>(completed);
        result.stats.std_error[g] = std_error_from_sums(sum[g], sumsq[g], completed);
    }
    result.densities.resize(n_snapshots);
    for (std::size_t si = 0; si < n_snapshots; ++si) {
        result.densities[si] = density_sum[si];
        for (auto& m : result.densities[si]) m /= static_cast<double>(completed);
    }
    result.mean_jump_count = static_cast<double>(jumps) / static_cast<double>(completed);
    result.mean_norm_drift_per_step =
        steps > 0 ? norm_drift / static_cast<double>(steps) : 0.0;
    return result;
}

void write_ensemble_csv(const std::string& path, const EnsembleStats& stats) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    out << "t,mean,stderr,n_samples,n_discarded\n";
    char buf[160];
    for (std::size_t i = 0; i < stats.t.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%ld,%ld\n", stats.t[i], stats.mean[i],
                      stats.std_error[i], stats.completed, stats.discarded);
        out << buf;
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace jdsse
