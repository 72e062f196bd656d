#pragma once

#include <cmath>
#include <cstdint>

namespace jdsse {

// SplitMix64 avalanche step; used as the key-derivation function for
// per-trajectory streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Per-trajectory random stream derived from (master seed, stream index).
///
/// The stream state is a xoshiro256++ generator whose 256-bit seed comes
/// from splitmix64 applied to the (seed, index) pair, so streams are
/// reproducible and independent of the order in which workers run them.
class TrajectoryRng {
public:
    TrajectoryRng(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::uint64_t key = master_seed;
        (void)splitmix64(key);
        key ^= 0xD1B54A32D192ED03ull * (stream_index + 1);
        s_[0] = splitmix64(key);
        s_[1] = splitmix64(key);
        s_[2] = splitmix64(key);
        s_[3] = splitmix64(key);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform draw in (0, 1]; safe argument for log().
    double uniform_positive() { return 1.0 - uniform(); }

    /// Standard normal via the Marsaglia polar method (one value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace jdsse
