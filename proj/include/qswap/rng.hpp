#pragma once

#include <cstdint>
#include <random>

namespace qswap {

/// Deterministic random stream. A master seed plus a trial counter derive
/// independent streams, so Monte Carlo runs reproduce bit-for-bit under a
/// fixed seed regardless of how trials are scheduled.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    static RngStream for_trial(std::uint64_t master_seed, std::uint64_t trial) {
        return RngStream(splitmix64(master_seed ^ splitmix64(trial + 0x51a7b2c9d3e5f701ULL)));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return eng_(); }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
};

} // namespace qswap
