#pragma once

#include <cstdint>

namespace rdm {

// SplitMix64: counter-based generator with a 64-bit state. Cheap to seed, so
// every Monte Carlo sample gets its own stream derived from (master seed,
// sample index); results are then independent of worker count and iteration
// order.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1) with 53 random bits
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n) by rejection-free multiplication (n << 2^64)
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }
};

// Stream for one sample of a seeded experiment. XOR keeps distinct indices in
// distinct streams; SplitMix64's output mixing decorrelates adjacent states.
inline SplitMix64 sample_stream(std::uint64_t master_seed, std::uint64_t sample_index) {
    return SplitMix64(master_seed ^ (0xD1B54A32D192ED03ull * (sample_index + 1)));
}

} // namespace rdm
