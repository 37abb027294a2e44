#pragma once

#include <cstdint>

namespace loctime {

// splitmix64: cheap 64-bit generator with a one-call finalizer, used both as
// the per-trial stream and to derive independent substreams from
// (seed, trial index). Trial substreams never share state, so any execution
// order reproduces the same draws.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static std::uint64_t scramble(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(
            scramble(seed + (index + 1) * 0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return scramble(state_);
    }

    // Uniform draw in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace loctime
