#pragma once

#include <cstdint>

#include "cflow/state.hpp"

namespace cflow::lab {

/// SplitMix64 evaluated in counter mode: output k of stream `seed` is
/// mix(seed + (k+1) * 0x9E3779B97F4A7C15), so any language can reproduce a stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0,1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Stream seed for member `index` of an ensemble seeded with `seed`.
inline std::uint64_t member_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64::mix(seed ^ SplitMix64::mix(index + 0x632BE59BD9B4E019ULL));
}

struct PerturbationSpec {
    Index first = 0;  ///< support is [first, last)
    Index last = 0;
    /// Exact h^1 norm of the result.
    double delta = 0.0;
    /// Force the mode-0 entry to vanish.
    bool zero_mode0 = false;
};

/// Entries drawn uniformly from the unit complex disc (r = sqrt(u1), phi = 2 pi u2) on the
/// support, then rescaled to h^1 norm delta. Deterministic in (spec, n_total, seed).
ModeVector generate_perturbation(const PerturbationSpec& spec, Index n_total, std::uint64_t seed);

}  // namespace cflow::lab
