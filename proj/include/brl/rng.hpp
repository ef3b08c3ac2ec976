#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace brl {

/// Counter-based pseudo-random generator: output i is a SplitMix64-style
/// mix of (key, i). Every sampling API in the library takes an explicit
/// seed, so any result can be reproduced from its config alone.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in {0, ..., n-1}.
    std::size_t next_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("next_index: n must be positive");
        // Rejection sampling keeps the distribution exactly uniform.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return static_cast<std::size_t>(v % n);
    }

    /// Independent generator for an unrelated sampling purpose.
    CounterRng derive(std::uint64_t stream) const noexcept {
        CounterRng child(key_ ^ (0xD1B54A32D192ED03ULL + stream * 0x8CB92BA72F3D8DD7ULL));
        return child;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Index drawn from the categorical distribution given by probs (need not be
/// perfectly normalized; the tail index absorbs rounding slack).
inline int sample_categorical(CounterRng& rng, const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
    double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

} // namespace brl
