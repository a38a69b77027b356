#pragma once

#include <cstdint>

namespace fracdim {

/// Seeded counter-style PRNG (splitmix64 core).
///
/// All randomness in the library flows through explicitly passed seeds,
/// never ambient state. split() derives an independent stream for a given
/// index without advancing the parent, which is what the block-parallel
/// estimators use to stay bit-identical across thread counts.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

    /// Unbiased integer in [0, bound) via Lemire rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Independent derived stream; deterministic in (current state, index).
    SplitMix64 split(std::uint64_t stream_index) const {
        std::uint64_t z = state_ ^ (0x632BE59BD9B4E019ULL + stream_index * 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return SplitMix64(z ^ (z >> 31));
    }

private:
    std::uint64_t state_;
};

}  // namespace fracdim
