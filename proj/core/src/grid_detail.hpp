#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace fracdim::detail {

/// Half-up cell index: round(scale * x) with ties to the larger index.
inline std::int64_t cell_index(double x, double scale) {
    return static_cast<std::int64_t>(std::floor(x * scale + 0.5));
}

/// Packs per-coordinate indices into one 64-bit key when they fit.
///
/// bits_per_dim = 64/dim; each signed index is biased into its field. The
/// counting kernels check fits() per level and fall back to vector keys
/// otherwise, so counts stay exact for any dimension or level.
struct KeyPacker {
    int dim;
    int bits;
    std::int64_t limit;  // |index| must be < limit

    explicit KeyPacker(int dimension)
        : dim(dimension),
          bits(dimension == 1 ? 62 : 64 / dimension),
          limit(std::int64_t{1} << (bits - 1)) {}

    bool fits(std::int64_t idx) const { return idx > -limit && idx < limit; }

    std::uint64_t pack(std::span<const std::int64_t> idx) const {
        std::uint64_t key = 0;
        const std::uint64_t bias = static_cast<std::uint64_t>(limit);
        for (int c = 0; c < dim; ++c) {
            key = (key << bits) |
                  ((static_cast<std::uint64_t>(idx[c]) + bias) & ((1ULL << bits) - 1));
        }
        return key;
    }
};

struct VecHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ v.size();
        for (std::int64_t x : v) {
            std::uint64_t z = h ^ static_cast<std::uint64_t>(x);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            h = z ^ (z >> 31);
        }
        return static_cast<std::size_t>(h);
    }
};

using PackedSet = std::unordered_set<std::uint64_t>;
using VectorSet = std::unordered_set<std::vector<std::int64_t>, VecHash>;

}  // namespace fracdim::detail
