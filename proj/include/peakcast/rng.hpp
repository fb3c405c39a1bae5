#pragma once

#include <cstdint>
#include <random>

namespace peakcast {

// splitmix64 step; fast, full-period 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: the seed of the `stream`-th consumer of a
// master seed. Streams are independent of the order in which they are drawn.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0xA0761D6478BD642FULL * (stream + 1));
    return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_a,
                                 std::uint64_t stream_b) {
    return derive_seed(derive_seed(master, stream_a), stream_b);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream) {
    return std::mt19937_64(derive_seed(master, stream));
}

} // namespace peakcast
