#pragma once

#include <cstdint>
#include <random>

namespace dronesim {

using Rng = std::mt19937_64;

// splitmix64, used to decorrelate derived seeds (Steele et al.).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream per (seed, stream, index) triple. Streams keep the
// episode RNGs, the agent RNG and evaluation RNGs from overlapping.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t z = splitmix64(seed ^ splitmix64(stream));
    return splitmix64(z ^ splitmix64(index + 0x51ed2701ULL));
}

} // namespace dronesim
