#pragma once

#include <cstdint>
#include <random>

namespace fpr {

// splitmix64 finalizer; used to derive well-separated engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent engine for one Monte-Carlo chunk. Results must not depend on
// how chunks are scheduled, so every chunk owns its own stream.
inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk_index) {
    return std::mt19937_64(mix64(mix64(seed) ^ mix64(chunk_index + 1)));
}

// Uniform double in [0, 1) from the top 53 bits. Avoids the
// implementation-defined behavior of std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace fpr
