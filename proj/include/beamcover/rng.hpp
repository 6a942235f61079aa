#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "beamcover/vec3.hpp"

namespace beamcover {

// All sampling goes through these helpers instead of std distributions,
// whose output is implementation-defined. mt19937_64 itself is specified
// by the standard, so identical seeds give identical streams everywhere.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

/// Uniform integer in [0, m), m >= 1. Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t m) {
    const std::uint64_t limit = m * ((~std::uint64_t{0}) / m);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % m;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller.
inline double normal01(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

/// k distinct indices from [0, n), in selection order (partial Fisher-Yates).
inline std::vector<int> sample_distinct(std::mt19937_64& rng, int n, int k) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace beamcover
