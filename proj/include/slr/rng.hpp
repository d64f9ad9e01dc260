#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

// Deterministic randomness helpers. std::mt19937_64 has a fully specified
// output sequence, but the standard <random> distributions do not, so every
// mapping from raw engine output to a value is done here by hand. All
// randomness in the project flows through named seeds and these helpers.
namespace slr::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; decorrelates seed/salt pairs.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a over the string, folded into the seed.
inline std::uint64_t mix(std::uint64_t seed, std::string_view salt) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : salt) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix(seed, h);
}

// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * unit(eng);
}

// Fisher-Yates; std::shuffle is implementation-specified, this is not.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace slr::rng
