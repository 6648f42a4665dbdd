#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tsketch {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mix.
constexpr Seed mix64(Seed z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a child seed from a parent seed and a path of integer tags.
/// Distinct tag paths give statistically independent streams.
constexpr Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> tags) noexcept {
    Seed s = mix64(parent);
    for (auto t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
    return s;
}

inline Engine make_engine(Seed seed) { return Engine(mix64(seed)); }

inline Engine make_engine(Seed parent, std::initializer_list<std::uint64_t> tags) {
    return Engine(derive_seed(parent, tags));
}

/// Uniform double in [0, 1) using the top 53 bits of one engine call.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace tsketch
