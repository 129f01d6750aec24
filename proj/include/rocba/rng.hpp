#pragma once

#include <cstdint>
#include <random>

namespace rocba {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; decorrelates consecutive integer seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

/// Independent stream for sub-task `stream` of a seeded job.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(mix_seed(mix_seed(seed) ^ mix_seed(~stream))); }

} // namespace rocba
