#pragma once

#include <cstdint>
#include <random>

namespace perfpred {

// splitmix64 step; the de-facto standard seed scrambler.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed from a base seed and up to three salts.
// Used for per-trial / per-iteration / per-row streams so that concurrent
// work stays reproducible regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    (void)splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    (void)splitmix64(s);
    s ^= c * 0x165667b19e3779f9ULL;
    return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace perfpred
