#pragma once

#include <cstdint>
#include <random>

namespace hcce {

/// splitmix64 step; a small, well-mixed generator used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministically derives an independent sub-seed from (seed, salt).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state ^= salt + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
    return splitmix64(state);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt_a, std::uint64_t salt_b) {
    return derive_seed(derive_seed(seed, salt_a), salt_b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt) {
    return std::mt19937_64(derive_seed(seed, salt));
}

}  // namespace hcce
