#pragma once

#include <cstdint>

namespace fk {

// Counter-based deterministic PRNG (splitmix64 finalizer).  Every random
// number is a pure function of (seed, stream, counter), so multi-start
// searches are reproducible across platforms and thread counts.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
  return static_cast<double>(counter_rng(seed, stream, counter) >> 11) *
         0x1.0p-53;
}

// Uniform double in [-amp, amp).
inline double uniform_sym(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t counter, double amp) {
  return amp * (2.0 * uniform01(seed, stream, counter) - 1.0);
}

}  // namespace fk
