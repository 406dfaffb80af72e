#pragma once

#include <cstdint>
#include <random>

namespace secalloc::detail {

// Uniform draw in [0, 1) built directly from the standardized mt19937_64
// word stream, so sampled objects are reproducible across platforms and
// standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection-free modulo; bias is irrelevant
// for the small bounds used here and determinism is what matters.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}

}  // namespace secalloc::detail
