#pragma once

#include <cstdint>
#include <random>

namespace confab {

// std::uniform_*_distribution output is implementation-defined, so draws are
// mapped from raw mt19937_64 bits here to keep seeded results identical across
// standard libraries.

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// Uniform on the open interval (-1, 1).
inline double uniform_pm1(std::mt19937_64& gen) {
  for (;;) {
    const double u = uniform01(gen);
    if (u != 0.0) return 2.0 * u - 1.0;
  }
}

/// Uniform integer in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t v = gen();
    if (v < limit) return v % n;
  }
}

}  // namespace confab
