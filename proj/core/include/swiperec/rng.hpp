#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

// Deterministic sampling helpers. std::mt19937_64 output is pinned by the
// standard, but the standard *distributions* are not; these produce the same
// streams on every platform, which keeps simulator output byte-stable.
namespace swiperec::rng {

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n). n must be > 0.
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
  std::size_t i = static_cast<std::size_t>(uniform01(gen) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

/// Standard normal via Box-Muller.
inline double normal(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  while (u1 <= 0.0) u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace swiperec::rng
