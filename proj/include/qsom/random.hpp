#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace qsom {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the `sequence`-th draw of a stream rooted at `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t sequence) {
  return splitmix64(seed ^ splitmix64(sequence + 0x632be59bd9b4e019ULL));
}

// The standard distributions are implementation-defined; these are not, so
// seeded runs reproduce across standard libraries.

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double low, double high) {
  return low + (high - low) * uniform01(rng);
}

/// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return static_cast<std::size_t>(draw % range);
}

}  // namespace qsom
