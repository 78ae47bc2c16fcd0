#pragma once

// Seeded randomness with a bit-exact contract across platforms: engines are
// std::mt19937_64 (output fully specified by the standard) and bounded draws
// avoid std::uniform_int_distribution, whose algorithm is library-defined.

#include <cstdint>
#include <limits>
#include <random>

namespace kgeval {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for one query: master seed, test-triple index,
// direction and run number.
inline std::mt19937_64 query_stream(std::uint64_t seed, std::uint64_t triple_index, std::uint64_t direction,
                                    std::uint64_t run = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ triple_index);
  h = splitmix64(h ^ direction);
  h = splitmix64(h ^ run);
  return std::mt19937_64(h);
}

// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace kgeval
