#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cycletrack {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Independent deterministic stream for (seed, stream tag, index).
inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t index = 0) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= stream * 0xd1342543de82ef95ull + 1;
  std::uint64_t b = splitmix64(state);
  state ^= index * 0x2545f4914f6cdd1dull + 1;
  std::uint64_t c = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

// Stream tags for scenario generation and corruption.
namespace rng_stream {
constexpr std::uint64_t kGeometry = 1;
constexpr std::uint64_t kCorruption = 2;
constexpr std::uint64_t kRender = 3;
constexpr std::uint64_t kOracle = 4;
constexpr std::uint64_t kSidecar = 5;
}  // namespace rng_stream

// Explicit samplers: the standard distributions are implementation-defined,
// which would tie every seeded artifact to one standard library. mt19937_64
// itself is fully specified.

/// Uniform in [0, 1) from the generator's top 53 bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

/// Standard normal via Box-Muller; one fresh pair per call keeps the stream
/// position independent of call history.
inline double normal_unit(std::mt19937_64& rng) {
  double u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

/// Poisson by inversion-by-multiplication (fine for the small means used
/// by the corruption model).
inline int poisson_knuth(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  const double limit = std::exp(-mean);
  int count = -1;
  double product = 1.0;
  do {
    product *= uniform_unit(rng);
    ++count;
  } while (product > limit);
  return count;
}

}  // namespace cycletrack
