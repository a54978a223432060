#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace hrlda {

// mt19937_64 output is fixed by the standard; the distributions in <random>
// are not, so everything drawn from it goes through the helpers below.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a tree node, derived from the run seed and the node's child-index path.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::span<const int> path) {
  std::uint64_t h = splitmix64(run_seed ^ 0x6872'6c64'61ULL);
  for (int step : path) {
    h = splitmix64(h ^ (static_cast<std::uint64_t>(step) + 1) * 0x100000001b3ULL);
  }
  return h;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

/// Fisher-Yates with uniform_below, so the permutation is the same on every platform.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

/// Draws an index from unnormalized non-negative weights. Consumes exactly one
/// value from the generator, including the single-outcome case.
inline std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace hrlda
