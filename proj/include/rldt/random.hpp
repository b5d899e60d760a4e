#pragma once

// Portable sampling helpers. std::mt19937_64 output is fixed by the standard,
// but the std distributions are not, so draws go through these instead.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace rldt {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), rejection sampled. n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 1) {
    rng();  // keep one draw per call
    return 0;
  }
  // floor(2^64 / n) without overflow; draws in the partial last bucket are rejected.
  const std::uint64_t bucket = (Rng::max() - n + 1) / n + 1;
  for (;;) {
    const std::uint64_t r = rng() / bucket;
    if (r < n) return r;
  }
}

/// splitmix64 finalizer; turns consecutive seeds into unrelated ones.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

template <typename T>
void shuffle_in_place(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace rldt
