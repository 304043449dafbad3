#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace convdesc {

// The standard distributions are implementation-defined; these helpers only
// use raw engine output so seeded results match across standard libraries.

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0, by rejection.
inline std::uint64_t uniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

template <typename T>
void shuffleInPlace(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniformIndex(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace convdesc
