#pragma once

#include <cstdint>
#include <random>

namespace lexsimp {

// std::mt19937_64 output is fixed by the standard; the distributions are not.
// Everything seeded in this project draws through uniform_below so results
// are identical across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename Vec>
void shuffle_in_place(Vec& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace lexsimp
