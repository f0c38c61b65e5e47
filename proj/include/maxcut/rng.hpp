#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "maxcut/types.hpp"

namespace maxcut {

inline std::mt19937_64 make_engine(RngSeed seed) {
  return std::mt19937_64(seed.value);
}

// splitmix64 finalizer; used to derive independent sub-seeds from a base seed
// so any sweep cell can be reproduced in isolation.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline RngSeed derive_seed(RngSeed base, std::uint64_t a, std::uint64_t b = 0,
                           std::uint64_t c = 0) {
  std::uint64_t s = mix_seed(base.value ^ mix_seed(a));
  s = mix_seed(s ^ mix_seed(b + 0x632be59bd9b4e019ULL));
  s = mix_seed(s ^ mix_seed(c + 0x9e6c63d0876a9a47ULL));
  return RngSeed{s};
}

inline std::vector<Index> random_permutation(Index n, RngSeed seed) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  auto engine = make_engine(seed);
  std::shuffle(order.begin(), order.end(), engine);
  return order;
}

}  // namespace maxcut
