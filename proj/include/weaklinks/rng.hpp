#pragma once

#include <cstdint>
#include <random>

namespace weaklinks {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; decorrelates nearby seeds before feeding mt19937_64.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-replica stream: seed xor replica index, then mixed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed ^ stream));
}

}  // namespace weaklinks
