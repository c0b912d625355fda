#pragma once

#include <cstdint>

namespace lexrsm {

// SplitMix64. Counter-based and platform-stable, unlike std::mt19937 paired
// with distribution objects whose output is implementation-defined.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform draw from {0, ..., n-1}; modulo bias is irrelevant at our sizes.
inline std::uint64_t rand_below(std::uint64_t& state, std::uint64_t n) {
  return splitmix64(state) % n;
}

}  // namespace lexrsm
