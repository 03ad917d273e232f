#pragma once

#include <cstdint>
#include <random>

namespace d2d {

// Deterministic helpers on top of mt19937_64. std::uniform_*_distribution
// output is implementation defined, so all sampling in this codebase goes
// through these to keep results stable across standard libraries.

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_range(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

inline int uniform_index(std::mt19937_64& gen, int n) {
  return static_cast<int>((static_cast<unsigned __int128>(gen()) *
                           static_cast<unsigned __int128>(n)) >> 64);
}

}  // namespace d2d
