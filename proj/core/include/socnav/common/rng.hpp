#pragma once

#include <cstdint>
#include <random>

namespace socnav {

/// splitmix64 mixer; used to fan a master seed out into independent
/// per-task streams keyed by counters.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive a child seed from a master seed and a list of counters.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> counters) {
  std::uint64_t s = master;
  std::uint64_t out = splitmix64(s);
  for (std::uint64_t c : counters) {
    s = out ^ (c + 0x9e3779b97f4a7c15ULL);
    out = splitmix64(s);
  }
  return out;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace socnav
