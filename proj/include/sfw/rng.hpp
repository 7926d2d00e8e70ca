#pragma once

#include <cstdint>
#include <random>

namespace sfw {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication r at grid position eps_index. Depends only on its
/// arguments, so results never depend on which worker ran the cell.
inline std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t eps_index,
                                      std::uint64_t replication) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ (eps_index + 0x51ed270b27f1a3c5ULL));
  return splitmix64(h ^ (replication + 0x2545f4914f6cdd1dULL));
}

}  // namespace sfw
