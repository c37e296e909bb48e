#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace autocore {

// Seed lineage: every RNG stream in the project is keyed off a master seed
// plus a textual tag and optional integer coordinates, so any recorded seed
// can be recomputed from the report alone.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = splitmix64(master);
  for (unsigned char c : tag) h = splitmix64(h ^ c);
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a) {
  return splitmix64(derive_seed(master, tag) ^ splitmix64(a));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a, std::uint64_t b) {
  return splitmix64(derive_seed(master, tag, a) ^ splitmix64(b ^ 0x5851f42d4c957f2dULL));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform draw from the probability simplex via normalized exponentials.
inline std::vector<double> sample_simplex(std::size_t dim, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> alpha(dim);
  double total = 0.0;
  for (auto& a : alpha) {
    a = expo(rng);
    total += a;
  }
  for (auto& a : alpha) a /= total;
  return alpha;
}

}  // namespace autocore
