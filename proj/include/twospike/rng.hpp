#pragma once

#include <cstdint>
#include <random>

namespace twospike {

// Draws for distinct jobs live on distinct generators keyed by
// (seed, id, purpose), so adding chains or enlarging one sample never
// shifts the stream of another.
enum class stream : std::uint64_t {
  chain = 1,
  emission = 2,
  warm_start = 3,
  overlap_limit = 4,
  gap_scan = 5,
  goe = 6,
  oracle_mc = 7,
  generic = 8,
};

inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t id, stream purpose) {
  std::uint64_t s = seed;
  std::uint64_t k0 = splitmix64_next(s);
  s ^= 0xd1342543de82ef95ULL * (id + 1);
  std::uint64_t k1 = splitmix64_next(s);
  s ^= 0xaf251af3b0f025b5ULL * (static_cast<std::uint64_t>(purpose) + 1);
  std::uint64_t k2 = splitmix64_next(s);
  std::uint64_t k3 = splitmix64_next(s);
  std::seed_seq seq{
      static_cast<std::uint32_t>(k0), static_cast<std::uint32_t>(k0 >> 32),
      static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k1 >> 32),
      static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32),
      static_cast<std::uint32_t>(k3), static_cast<std::uint32_t>(k3 >> 32)};
  return std::mt19937_64(seq);
}

// Index draw via multiply-shift; bias is O(n / 2^64).
inline std::uint64_t pick_index(std::mt19937_64& g, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(g()) * n) >> 64);
}

// Uniform in [0, 1); 53-bit mantissa.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace twospike
