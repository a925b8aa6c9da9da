#pragma once

#include <cstdint>
#include <random>

namespace oim {

using Rng = std::mt19937_64;

// Independent randomness streams derived from one user-facing seed. A stream
// id never changes meaning once published; results are reproducible from
// (seed, stream) alone.
enum class Stream : std::uint64_t {
  kInitialPhases = 1,
  kDetuning = 2,
  kNoise = 3,
  kGenerator = 4,
  kAnneal = 5,
  kRandomSpins = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// (seed, stream) -> substream seed. Two rounds of splitmix so that adjacent
// seeds and adjacent stream ids land far apart.
inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(stream) << 32));
}

inline Rng make_rng(std::uint64_t seed, Stream stream) { return Rng(derive_seed(seed, stream)); }

}  // namespace oim
