#pragma once

#include <cstdint>
#include <random>

namespace neuropong {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent sub-stream seeds. Every random consumer in a run draws its seed
// from (base seed, stream tag, index) so that adding a consumer never shifts
// the numbers seen by another.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index = 0,
                                    std::uint64_t sub = 0) noexcept {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ (stream * 0xd6e8feb86659fd93ULL));
  h = splitmix64(h ^ (index + 0x632be59bd9b4e019ULL));
  return splitmix64(h ^ (sub * 0xa0761d6478bd642fULL));
}

namespace streams {
inline constexpr std::uint64_t kFixedPattern = 1;
inline constexpr std::uint64_t kInputSpikes = 2;
inline constexpr std::uint64_t kTrialNoise = 3;
inline constexpr std::uint64_t kTieBreak = 4;
inline constexpr std::uint64_t kEvalInput = 5;
inline constexpr std::uint64_t kEvalTieBreak = 6;
inline constexpr std::uint64_t kWeightInit = 7;
inline constexpr std::uint64_t kSchedule = 8;
inline constexpr std::uint64_t kPermutation = 9;
inline constexpr std::uint64_t kBench = 10;
inline constexpr std::uint64_t kStochasticRounding = 11;
}  // namespace streams

}  // namespace neuropong
