#pragma once

#include <array>
#include <cstdint>

namespace crossfbm {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective 64-bit mix.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the independent substream for path `index` under master `seed`:
/// splitmix64(seed ^ splitmix64(index)).
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index));
}

/// xoshiro256** 1.0 (Blackman & Vigna), state seeded by four SplitMix64 draws.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform_open() noexcept;

  /// Standard normal variate by inversion of a uniform draw.
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Standard normal quantile, Wichura's AS241 (PPND16), relative error ~1e-16.
double normal_quantile(double p);

/// Identifier recorded in output metadata.
inline constexpr const char* kRngName = "xoshiro256**/splitmix64-substreams";
inline constexpr const char* kNormalMethod = "inverse-cdf (AS241)";

}  // namespace crossfbm
