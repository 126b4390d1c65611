#pragma once

/// Reproducible random streams for simulation and Monte Carlo.
///
/// Every stream is a std::mt19937_64 (bit-exact across standard library
/// implementations) seeded with a SplitMix64 mix of (seed, stream index), so
/// replication r of a run depends only on (seed, r) and never on scheduling.
/// Gaussian draws use the Marsaglia polar method implemented here rather than
/// std::normal_distribution, whose algorithm is implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace tsecon {

/// Recorded in every Monte Carlo provenance block and in the cache file.
inline constexpr std::string_view kRngName = "mt19937_64+splitmix64-streams+polar-normal/1";

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream number `index` of a run seeded with `seed`.
  [[nodiscard]] static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  [[nodiscard]] double uniform() noexcept {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  [[nodiscard]] double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  [[nodiscard]] std::uint64_t next_u64() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tsecon
