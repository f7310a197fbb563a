#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ridgeguard {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed for `index` under `base`; distinct indices give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) ^ mix64(index * kGoldenGamma + 0x632BE59BD9B4E019ULL));
}

/// Counter-based 64-bit stream: word c is mix64(seed + (c + 1) * gamma), so
/// any position can be read without generating the ones before it. Uniform
/// and Gaussian variates are derived from raw bits only, which keeps results
/// independent of the standard library's distribution implementations.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(seed_ + (counter + 1) * kGoldenGamma);
  }
  std::uint64_t next() noexcept { return at(counter_++); }

  /// [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Box-Muller pair from consecutive words 2k and 2k + 1.
  static void box_muller(std::uint64_t w1, std::uint64_t w2, double& z0, double& z1) noexcept {
    const double u1 = static_cast<double>((w1 >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  /// Standard normal; consumes two words per call.
  double normal() noexcept {
    double z0, z1;
    const auto w1 = next();
    const auto w2 = next();
    box_muller(w1, w2, z0, z1);
    return z0;
  }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace ridgeguard
