#pragma once

// Counter-based random stream used for every random draw in the library.
//
// Output k of a stream with key s is splitmix64_mix(s + (k + 1) * kGamma). Since
// the output depends only on (key, counter), streams can be split per trial
// index with split_seed() and consumed in any execution order with identical
// results. Gaussian variates use a Box-Muller transform implemented
// here, so draws are bit-identical across standard library implementations.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace seeopt {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the child stream `index` derived from `base`.
constexpr std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64_mix(splitmix64_mix(base ^ 0x5851F42D4C957F2DULL) + (index + 1) * kGamma);
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return splitmix64_mix(key_ + (++counter_) * kGamma); }

  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard real normal variate.
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace seeopt
