#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fdnet {

/// Master seed plus the rule deriving one independent stream per
/// realization index. Estimates are reproducible for a fixed
/// (master, n_realizations) no matter how realizations are scheduled.
struct SeedPolicy {
  std::uint64_t master = 0x5eed5eed5eed5eedull;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Random draws for one realization. Samplers are spelled out here rather
/// than taken from <random> distributions so a fixed seed produces the same
/// stream under any standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double exponential(double mean = 1.0) {
    return -mean * std::log1p(-uniform());
  }

  double angle() {  // [-pi, pi)
    return uniform() * 2.0 * std::numbers::pi - std::numbers::pi;
  }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Nearest-point distance of a unit-intensity-scaled Poisson process:
  /// pdf 2 pi lambda r exp(-lambda pi r^2).
  double nearest_distance(double lambda) {
    return std::sqrt(exponential() / (lambda * std::numbers::pi));
  }

  std::uint64_t uniform_index(std::uint64_t n) {
    // widening-multiply range reduction
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(eng_()) * n;
    return static_cast<std::uint64_t>(prod >> 64);
  }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
  }

 private:
  std::uint64_t poisson_inversion(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= 1.0 - uniform();
    } while (p > limit);
    return k - 1;
  }

  // Hormann's transformed rejection (PTRS), exact for mean >= 10.
  std::uint64_t poisson_ptrs(double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
      const double u = uniform() - 0.5;
      double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * log_mean - mean - std::lgamma(kf + 1.0))
        return static_cast<std::uint64_t>(kf);
    }
  }

  std::mt19937_64 eng_;
};

inline RandomStream realization_stream(const SeedPolicy& policy,
                                       std::uint64_t index) {
  return RandomStream(
      detail::mix64(policy.master ^ detail::mix64(index)));
}

}  // namespace fdnet
