#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace lfm {

// Name echoed into simulator ground-truth files so outputs produced by other
// implementations of the same generator can be compared draw for draw.
inline constexpr std::string_view kRngAlgorithm = "splitmix64";

// SplitMix64 (Steele, Lea & Flood). A 64-bit counter generator: the state
// walks a Weyl sequence and each output is a bijective mix of the counter,
// so the k-th draw is a pure function of (seed, k).
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1), for inverse-CDF transforms that reject the endpoints.
  double next_double_open() {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  std::uint64_t state_;
};

inline double draw_uniform(SplitMix64& rng, double lo, double hi) {
  return lo + rng.next_double() * (hi - lo);
}

inline double draw_exponential(SplitMix64& rng, double mean) {
  return -mean * std::log(rng.next_double_open());
}

inline bool draw_bernoulli(SplitMix64& rng, double p) { return rng.next_double() < p; }

// Inverse of the standard normal CDF, Acklam's rational approximation
// (relative error below 1.2e-9 over (0, 1)). Avoids trig so draws stay
// reproducible across libm implementations.
inline double standard_normal_quantile(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

inline double draw_normal(SplitMix64& rng) {
  return standard_normal_quantile(rng.next_double_open());
}

inline double draw_lognormal(SplitMix64& rng, double mu, double sigma) {
  return std::exp(mu + sigma * draw_normal(rng));
}

}  // namespace lfm
