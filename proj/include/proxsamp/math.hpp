#pragma once

// Scalar Gaussian special functions shared by the samplers. Tail quantities
// are computed in log space so indicator-truncated densities stay finite.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace proxsamp {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log(1 + e^t) without overflow.
inline double log1pexp(double t) {
  if (t > 33.3) return t;
  if (t > -37.0) return std::log1p(std::exp(t));
  return std::exp(t);
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Scaled complementary error function exp(z^2) erfc(z). The direct product
// is accurate while erfc stays in normal range; past that the asymptotic
// series converges to machine precision.
inline double erfcx(double z) {
  if (z < 0.0) return 2.0 * std::exp(z * z) - erfcx(-z);
  if (z < 25.0) return std::exp(z * z) * std::erfc(z);
  const double inv2z2 = 1.0 / (2.0 * z * z);
  double term = 1.0, sum = 1.0;
  for (int n = 1; n <= 8; ++n) {
    term *= -(2 * n - 1) * inv2z2;
    sum += term;
  }
  return sum / (z * kSqrtPi);
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// log Phi(x), stable arbitrarily far into the left tail.
inline double log_normal_cdf(double x) {
  if (x > -1.0) return std::log(normal_cdf(x));
  return std::log(0.5 * erfcx(-x / kSqrt2)) - 0.5 * x * x;
}

inline double log_normal_sf(double x) { return log_normal_cdf(-x); }

// log(Phi(b) - Phi(a)) for a < b.
inline double log_normal_interval_mass(double a, double b) {
  if (a > 0.0) {
    const double la = log_normal_sf(a);
    const double lb = log_normal_sf(b);
    return la + std::log1p(-std::exp(lb - la));
  }
  if (b < 0.0) return log_normal_interval_mass(-b, -a);
  return std::log(normal_cdf(b) - normal_cdf(a));
}

// Phi^{-1}(p): Abramowitz-Stegun 26.2.23 seed polished by Newton iterations
// on the erfc-based CDF. Accurate down to subnormal p.
inline double normal_quantile(double p) {
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in [0, 1]");
  if (p == 0.5) return 0.0;

  const bool upper = p > 0.5;
  const double pp = upper ? 1.0 - p : p;
  const double t = std::sqrt(-2.0 * std::log(pp));
  double x = -(t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t)));
  for (int it = 0; it < 4; ++it) {
    const double step = (normal_cdf(x) - pp) / normal_pdf(x);
    if (!std::isfinite(step)) break;
    x -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
  }
  return upper ? -x : x;
}

// a - b with the convention that the ratio of two zero densities is one.
inline double log_density_diff(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("log_density_diff: NaN log density");
  if (a == b) return 0.0;  // covers the -inf/-inf case
  return a - b;
}

}  // namespace proxsamp
