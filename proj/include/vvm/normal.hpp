#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace vvm {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;

inline double norm_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

// Scaled complementary error function exp(x^2) erfc(x). For x in [0, 26]
// both factors are representable in double, so the direct product is fine;
// beyond that the asymptotic series takes over. Negative arguments use the
// reflection erfcx(-x) = 2 exp(x^2) - erfcx(x).
inline double erfcx(double x) {
  if (x < 0.0) {
    const double e = std::exp(x * x);
    if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    return 2.0 * e - erfcx(-x);
  }
  if (x <= 26.0) return std::exp(x * x) * std::erfc(x);
  // erfcx(x) ~ 1/(x sqrt(pi)) sum_n (-1)^n (2n-1)!! / (2x^2)^n
  const double ix2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 8; ++n) {
    term *= -(2.0 * n - 1.0) * ix2;
    sum += term;
  }
  return sum / (x * std::numbers::sqrt_pi);
}

// log Phi(z), stable far into the left tail.
inline double log_norm_cdf(double z) {
  if (z > -8.0) return std::log(norm_cdf(z));
  return std::log(0.5 * erfcx(-z * kInvSqrt2)) - 0.5 * z * z;
}

// Inverse Mills ratio pdf/cdf. Naive evaluation underflows for z << 0; the
// erfcx form stays exact because the exp(-z^2/2) factors cancel.
inline double inv_mills(double z) {
  if (z > -8.0) return norm_pdf(z) / norm_cdf(z);
  return (2.0 * kInvSqrt2Pi) / erfcx(-z * kInvSqrt2);
}

}  // namespace vvm
