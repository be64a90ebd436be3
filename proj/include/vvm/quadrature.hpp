#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace vvm {

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre recurrence. Avoids hard-coded tables.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * pp * pp);
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
  }
};

namespace detail {

inline double gl_panel(const std::function<double(double)>& f, double a,
                       double b, const GaussLegendre& rule) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * f(c + h * rule.nodes[i]);
  }
  return s * h;
}

inline double adaptive_rec(const std::function<double(double)>& f, double a,
                           double b, double whole, const GaussLegendre& rule,
                           double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(f, a, m, rule);
  const double right = gl_panel(f, m, b, rule);
  const double err = std::abs(left + right - whole);
  if (err < tol || depth >= 14) return left + right;
  return adaptive_rec(f, a, m, left, rule, tol * 0.5, depth + 1) +
         adaptive_rec(f, m, b, right, rule, tol * 0.5, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Legendre integral of f over [a, b]. The integrand must be
// smooth on the interior; callers split at known kinks.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  static const GaussLegendre rule(12);
  const double whole = detail::gl_panel(f, a, b, rule);
  return detail::adaptive_rec(f, a, b, whole, rule, tol, 0);
}

}  // namespace vvm
