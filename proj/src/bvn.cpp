#include "vvm/bvn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vvm/normal.hpp"
#include "vvm/quadrature.hpp"

namespace vvm {

namespace {

// Positive half of an n-point Gauss-Legendre rule, as used by the classic
// BVN quadrature.
struct HalfRule {
  std::vector<double> x;
  std::vector<double> w;

  explicit HalfRule(int n) {
    const GaussLegendre gl(n);
    for (int i = 0; i < n; ++i) {
      if (gl.nodes[i] > 0.0) {
        x.push_back(gl.nodes[i]);
        w.push_back(gl.weights[i]);
      }
    }
  }
};

const HalfRule& select_rule(double ar) {
  static const HalfRule r6(6), r12(12), r20(20);
  if (ar < 0.3) return r6;
  if (ar < 0.75) return r12;
  return r20;
}

}  // namespace

double bvn_upper(double dh, double dk, double r) {
  constexpr double twopi = 2.0 * std::numbers::pi;
  const HalfRule& rule = select_rule(std::abs(r));

  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    if (std::abs(r) > 0.0) {
      const double hs = (h * h + k * k) / 2.0;
      const double asr = std::asin(r);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * rule.x[i] + 1.0) / 2.0);
          bvn += rule.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn = bvn * asr / (2.0 * twopi);
    }
    bvn += norm_cdf(-h) * norm_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(r) < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
               c * d * as * as / 5.0);
      }
      if (-hk < 100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(twopi) * norm_cdf(-b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        for (int is = -1; is <= 1; is += 2) {
          double xs = a * (is * rule.x[i] + 1.0);
          xs = xs * xs;
          const double rs = std::sqrt(1.0 - xs);
          asr = -(bs / xs + hk) / 2.0;
          if (asr > -100.0) {
            const double sp = 1.0 + c * xs * (1.0 + d * xs);
            const double ep =
                std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
            bvn += a * rule.w[i] * std::exp(asr) * (ep - sp);
          }
        }
      }
      bvn = -bvn / twopi;
    }
    if (r > 0.0) {
      bvn += norm_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

QuadrantMoments quadrant_moments_upper(double h, double k, double rho) {
  const double s = std::sqrt(std::max((1.0 - rho) * (1.0 + rho), 1e-30));
  const double a1 = (k - rho * h) / s;  // conditional tail argument given Z1 = h
  const double a2 = (h - rho * k) / s;
  const double q1 = norm_cdf(-a1);
  const double q2 = norm_cdf(-a2);
  const double ph = norm_pdf(h);
  const double pk = norm_pdf(k);

  QuadrantMoments qm;
  qm.p = bvn_upper(h, k, rho);
  qm.m1 = ph * q1 + rho * pk * q2;
  qm.m2 = pk * q2 + rho * ph * q1;
  // Second moments by integration by parts of x phi2; the pair of coupled
  // identities solves to these closed forms.
  qm.x11 = qm.p + h * ph * q1 + rho * pk * (rho * k * q2 + s * norm_pdf(a2));
  qm.x22 = qm.p + k * pk * q2 + rho * ph * (rho * h * q1 + s * norm_pdf(a1));
  qm.x12 = rho * qm.p + rho * h * ph * q1 + rho * k * pk * q2 +
           s * pk * norm_pdf(a2);
  return qm;
}

}  // namespace vvm
