#pragma once

#include <cmath>
#include <limits>

#include "vvm/errors.hpp"
#include "vvm/gaussian.hpp"
#include "vvm/normal.hpp"

namespace vvm {

// Noisy step likelihood for binary classification on signed feature vectors:
// f(x; w) = eps + (1 - 2 eps) Theta(w.x). The labeling error rate is
// restricted to [0, 0.5): at 0.5 the likelihood is constant and every update
// degenerates, and beyond 0.5 the classifier inverts.
struct StepLikelihood {
  double epsilon;

  explicit StepLikelihood(double eps = 0.01) : epsilon(eps) {
    if (!(eps >= 0.0 && eps < 0.5)) {
      throw ConfigError("StepLikelihood: epsilon must lie in [0, 0.5)");
    }
  }

  double value(double u) const { return u > 0.0 ? 1.0 - epsilon : epsilon; }
};

// Hazard h(z) = (1-2eps) N(z;0,1) / (eps + (1-2eps) Phi(z)). The left tail
// needs the scaled-erfc route when eps = 0; for eps > 0 the denominator is
// bounded below by eps and the direct formula is stable everywhere.
inline double step_hazard(double z, double eps) {
  const double t = 1.0 - 2.0 * eps;
  if (z > -8.0 || eps > 0.0) {
    return t * norm_pdf(z) / (eps + t * norm_cdf(z));
  }
  return inv_mills(z);
}

// log(eps + (1-2eps) Phi(z)), stable in both tails.
inline double step_log_partition(double z, double eps) {
  const double t = 1.0 - 2.0 * eps;
  if (z >= 8.0) {
    // Z = (1 - eps) - t Phi(-z)
    return std::log1p(-t * norm_cdf(-z) / (1.0 - eps)) + std::log(1.0 - eps);
  }
  if (z > -8.0) return std::log(eps + t * norm_cdf(z));
  if (eps == 0.0) return log_norm_cdf(z);
  const double d = log_norm_cdf(z) - std::log(eps);
  return std::log(eps) + (d < -700.0 ? 0.0 : std::log1p(t * std::exp(d)));
}

// Moments of the tilted distribution f(u) N(u; m_u, v_u) / Z in one
// dimension. v_new <= v_u always: the step update never inflates variance.
struct Tilt1D {
  double z;
  double h;
  double m_new;
  double v_new;
  double log_z;
};

inline Tilt1D adf_moments(const StepLikelihood& lik, double m_u, double v_u) {
  if (!(v_u > 0.0)) {
    throw InvalidVariance("adf_moments: cavity variance must be positive");
  }
  const double s = std::sqrt(v_u);
  Tilt1D t;
  t.z = m_u / s;
  t.h = step_hazard(t.z, lik.epsilon);
  t.log_z = step_log_partition(t.z, lik.epsilon);
  t.m_new = m_u + t.h * s;
  // 1 - h(h+z) > 0 analytically; the floor only guards against rounding at
  // extreme negative margins.
  const double shrink = std::max(1.0 - t.h * (t.h + t.z), 1e-15);
  t.v_new = v_u * shrink;
  return t;
}

// Rank-1 site whose product with the cavity marginal reproduces the tilted
// moments exactly: 1/v_new = 1/v_u + tau, m_new/v_new = m_u/v_u + nu.
inline SiteFactor site_from_tilt(double m_u, double v_u, const Tilt1D& tilt) {
  if (!(tilt.v_new > 0.0)) {
    throw InvalidVariance("site_from_tilt: tilted variance must be positive");
  }
  SiteFactor s;
  s.precision_1d = 1.0 / tilt.v_new - 1.0 / v_u;
  s.shift_1d = tilt.m_new / tilt.v_new - m_u / v_u;
  return s;
}

// Per-site KL divergence KL(p_hat_i || q) reduced to one dimension, split
// into the factor entropy term E_i / Z_i and the Gaussian ratio term G_i.
// (m_u, v_u) are the cavity marginals along the site direction, (m_p, v_p)
// the marginals of the surrogate, and log_z the tilt normalizer at the
// cavity. Both terms vanish as the margin |m_u|/sqrt(v_u) grows: far points
// are nearly Gaussian.
struct DivergenceParts {
  double e_term;  // E_i / Z_i
  double g_term;  // integral of q log(q^{\i} / (Z_i q))
  double total() const { return e_term + g_term; }
};

inline DivergenceParts site_divergence_parts(const StepLikelihood& lik,
                                             double m_u, double v_u,
                                             double m_p, double v_p,
                                             double log_z) {
  if (!(v_u > 0.0) || !(v_p > 0.0)) {
    throw InvalidVariance("site_divergence: variances must be positive");
  }
  const double eps = lik.epsilon;
  const double z = m_u / std::sqrt(v_u);
  double e_i = (1.0 - eps) * std::log1p(-eps) * norm_cdf(z);
  if (eps > 0.0) e_i += eps * std::log(eps) * norm_cdf(-z);
  // q and q^{\i} differ only in the marginal along the site direction, so
  // the ratio integral collapses to a 1-D Gaussian KL plus the normalizer.
  const double d = m_u - m_p;
  const double kl1 =
      0.5 * (v_p / v_u + d * d / v_u - 1.0 + std::log(v_u / v_p));
  return {e_i * std::exp(-log_z), -kl1 - log_z};
}

inline double site_divergence(const StepLikelihood& lik, double m_u,
                              double v_u, double m_p, double v_p,
                              double log_z) {
  return site_divergence_parts(lik, m_u, v_u, m_p, v_p, log_z).total();
}

// Margin statistic R(x) = m_w.x / sqrt(x^T V_w x). Invariant under positive
// rescaling of x.
template <typename Scalar, typename Derived>
Scalar margin(const MomentGaussianT<Scalar>& q,
              const Eigen::MatrixBase<Derived>& x) {
  const auto [m_u, v_u] = marginal_1d(q, x);
  return m_u / std::sqrt(v_u);
}

}  // namespace vvm
