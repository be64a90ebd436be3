#include "vvm/inverse_adf.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace vvm {

namespace {

// Margin equation in the compact form F(z) = (h+z)^2 - r^2 (1 - h(h+z)).
// Roots coincide with those of the expanded polynomial form; F > 0 exactly
// when the reachable posterior margin exceeds the target.
double margin_equation(double z, double r2, double eps) {
  const double h = step_hazard(z, eps);
  const double hz = h + z;
  return hz * hz - r2 * (1.0 - h * hz);
}

// Unique root of z + h(z) = 0 for eps > 0. The function is strictly
// increasing since h(h+z) < 1.
double sign_change_point(double eps) {
  double lo = -60.0, hi = 60.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + step_hazard(mid, eps) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Bisection with a Newton polish over a sign-changing bracket.
double solve_on_bracket(double a, double b, double r2, double eps) {
  double fa = margin_equation(a, r2, eps);
  double fb = margin_equation(b, r2, eps);
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0)) {
    throw RootNotFound("inverse_adf: lost the sign change");
  }
  double z = 0.5 * (a + b);
  for (int i = 0; i < 200; ++i) {
    const double f = margin_equation(z, r2, eps);
    if ((f < 0.0) == (fa < 0.0)) {
      a = z;
      fa = f;
    } else {
      b = z;
      fb = f;
    }
    // dF/dz with dh/dz = -h(z+h).
    const double h = step_hazard(z, eps);
    const double hp = -h * (z + h);
    const double hz = h + z;
    const double df = 2.0 * hz * (hp + 1.0) + r2 * (hp * hz + h * (hp + 1.0));
    double z_next = df != 0.0 ? z - f / df : 0.5 * (a + b);
    if (!(z_next > a && z_next < b)) z_next = 0.5 * (a + b);
    if (std::abs(z_next - z) < 1e-15 * (1.0 + std::abs(z))) return z_next;
    z = z_next;
  }
  if (std::abs(margin_equation(z, r2, eps)) > 1e-8 * (1.0 + r2)) {
    throw RootNotFound("inverse_adf: iteration budget exhausted");
  }
  return z;
}

}  // namespace

InverseAdfResult inverse_adf(double m_new, double v_new,
                             const StepLikelihood& lik) {
  if (!(v_new > 0.0)) {
    throw InvalidVariance("inverse_adf: posterior variance must be positive");
  }
  const double eps = lik.epsilon;
  const double r = m_new / std::sqrt(v_new);
  const double r2 = r * r;

  double z_hat;
  if (eps == 0.0) {
    // The eps = 0 update always lands at positive mean with standardized
    // margin above 1; anything else has no preimage.
    if (!(m_new > 0.0)) {
      throw NoValidRoot("inverse_adf: eps = 0 requires positive mean");
    }
    double hi = std::abs(r) + 2.0;
    while (margin_equation(hi, r2, eps) <= 0.0 && hi < 1e8) hi *= 2.0;
    double lo = -(std::abs(r) + 2.0);
    int tries = 0;
    while (margin_equation(lo, r2, eps) >= 0.0 && ++tries <= 40) lo *= 2.0;
    if (tries > 40) {
      throw NoValidRoot("inverse_adf: target margin unreachable");
    }
    z_hat = solve_on_bracket(lo, hi, r2, eps);
  } else {
    // z* splits the line into the negative-mean and positive-mean branches;
    // F(z*) = -r^2 < 0 and F grows like z^2 toward either end.
    const double z_star = sign_change_point(eps);
    if (m_new == 0.0) {
      z_hat = z_star;
    } else if (m_new > 0.0) {
      double hi = std::max(z_star + 1.0, std::abs(r) + 2.0);
      while (margin_equation(hi, r2, eps) <= 0.0 && hi < 1e8) hi *= 2.0;
      z_hat = solve_on_bracket(z_star, hi, r2, eps);
    } else {
      double lo = std::min(z_star - 1.0, -(std::abs(r) + 2.0));
      while (margin_equation(lo, r2, eps) <= 0.0 && lo > -1e8) lo *= 2.0;
      z_hat = solve_on_bracket(lo, z_star, r2, eps);
    }
  }

  const double h = step_hazard(z_hat, eps);
  const double shrink = 1.0 - h * (h + z_hat);
  if (!(shrink > 0.0)) {
    throw NoValidRoot("inverse_adf: root gives nonpositive prior variance");
  }
  InverseAdfResult out;
  out.z_hat = z_hat;
  out.h = h;
  out.v_h = v_new / shrink;
  out.m_h = z_hat * std::sqrt(out.v_h);

  // A root that fails to reproduce the inputs under the forward map is not a
  // valid preimage.
  const Tilt1D fwd = adf_moments(lik, out.m_h, out.v_h);
  const double m_scale = std::max(std::abs(m_new), std::sqrt(v_new));
  if (std::abs(fwd.m_new - m_new) > 1e-8 * m_scale ||
      std::abs(fwd.v_new - v_new) > 1e-8 * v_new) {
    throw NoValidRoot("inverse_adf: forward check failed");
  }
  return out;
}

MomentGaussian inverse_adf_lift(const MomentGaussian& target,
                                const Eigen::VectorXd& x,
                                const StepLikelihood& lik) {
  const Eigen::VectorXd u_t = target.covariance * x;
  const double v_new = x.dot(u_t);
  const double m_new = target.mean.dot(x);
  if (!(v_new > 0.0)) {
    throw DegenerateDirection("inverse_adf_lift: direction has no variance");
  }
  const InverseAdfResult ia = inverse_adf(m_new, v_new, lik);
  // The update only touches the x direction: V_new x = (1 - h(h+z)) V x, so
  // the prior covariance along x is recovered by undoing the shrink, and the
  // rank-1 reconstruction restores the rest.
  const double shrink = v_new / ia.v_h;
  const Eigen::VectorXd u_prior = u_t / shrink;
  MomentGaussian prior;
  prior.covariance =
      target.covariance +
      (ia.h * (ia.h + ia.z_hat) / ia.v_h) * (u_prior * u_prior.transpose());
  symmetrize(prior.covariance);
  prior.mean = target.mean - u_prior * (ia.h / std::sqrt(ia.v_h));
  return prior;
}

}  // namespace vvm
