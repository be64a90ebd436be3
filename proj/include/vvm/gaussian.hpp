#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <utility>

#include "vvm/errors.hpp"

namespace vvm {

// Multivariate Gaussian in moment form. Values are immutable once
// constructed and safe to share across threads.
template <typename Scalar = double>
struct MomentGaussianT {
  Eigen::VectorX<Scalar> mean;
  Eigen::MatrixX<Scalar> covariance;

  Eigen::Index dim() const { return mean.size(); }

  // N(0, I), the standard prior over classification weights.
  static MomentGaussianT standard(Eigen::Index d) {
    return {Eigen::VectorX<Scalar>::Zero(d),
            Eigen::MatrixX<Scalar>::Identity(d, d)};
  }
};

// The same distribution in natural form: precision and precision * mean.
// The precision may be indefinite for intermediate factor products; validity
// is only checked when converting to moment form.
template <typename Scalar = double>
struct NaturalGaussianT {
  Eigen::MatrixX<Scalar> precision;
  Eigen::VectorX<Scalar> shift;

  Eigen::Index dim() const { return shift.size(); }

  static NaturalGaussianT standard(Eigen::Index d) {
    return {Eigen::MatrixX<Scalar>::Identity(d, d),
            Eigen::VectorX<Scalar>::Zero(d)};
  }
};

using MomentGaussian = MomentGaussianT<double>;
using NaturalGaussian = NaturalGaussianT<double>;

// Rank-1 Gaussian factor exp(-tau/2 (w.b)^2 + nu w.b) along a direction b.
// The direction lives with the owning point set, not the factor.
struct SiteFactor {
  double precision_1d = 0.0;  // tau
  double shift_1d = 0.0;      // nu
};

template <typename Derived>
void symmetrize(Eigen::MatrixBase<Derived>& m) {
  m = ((m + m.transpose()) * 0.5).eval();
}

namespace detail {

template <typename Scalar>
void check_symmetric(const Eigen::MatrixX<Scalar>& m, const char* what) {
  const Scalar scale = m.cwiseAbs().maxCoeff();
  const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > Scalar(1e-10) * (scale + Scalar(1))) {
    throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
  }
}

}  // namespace detail

// Moment form from natural form. Fails loudly if the precision is not
// positive definite; a failed factorization here means the EP state is
// invalid. Uses a Cholesky attempt rather than an eigendecomposition since
// this sits on the hot path.
template <typename Scalar>
MomentGaussianT<Scalar> to_moments(const NaturalGaussianT<Scalar>& g) {
  detail::check_symmetric(g.precision, "to_moments");
  Eigen::LLT<Eigen::MatrixX<Scalar>> llt(g.precision);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("to_moments: precision not positive definite");
  }
  MomentGaussianT<Scalar> out;
  out.covariance = llt.solve(
      Eigen::MatrixX<Scalar>::Identity(g.precision.rows(), g.precision.cols()));
  symmetrize(out.covariance);
  out.mean = out.covariance * g.shift;
  return out;
}

template <typename Scalar>
NaturalGaussianT<Scalar> to_natural(const MomentGaussianT<Scalar>& g) {
  detail::check_symmetric(g.covariance, "to_natural");
  Eigen::LLT<Eigen::MatrixX<Scalar>> llt(g.covariance);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("to_natural: covariance not positive definite");
  }
  NaturalGaussianT<Scalar> out;
  out.precision = llt.solve(
      Eigen::MatrixX<Scalar>::Identity(g.covariance.rows(), g.covariance.cols()));
  symmetrize(out.precision);
  out.shift = out.precision * g.mean;
  return out;
}

// Multiplies (sign +1) or divides (sign -1) a rank-1 site into a natural
// parameter Gaussian: precision +- tau b b^T, shift +- nu b. Division is how
// cavities are formed; the result may be indefinite.
template <typename Scalar, typename Derived>
NaturalGaussianT<Scalar> multiply_site(const NaturalGaussianT<Scalar>& g,
                                       const Eigen::MatrixBase<Derived>& b,
                                       const SiteFactor& s, int sign) {
  NaturalGaussianT<Scalar> out = g;
  const Scalar f = Scalar(sign);
  out.precision.noalias() += f * s.precision_1d * (b * b.transpose());
  symmetrize(out.precision);
  out.shift.noalias() += f * s.shift_1d * b;
  return out;
}

// In-place variant used by the state machines.
template <typename Scalar, typename Derived>
void multiply_site_inplace(NaturalGaussianT<Scalar>& g,
                           const Eigen::MatrixBase<Derived>& b,
                           const SiteFactor& s, int sign) {
  const Scalar f = Scalar(sign);
  g.precision.noalias() += f * s.precision_1d * (b * b.transpose());
  symmetrize(g.precision);
  g.shift.noalias() += f * s.shift_1d * b;
}

// One-dimensional marginal along a direction: (mean^T x, x^T Cov x).
template <typename Scalar, typename Derived>
std::pair<Scalar, Scalar> marginal_1d(const MomentGaussianT<Scalar>& g,
                                      const Eigen::MatrixBase<Derived>& x) {
  const Scalar m_u = g.mean.dot(x);
  const Scalar v_u = x.dot(g.covariance * x);
  const Scalar scale = x.squaredNorm() * g.covariance.diagonal().maxCoeff();
  if (!(v_u > Scalar(1e-14) * (scale + Scalar(1e-300)))) {
    throw DegenerateDirection("marginal_1d: direction carries no variance");
  }
  return {m_u, v_u};
}

}  // namespace vvm
