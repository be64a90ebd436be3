#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "vvm/gaussian.hpp"
#include "vvm/step_likelihood.hpp"

namespace vvm {

// Independent ground-truth computations used by tests and the synthetic
// posterior-mean study. Nothing here shares code with the EP / merge paths
// it is used to check.

struct SamplerConfig {
  enum class Method { self_normalized_importance, rejection };

  int n_samples = 200000;
  std::uint64_t seed = 1;
  Method method = Method::self_normalized_importance;
};

struct McEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd stderr_mean;
  double ess = 0.0;
};

// Posterior mean E[w | data] for the step-likelihood model, by Monte Carlo
// with prior proposals. Throws DegenerateWeights if the effective sample
// size drops below 100.
McEstimate posterior_mean_mc(const MomentGaussian& prior,
                             const std::vector<Eigen::VectorXd>& data,
                             const StepLikelihood& lik,
                             const SamplerConfig& cfg);

struct TiltQuadrature1D {
  double normalizer;
  double mean;
  double var;
};

// Quadrature moments of f(u) N(u; m, v), accurate to ~1e-10 relative.
TiltQuadrature1D tilt_moments_quadrature_1d(double m, double v,
                                            const StepLikelihood& lik);

// KL( f N / Z || N(matched) ) by quadrature; the oracle for the per-site
// divergence formula.
double divergence_quadrature_1d(const StepLikelihood& lik, double m, double v);

struct TiltQuadrature2D {
  double normalizer;
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

// Moments of a weighted-quadrant tilt of a bivariate Gaussian. weights are
// the factor levels on the (+,+), (+,-), (-,+), (-,-) quadrants. Computed by
// conditional decomposition with adaptive 1-D quadrature over the outer
// variable, which stays accurate for correlations arbitrarily close to 1.
TiltQuadrature2D tilt_moments_quadrature_2d(const Eigen::Vector2d& mu,
                                            const Eigen::Matrix2d& sigma,
                                            const std::array<double, 4>& weights);

}  // namespace vvm
