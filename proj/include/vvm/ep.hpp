#pragma once

#include <Eigen/Core>
#include <vector>

#include "vvm/gaussian.hpp"
#include "vvm/step_likelihood.hpp"

namespace vvm {

struct EpConfig {
  int max_sweeps = 5;
  double damping = 1.0;  // 1.0 = undamped
  double convergence_tol = 1e-6;
  double min_cavity_variance = 1e-12;

  void validate() const {
    if (max_sweeps < 1) throw ConfigError("EpConfig: max_sweeps must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) {
      throw ConfigError("EpConfig: damping must lie in (0, 1]");
    }
    if (!(convergence_tol > 0.0)) {
      throw ConfigError("EpConfig: convergence_tol must be positive");
    }
    if (!(min_cavity_variance > 0.0)) {
      throw ConfigError("EpConfig: min_cavity_variance must be positive");
    }
  }
};

struct EpResult {
  MomentGaussian surrogate;
  std::vector<SiteFactor> sites;
  std::vector<double> divergences;
  bool converged = false;
  int sweeps_used = 0;
};

// Expectation propagation over a point set with the residual as prior.
// Sites are swept in insertion order until the largest change in (tau, nu)
// drops below the tolerance. A collapsing cavity skips that site's update
// for the sweep and marks the run non-converged; an update that would break
// positive definiteness is retried at half damping up to 5 times.
EpResult run_ep(const NaturalGaussian& residual,
                const std::vector<Eigen::VectorXd>& points,
                const StepLikelihood& lik, const EpConfig& cfg,
                const std::vector<SiteFactor>* warm_start = nullptr);

// Single assumed-density-filtering update of a Gaussian posterior with one
// step-likelihood factor: the rank-1 mean shift and covariance downdate
// along x.
MomentGaussian adf_step(const MomentGaussian& state, const Eigen::VectorXd& x,
                        const StepLikelihood& lik);

struct Prediction {
  int label;             // in {-1, +1}; sign(0) defined as +1
  double prob_positive;  // eps + (1-2 eps) Phi(R(x))
};

Prediction predict(const MomentGaussian& q, const Eigen::VectorXd& x,
                   const StepLikelihood& lik);

}  // namespace vvm
