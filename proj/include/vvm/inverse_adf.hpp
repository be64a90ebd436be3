#pragma once

#include <Eigen/Core>

#include "vvm/gaussian.hpp"
#include "vvm/step_likelihood.hpp"

namespace vvm {

struct InverseAdfResult {
  double m_h;    // recovered prior mean along the direction
  double v_h;    // recovered prior variance
  double z_hat;  // root of the margin equation
  double h;      // hazard at the root
};

// Inverse of the 1-D step-likelihood projection: given post-update moments
// (m_new, v_new), recover the pre-update Gaussian moments by solving the
// scalar margin equation for z. Throws RootNotFound when the iteration
// budget is exhausted and NoValidRoot when no root reproduces the inputs
// under the forward map (for example eps = 0 with m_new <= 0, or a target
// whose standardized margin no prior can reach).
InverseAdfResult inverse_adf(double m_new, double v_new,
                             const StepLikelihood& lik);

// Full-dimensional prior recovery: the rank-1 structure of the update makes
// the d-dimensional inversion follow from the 1-D solution along x. The
// forward adf_step of the result reproduces the target moments.
MomentGaussian inverse_adf_lift(const MomentGaussian& target,
                                const Eigen::VectorXd& x,
                                const StepLikelihood& lik);

}  // namespace vvm
