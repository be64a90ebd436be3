#pragma once

#include <Eigen/Core>
#include <vector>

#include "vvm/gaussian.hpp"
#include "vvm/step_likelihood.hpp"

namespace vvm {

// Exact moments of f(b1; w) f(b2; w) cavity(w): the product of two step
// factors with a Gaussian, as needed when two cached points are merged.
struct BivariateTilt {
  double normalizer;          // integral of the product
  Eigen::VectorXd mean;       // d-dimensional tilted mean
  Eigen::MatrixXd covariance; // d-dimensional tilted covariance
};

// General path: project onto (b1.w, b2.w), weight the four sign quadrants by
// the step levels, take quadrant-truncated bivariate normal moments with the
// probabilities from Genz's quadrature, and lift back through the
// linear-Gaussian conditional identity. Directions whose projected
// correlation reaches 1 in magnitude collapse to a one-dimensional piecewise
// tilt along the dominant direction.
BivariateTilt bivariate_tilt_moments(const MomentGaussian& cavity,
                                     const Eigen::VectorXd& b1,
                                     const Eigen::VectorXd& b2,
                                     const StepLikelihood& lik);

// Moments of a piecewise-constant factor with the given sorted cut points
// and one level per piece, against N(m, v). Closed form; used by the
// parallel fallback and by tests.
struct PiecewiseTilt {
  double normalizer;
  double mean;
  double var;
};

PiecewiseTilt piecewise_tilt_1d(const std::vector<double>& cuts,
                                const std::vector<double>& levels, double m,
                                double v);

}  // namespace vvm
