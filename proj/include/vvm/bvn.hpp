#pragma once

namespace vvm {

// Upper-quadrant probability P(Z1 > h, Z2 > k) for a standard bivariate
// normal with correlation rho, by Genz's quadrature. Accurate to about
// 1e-15 for |rho| <= 0.925 and 1e-10 beyond.
double bvn_upper(double h, double k, double rho);

// Restricted raw moments of the same quadrant:
//   p   = P(Z1 > h, Z2 > k)
//   m1  = E[Z1 ; quadrant],  m2  = E[Z2 ; quadrant]
//   x11 = E[Z1^2 ; quadrant], x12 = E[Z1 Z2 ; quadrant], x22 = E[Z2^2 ; ...]
// Closed forms in terms of the quadrant probability, the univariate normal
// pdf/cdf and the conditional tail arguments.
struct QuadrantMoments {
  double p;
  double m1;
  double m2;
  double x11;
  double x12;
  double x22;
};

QuadrantMoments quadrant_moments_upper(double h, double k, double rho);

}  // namespace vvm
