#include "vvm/oracle.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "vvm/errors.hpp"
#include "vvm/normal.hpp"
#include "vvm/quadrature.hpp"
#include "vvm/rng.hpp"

namespace vvm {

namespace {

// Partial moments of X ~ N(a, s^2) restricted to one side of zero.
struct PartialMoments {
  double p;
  double m1;
  double m2;
};

PartialMoments side_moments(double a, double s, int side) {
  const double alpha = a / s;
  const double phi = norm_pdf(alpha);
  if (side > 0) {
    const double cdf = norm_cdf(alpha);
    return {cdf, a * cdf + s * phi, (a * a + s * s) * cdf + a * s * phi};
  }
  const double cdf = norm_cdf(-alpha);
  return {cdf, a * cdf - s * phi, (a * a + s * s) * cdf - a * s * phi};
}

}  // namespace

McEstimate posterior_mean_mc(const MomentGaussian& prior,
                             const std::vector<Eigen::VectorXd>& data,
                             const StepLikelihood& lik,
                             const SamplerConfig& cfg) {
  if (cfg.n_samples < 1000) {
    throw ConfigError("posterior_mean_mc: n_samples must be at least 1000");
  }
  const Eigen::Index d = prior.dim();
  Eigen::LLT<Eigen::MatrixXd> llt(prior.covariance);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("posterior_mean_mc: prior covariance");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  Rng rng(cfg.seed);

  const double log_right = std::log1p(-lik.epsilon);
  const double log_wrong = lik.epsilon > 0.0
                               ? std::log(lik.epsilon)
                               : -std::numeric_limits<double>::infinity();

  std::vector<Eigen::VectorXd> draws;
  std::vector<double> logw;
  draws.reserve(cfg.n_samples);
  logw.reserve(cfg.n_samples);
  Eigen::VectorXd z(d);
  for (int s = 0; s < cfg.n_samples; ++s) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
    Eigen::VectorXd w = prior.mean + chol * z;
    double lw = 0.0;
    for (const auto& x : data) {
      lw += (w.dot(x) > 0.0) ? log_right : log_wrong;
      if (std::isinf(lw)) break;
    }
    draws.push_back(std::move(w));
    logw.push_back(lw);
  }

  if (cfg.method == SamplerConfig::Method::rejection) {
    // Accept with probability prod f / (1-eps)^T; exact posterior samples.
    const double top = log_right * static_cast<double>(data.size());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd acc2 = Eigen::VectorXd::Zero(d);
    long n_acc = 0;
    for (int s = 0; s < cfg.n_samples; ++s) {
      if (std::log(rng.uniform()) < logw[s] - top) {
        acc += draws[s];
        acc2 += draws[s].cwiseAbs2();
        ++n_acc;
      }
    }
    if (n_acc < 100) {
      throw DegenerateWeights("posterior_mean_mc: too few accepted samples");
    }
    McEstimate out;
    out.mean = acc / double(n_acc);
    out.stderr_mean =
        ((acc2 / double(n_acc) - out.mean.cwiseAbs2()).cwiseMax(0.0) /
         double(n_acc))
            .cwiseSqrt();
    out.ess = double(n_acc);
    return out;
  }

  // Self-normalized importance estimate.
  const double lmax = *std::max_element(logw.begin(), logw.end());
  if (std::isinf(lmax)) {
    throw DegenerateWeights("posterior_mean_mc: all proposals infeasible");
  }
  double wsum = 0.0, w2sum = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int s = 0; s < cfg.n_samples; ++s) {
    const double w = std::exp(logw[s] - lmax);
    wsum += w;
    w2sum += w * w;
    mean += w * draws[s];
  }
  const double ess = wsum * wsum / w2sum;
  if (ess < 100.0) {
    throw DegenerateWeights("posterior_mean_mc: effective sample size < 100");
  }
  mean /= wsum;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (int s = 0; s < cfg.n_samples; ++s) {
    const double wn = std::exp(logw[s] - lmax) / wsum;
    var += (wn * wn) * (draws[s] - mean).cwiseAbs2();
  }
  McEstimate out;
  out.mean = std::move(mean);
  out.stderr_mean = var.cwiseSqrt();
  out.ess = ess;
  return out;
}

TiltQuadrature1D tilt_moments_quadrature_1d(double m, double v,
                                            const StepLikelihood& lik) {
  if (!(v > 0.0)) throw InvalidVariance("tilt_moments_quadrature_1d");
  const double s = std::sqrt(v);
  const double lo = m - 14.0 * s;
  const double hi = m + 14.0 * s;
  auto dens = [&](double u) {
    return lik.value(u) * norm_pdf((u - m) / s) / s;
  };
  auto piece = [&](auto&& g, double a, double b) {
    if (!(b > a)) return 0.0;
    return integrate([&](double u) { return g(u) * dens(u); }, a, b, 1e-13);
  };
  auto total = [&](auto&& g) {
    double r = 0.0;
    r += piece(g, lo, std::min(0.0, hi));
    r += piece(g, std::max(0.0, lo), hi);
    return r;
  };
  const double z0 = total([](double) { return 1.0; });
  const double z1 = total([](double u) { return u; });
  const double z2 = total([](double u) { return u * u; });
  TiltQuadrature1D out;
  out.normalizer = z0;
  out.mean = z1 / z0;
  out.var = z2 / z0 - out.mean * out.mean;
  return out;
}

double divergence_quadrature_1d(const StepLikelihood& lik, double m,
                                double v) {
  const TiltQuadrature1D t = tilt_moments_quadrature_1d(m, v, lik);
  const double s = std::sqrt(v);
  const double sq = std::sqrt(t.var);
  const double lo = m - 14.0 * s;
  const double hi = m + 14.0 * s;
  auto integrand = [&](double u) {
    const double p = lik.value(u) * norm_pdf((u - m) / s) / (s * t.normalizer);
    if (p <= 0.0) return 0.0;
    const double logq = -0.5 * std::log(2.0 * std::numbers::pi * t.var) -
                        0.5 * (u - t.mean) * (u - t.mean) / t.var;
    return p * (std::log(p) - logq);
  };
  double r = 0.0;
  (void)sq;
  if (lo < 0.0) r += integrate(integrand, lo, std::min(0.0, hi), 1e-13);
  if (hi > 0.0) r += integrate(integrand, std::max(0.0, lo), hi, 1e-13);
  return r;
}

TiltQuadrature2D tilt_moments_quadrature_2d(
    const Eigen::Vector2d& mu, const Eigen::Matrix2d& sigma,
    const std::array<double, 4>& weights) {
  const double s1 = std::sqrt(sigma(0, 0));
  const double s2 = std::sqrt(sigma(1, 1));
  const double rho = sigma(0, 1) / (s1 * s2);
  const double s_cond = s2 * std::sqrt(std::max(1.0 - rho * rho, 1e-30));
  const double beta = rho * s2 / s1;

  // Accumulated raw moments 1, u1, u2, u1^2, u1 u2, u2^2.
  double acc[6] = {0, 0, 0, 0, 0, 0};

  const int sides[4][2] = {{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}};
  for (int q = 0; q < 4; ++q) {
    const int sgn1 = sides[q][0];
    const int sgn2 = sides[q][1];
    const double w = weights[q];
    if (w == 0.0) continue;

    double lo = mu[0] - 14.0 * s1;
    double hi = mu[0] + 14.0 * s1;
    if (sgn1 > 0) {
      lo = std::max(lo, 0.0);
    } else {
      hi = std::min(hi, 0.0);
    }
    if (!(hi > lo)) continue;

    auto add = [&](double a, double b) {
      if (!(b > a)) return;
      for (int k = 0; k < 6; ++k) {
        auto f = [&](double u1) {
          const double n1 = norm_pdf((u1 - mu[0]) / s1) / s1;
          const double a2 = mu[1] + beta * (u1 - mu[0]);
          const PartialMoments pm = side_moments(a2, s_cond, sgn2);
          switch (k) {
            case 0: return n1 * pm.p;
            case 1: return n1 * pm.p * u1;
            case 2: return n1 * pm.m1;
            case 3: return n1 * pm.p * u1 * u1;
            case 4: return n1 * pm.m1 * u1;
            default: return n1 * pm.m2;
          }
        };
        acc[k] += w * integrate(f, a, b, 1e-13);
      }
    };

    // Split at the point where the conditional mean of u2 crosses zero; for
    // strongly correlated inputs the inner probability turns over sharply
    // there.
    if (std::abs(beta) > 1e-12) {
      const double t2 = mu[0] - mu[1] / beta;
      if (t2 > lo && t2 < hi) {
        add(lo, t2);
        add(t2, hi);
      } else {
        add(lo, hi);
      }
    } else {
      add(lo, hi);
    }
  }

  TiltQuadrature2D out;
  out.normalizer = acc[0];
  out.mean << acc[1] / acc[0], acc[2] / acc[0];
  out.cov(0, 0) = acc[3] / acc[0] - out.mean[0] * out.mean[0];
  out.cov(0, 1) = acc[4] / acc[0] - out.mean[0] * out.mean[1];
  out.cov(1, 0) = out.cov(0, 1);
  out.cov(1, 1) = acc[5] / acc[0] - out.mean[1] * out.mean[1];
  return out;
}

}  // namespace vvm
