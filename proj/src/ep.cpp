#include "vvm/ep.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "vvm/normal.hpp"

namespace vvm {

namespace {

struct Marginal {
  double m_q;
  double v_q;
};

Marginal project(const Eigen::VectorXd& mean, const Eigen::VectorXd& vb,
                 const Eigen::VectorXd& b) {
  return {mean.dot(b), b.dot(vb)};
}

// Exact rebuild of the surrogate from natural parameters. Purges the drift
// accumulated by the incremental rank-1 updates.
MomentGaussian rebuild(const NaturalGaussian& residual,
                       const std::vector<Eigen::VectorXd>& points,
                       const std::vector<SiteFactor>& sites) {
  NaturalGaussian total = residual;
  for (std::size_t i = 0; i < points.size(); ++i) {
    multiply_site_inplace(total, points[i], sites[i], +1);
  }
  return to_moments(total);
}

}  // namespace

EpResult run_ep(const NaturalGaussian& residual,
                const std::vector<Eigen::VectorXd>& points,
                const StepLikelihood& lik, const EpConfig& cfg,
                const std::vector<SiteFactor>* warm_start) {
  cfg.validate();
  const std::size_t n = points.size();
  EpResult res;
  res.sites.assign(n, SiteFactor{});
  if (warm_start) {
    if (warm_start->size() != n) {
      throw ConfigError("run_ep: warm start size mismatch");
    }
    res.sites = *warm_start;
  }
  for (const auto& p : points) {
    if (p.squaredNorm() == 0.0) {
      throw DegenerateDirection("run_ep: zero point in cache");
    }
  }

  // Current q in moment form, maintained incrementally.
  MomentGaussian q = rebuild(residual, points, res.sites);
  Eigen::MatrixXd& V = q.covariance;
  Eigen::VectorXd& m = q.mean;

  bool clean_pass = false;
  int sweep = 0;
  for (; sweep < cfg.max_sweeps && !clean_pass; ++sweep) {
    double max_delta = 0.0;
    bool skipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::VectorXd& b = points[i];
      const Eigen::VectorXd u = V * b;
      const auto [m_q, v_q] = project(m, u, b);
      if (!(v_q > 0.0)) {
        skipped = true;
        continue;
      }
      const double cav_prec = 1.0 / v_q - res.sites[i].precision_1d;
      if (!(cav_prec > 0.0) || 1.0 / cav_prec <= cfg.min_cavity_variance ||
          1.0 / cav_prec >= 1.0 / cfg.min_cavity_variance) {
        // Cavity collapse: inconsistent site, skip this sweep.
        skipped = true;
        continue;
      }
      const double v_cav = 1.0 / cav_prec;
      const double m_cav = v_cav * (m_q / v_q - res.sites[i].shift_1d);

      const Tilt1D tilt = adf_moments(lik, m_cav, v_cav);
      const SiteFactor target = site_from_tilt(m_cav, v_cav, tilt);

      double step = cfg.damping;
      bool applied = false;
      for (int attempt = 0; attempt < 6; ++attempt) {
        const double tau_new =
            res.sites[i].precision_1d +
            step * (target.precision_1d - res.sites[i].precision_1d);
        const double nu_new = res.sites[i].shift_1d +
                              step * (target.shift_1d - res.sites[i].shift_1d);
        const double d_tau = tau_new - res.sites[i].precision_1d;
        const double d_nu = nu_new - res.sites[i].shift_1d;
        const double denom = 1.0 + d_tau * v_q;
        if (denom <= 1e-12) {
          step *= 0.5;  // would break positive definiteness; damp and retry
          continue;
        }
        m.noalias() += u * ((d_nu - d_tau * m_q) / denom);
        V.noalias() -= (d_tau / denom) * (u * u.transpose());
        symmetrize(V);
        res.sites[i].precision_1d = tau_new;
        res.sites[i].shift_1d = nu_new;
        max_delta = std::max({max_delta, std::abs(d_tau), std::abs(d_nu)});
        applied = true;
        break;
      }
      if (!applied) skipped = true;
    }
    clean_pass = !skipped && max_delta < cfg.convergence_tol;
  }
  res.converged = clean_pass;
  res.sweeps_used = sweep;

  // Final exact reconstruction and the divergence cache against it.
  res.surrogate = rebuild(residual, points, res.sites);
  res.divergences.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& b = points[i];
    const Eigen::VectorXd u = res.surrogate.covariance * b;
    const auto [m_q, v_q] = project(res.surrogate.mean, u, b);
    const double cav_prec =
        v_q > 0.0 ? 1.0 / v_q - res.sites[i].precision_1d : -1.0;
    if (!(cav_prec > 0.0) || 1.0 / cav_prec <= cfg.min_cavity_variance) {
      res.divergences[i] = std::numeric_limits<double>::infinity();
      res.converged = false;
      continue;
    }
    const double v_cav = 1.0 / cav_prec;
    const double m_cav = v_cav * (m_q / v_q - res.sites[i].shift_1d);
    const double log_z =
        step_log_partition(m_cav / std::sqrt(v_cav), lik.epsilon);
    res.divergences[i] = site_divergence(lik, m_cav, v_cav, m_q, v_q, log_z);
  }
  return res;
}

MomentGaussian adf_step(const MomentGaussian& state, const Eigen::VectorXd& x,
                        const StepLikelihood& lik) {
  const auto [m_u, v_u] = marginal_1d(state, x);
  const Tilt1D tilt = adf_moments(lik, m_u, v_u);
  const Eigen::VectorXd u = state.covariance * x;
  MomentGaussian out;
  out.mean = state.mean + u * (tilt.h / std::sqrt(v_u));
  out.covariance =
      state.covariance - (tilt.h * (tilt.h + tilt.z) / v_u) * (u * u.transpose());
  symmetrize(out.covariance);
  return out;
}

Prediction predict(const MomentGaussian& q, const Eigen::VectorXd& x,
                   const StepLikelihood& lik) {
  const double m_u = q.mean.dot(x);
  const double v_u = std::max(x.dot(q.covariance * x),
                              std::numeric_limits<double>::min());
  const double r = m_u / std::sqrt(v_u);
  Prediction p;
  p.label = m_u >= 0.0 ? +1 : -1;
  p.prob_positive = lik.epsilon + (1.0 - 2.0 * lik.epsilon) * norm_cdf(r);
  return p;
}

}  // namespace vvm
