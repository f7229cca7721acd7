#include "salasso/amp.hpp"

#include "salasso/kernels.hpp"

#include <cmath>

namespace salasso {

AmpResult amp_core(const LinearDataset& ds, const Vector& omega, double alpha,
                   const AmpConfig& cfg, double cap) {
  validate_dataset(ds);
  if (omega.size() != ds.p()) {
    throw DimensionMismatch("omega has " + std::to_string(omega.size()) +
                            " entries for " + std::to_string(ds.p()) + " features");
  }
  if (!(alpha > 0.0)) throw NegativeThreshold("alpha must be positive");

  const Index n = ds.n();
  const Index p = ds.p();
  const double delta = static_cast<double>(n) / static_cast<double>(p);

  AmpResult out;
  out.alpha = alpha;
  out.beta = Vector::Zero(p);
  out.resid = ds.y;
  out.tau_hat = ds.y.norm() / std::sqrt(static_cast<double>(n));
  out.tau_sequence.push_back(out.tau_hat);
  const double tau0 = out.tau_hat;

  Vector omega_capped(p);
  for (Index j = 0; j < p; ++j) omega_capped(j) = std::min(omega(j), cap);

  Vector s(p), theta(p), beta_new(p), xb(n);
  double active = 0.0;
  for (int t = 0; t < cfg.max_iter; ++t) {
    // Effective observation s = X^T e + beta; its empirical law tracks
    // beta + tau N(0,1) along the iteration.
    kernels::design_transpose_times(ds.X, out.resid, s);
    s += out.beta;
    theta = (alpha * out.tau_hat) * omega_capped;
    kernels::soft_threshold_vec(s, theta, beta_new);
    active = kernels::mean_active(s, theta);

    kernels::design_times(ds.X, beta_new, xb);
    // Corrected residual: the memory term keeps s Gaussian around beta.
    out.resid = ds.y - xb + (active / delta) * out.resid;
    out.tau_hat = out.resid.norm() / std::sqrt(static_cast<double>(n));
    out.tau_sequence.push_back(out.tau_hat);
    ++out.n_iters;

    const double change = (beta_new - out.beta).norm();
    const double scale = std::max(1.0, out.beta.norm());
    out.beta = beta_new;
    out.active_mean = active;

    if (out.tau_hat > cfg.divergence_factor * std::max(tau0, 1e-300)) {
      throw Diverged("tau_hat grew to " + std::to_string(out.tau_hat) +
                     " from " + std::to_string(tau0));
    }
    if (change <= cfg.tol * scale) {
      out.converged = true;
      return out;
    }
  }
  throw MaxIterationsExceeded("no fixed point after " + std::to_string(cfg.max_iter) +
                              " iterations");
}

AmpResult amp_lasso(const LinearDataset& ds, double alpha, const AmpConfig& cfg) {
  return amp_core(ds, Vector::Ones(ds.p()), alpha, cfg);
}

double amp_implied_lambda(const AmpResult& r, Index n, Index p) {
  const double delta = static_cast<double>(n) / static_cast<double>(p);
  return r.alpha * r.tau_hat * (1.0 - r.active_mean / delta) /
         static_cast<double>(n);
}

WeightVector amp_weights_group(const Vector& beta, const Partition& partition,
                               double gamma, double cap) {
  return update_weights_group(beta, partition, gamma, cap);
}

CovariateWeightResult amp_weights_covariate(const Vector& beta, const Matrix& U,
                                            double gamma, double box_lo,
                                            double box_hi, double cap) {
  return update_weights_covariate(beta, U, gamma, box_lo, box_hi, cap);
}

AmpStages amp_salasso_group(const LinearDataset& ds, const Partition& partition,
                            double alpha, double gamma, const AmpConfig& cfg,
                            double cap) {
  AmpStages out;
  out.plain = amp_lasso(ds, alpha, cfg);
  out.weights = amp_weights_group(out.plain.beta, partition, gamma, cap);
  out.weighted = amp_core(ds, out.weights.values, alpha, cfg, cap);
  return out;
}

AmpStages amp_salasso_covariate(const LinearDataset& ds, const Matrix& U,
                                double alpha, double gamma, const AmpConfig& cfg,
                                double box_lo, double box_hi, double cap) {
  AmpStages out;
  out.plain = amp_lasso(ds, alpha, cfg);
  out.weights = amp_weights_covariate(out.plain.beta, U, gamma, box_lo, box_hi, cap)
                    .weights;
  out.weighted = amp_core(ds, out.weights.values, alpha, cfg, cap);
  return out;
}

}  // namespace salasso
