#pragma once

#include "salasso/types.hpp"
#include "salasso/weights.hpp"

#include <vector>

namespace salasso {

struct AmpConfig {
  double tol = 1e-9;              // relative change in beta between passes
  int max_iter = 500;
  double divergence_factor = 1e6; // tau_hat beyond this multiple of tau_0 aborts
};

struct AmpResult {
  Vector beta;
  Vector resid;                    // corrected residual at the fixed point
  std::vector<double> tau_sequence;
  double tau_hat = 0.0;            // ||resid|| / sqrt(n)
  double active_mean = 0.0;        // <eta'> at the fixed point
  double alpha = 0.0;
  int n_iters = 0;
  bool converged = false;
};

// Iteration with per-feature thresholds theta_j = alpha * tau_hat * omega_j.
// omega == ones gives the plain variant; capped entries pin coordinates to
// zero. Throws Diverged / MaxIterationsExceeded.
AmpResult amp_core(const LinearDataset& ds, const Vector& omega, double alpha,
                   const AmpConfig& cfg = {}, double cap = kDefaultWeightCap);

AmpResult amp_lasso(const LinearDataset& ds, double alpha, const AmpConfig& cfg = {});

// Per-coordinate penalty implied by the fixed point, on the scale of the
// (2n)^-1 residual objective: alpha tau_hat (1 - active/delta) / n.
double amp_implied_lambda(const AmpResult& r, Index n, Index p);

// Weight maps computed from an AMP iterate; these defer to the finite-p
// update rules so both solvers share one definition.
WeightVector amp_weights_group(const Vector& beta, const Partition& partition,
                               double gamma, double cap = kDefaultWeightCap);
CovariateWeightResult amp_weights_covariate(const Vector& beta, const Matrix& U,
                                            double gamma, double box_lo = -20.0,
                                            double box_hi = 20.0,
                                            double cap = kDefaultWeightCap);

// Two-stage runs: plain pass, weight update from its output, weighted pass.
struct AmpStages {
  AmpResult plain;
  AmpResult weighted;
  WeightVector weights;
};
AmpStages amp_salasso_group(const LinearDataset& ds, const Partition& partition,
                            double alpha, double gamma, const AmpConfig& cfg = {},
                            double cap = kDefaultWeightCap);
AmpStages amp_salasso_covariate(const LinearDataset& ds, const Matrix& U,
                                double alpha, double gamma,
                                const AmpConfig& cfg = {}, double box_lo = -20.0,
                                double box_hi = 20.0,
                                double cap = kDefaultWeightCap);

}  // namespace salasso
