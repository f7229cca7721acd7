#pragma once

#include "salasso/types.hpp"

namespace salasso {

// Fitted parameters of the log-linear weight map w_j = exp(tau0 + u_j' tau1),
// constrained to the box [box_lo, box_hi] per coordinate.
struct CovariateTau {
  double tau0 = 0.0;
  Vector tau1;
  double box_lo = -20.0;
  double box_hi = 20.0;
  bool converged = false;
  double objective = 0.0;  // value at the returned point
  int n_iters = 0;

  double weight_at(const Eigen::Ref<const Vector>& u) const {
    return std::exp(tau0 + tau1.dot(u));
  }
};

struct CovariateWeightResult {
  WeightVector weights;
  CovariateTau tau;
};

// Group rule: shared weight mean(|beta| over the group)^(-gamma), capped;
// an all-zero group gets the cap.
WeightVector update_weights_group(const Vector& beta, const Partition& partition,
                                  double gamma, double cap = kDefaultWeightCap);

// Per-coordinate rule |beta_j|^(-gamma), capped.
WeightVector update_weights_unstructured(const Vector& beta, double gamma,
                                         double cap = kDefaultWeightCap);

// Empirical weight-fitting objective for the covariate rule:
//   L(tau) = p^-1 sum_j [ f_j m_j - log g(f_j; gamma) ],  f_j = exp(tau0 + u_j' tau1)
// where m_j = |beta_j| and log g(f) = f^(1-1/gamma)/(1-1/gamma), or log f at
// gamma = 1. tau packs (tau0, tau1).
double covariate_objective(const Vector& tau, const Matrix& U, const Vector& abs_beta,
                           double gamma);
Vector covariate_gradient(const Vector& tau, const Matrix& U, const Vector& abs_beta,
                          double gamma);

// Minimizes the objective above by projected Newton steps with backtracking
// (projected gradient as fallback). Non-convergence is reported through
// tau.converged, never by weakening the returned point.
CovariateWeightResult update_weights_covariate(const Vector& beta, const Matrix& U,
                                               double gamma, double box_lo = -20.0,
                                               double box_hi = 20.0,
                                               double cap = kDefaultWeightCap,
                                               const CovariateTau* warm = nullptr);

// Same optimizer applied to precomputed magnitudes (used by the large-p
// limit where m_j is an expected magnitude rather than |beta_j|).
CovariateWeightResult fit_covariate_tau(const Vector& abs_beta, const Matrix& U,
                                        double gamma, double box_lo = -20.0,
                                        double box_hi = 20.0,
                                        double cap = kDefaultWeightCap,
                                        const CovariateTau* warm = nullptr);

void check_gamma(double gamma);  // throws GammaOutOfRange unless 0 < gamma <= 1

}  // namespace salasso
