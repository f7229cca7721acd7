#pragma once

#include "salasso/types.hpp"

namespace salasso {

struct LassoFit {
  Vector beta;
  int n_iters = 0;          // coordinate sweeps performed
  double kkt_residual = 0;  // max stationarity violation at exit
  double objective = 0;     // (2n)^-1 ||y - X b||^2 + lambda sum_j w_j |b_j|
  bool converged = false;
};

double soft_threshold(double v, double t);             // throws NegativeThreshold
double soft_threshold_derivative(double v, double t);  // 1{|v| > t}, 0 at the kink

// Penalized objective at beta for the given weights and lambda.
double weighted_lasso_objective(const LinearDataset& ds, const Vector& beta,
                                const WeightVector& weights, double lambda);

// Max KKT violation: |g_j - lambda w_j sign(b_j)| on the support and
// max(0, |g_j| - lambda w_j) off it, where g = X^T (y - X b) / n.
double check_kkt(const LinearDataset& ds, const Vector& beta,
                 const WeightVector& weights, double lambda);

// Smallest lambda at which the all-zero vector is optimal:
// max_j |x_j^T y| / (n w_j). Throws ZeroWeightUnpenalized when some w_j = 0.
double lambda_max(const LinearDataset& ds, const WeightVector& weights);

// Cyclic coordinate descent with active-set inner sweeps. Stops when the
// KKT residual drops to cfg.tol; past cfg.max_iter sweeps it returns the
// best iterate with converged = false. No internal standardization.
LassoFit fit_weighted_lasso(const LinearDataset& ds, const WeightVector& weights,
                            double lambda, const SolverConfig& cfg = {},
                            const Vector* warm_start = nullptr);

}  // namespace salasso
