#include "salasso/prox.hpp"

#include "salasso/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace salasso {

double soft_threshold(double v, double t) {
  if (t < 0.0) throw NegativeThreshold("threshold is negative: " + std::to_string(t));
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double soft_threshold_derivative(double v, double t) {
  if (t < 0.0) throw NegativeThreshold("threshold is negative: " + std::to_string(t));
  return std::abs(v) > t ? 1.0 : 0.0;
}

namespace {

void check_weights(const LinearDataset& ds, const WeightVector& weights) {
  if (weights.values.size() != ds.p()) {
    throw DimensionMismatch("weight vector has " + std::to_string(weights.values.size()) +
                            " entries for " + std::to_string(ds.p()) + " features");
  }
  for (Index j = 0; j < weights.values.size(); ++j) {
    const double w = weights.values(j);
    if (!std::isfinite(w) || w < 0.0) {
      throw NonFiniteEntry("weight " + std::to_string(j) + " is invalid");
    }
  }
}

}  // namespace

double weighted_lasso_objective(const LinearDataset& ds, const Vector& beta,
                                const WeightVector& weights, double lambda) {
  const double rss = (ds.y - ds.X * beta).squaredNorm();
  double pen = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    // Capped weight with a zero coefficient contributes exactly nothing.
    if (beta(j) != 0.0) pen += weights.values(j) * std::abs(beta(j));
  }
  return rss / (2.0 * static_cast<double>(ds.n())) + lambda * pen;
}

double check_kkt(const LinearDataset& ds, const Vector& beta,
                 const WeightVector& weights, double lambda) {
  const double n = static_cast<double>(ds.n());
  Vector r = ds.y - ds.X * beta;
  Vector g;
  kernels::design_transpose_times(ds.X, r, g);
  g /= n;
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double lw = lambda * weights.values(j);
    double viol;
    if (beta(j) > 0.0) {
      viol = std::abs(g(j) - lw);
    } else if (beta(j) < 0.0) {
      viol = std::abs(g(j) + lw);
    } else {
      viol = std::max(0.0, std::abs(g(j)) - lw);
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

double lambda_max(const LinearDataset& ds, const WeightVector& weights) {
  check_weights(ds, weights);
  const double n = static_cast<double>(ds.n());
  double best = 0.0;
  for (Index j = 0; j < ds.p(); ++j) {
    const double w = weights.values(j);
    const double corr = std::abs(ds.X.col(j).dot(ds.y));
    if (w == 0.0) {
      if (corr > 0.0) {
        throw ZeroWeightUnpenalized("feature " + std::to_string(j) +
                                    " has zero weight; lambda_max is unbounded");
      }
      continue;
    }
    best = std::max(best, corr / (n * w));
  }
  return best;
}

LassoFit fit_weighted_lasso(const LinearDataset& ds, const WeightVector& weights,
                            double lambda, const SolverConfig& cfg,
                            const Vector* warm_start) {
  if (lambda < 0.0) throw NegativeLambda("lambda is negative: " + std::to_string(lambda));
  check_weights(ds, weights);
  validate_dataset(ds);

  const Index n = ds.n();
  const Index p = ds.p();
  const double nn = static_cast<double>(n);

  LassoFit fit;
  fit.beta = Vector::Zero(p);
  if (warm_start) {
    if (warm_start->size() != p) throw DimensionMismatch("warm start has wrong length");
    fit.beta = *warm_start;
  }

  Vector col_sq(p);
  Vector thresh(p);  // n * lambda * w_j, the threshold on x_j^T r + ||x_j||^2 b_j
  for (Index j = 0; j < p; ++j) {
    col_sq(j) = ds.X.col(j).squaredNorm();
    thresh(j) = nn * lambda * weights.values(j);
    if (col_sq(j) == 0.0) fit.beta(j) = 0.0;
  }

  Vector r = ds.y - ds.X * fit.beta;

  // One pass over the given index set; returns max |delta_j| * ||x_j||^2,
  // the scale on which the gradient can still move.
  auto sweep = [&](const std::vector<Index>& idx) {
    double moved = 0.0;
    for (Index j : idx) {
      if (col_sq(j) == 0.0) continue;
      const double old = fit.beta(j);
      const double z = ds.X.col(j).dot(r) + col_sq(j) * old;
      double bj = 0.0;
      if (z > thresh(j)) {
        bj = (z - thresh(j)) / col_sq(j);
      } else if (z < -thresh(j)) {
        bj = (z + thresh(j)) / col_sq(j);
      }
      if (bj != old) {
        r -= ds.X.col(j) * (bj - old);
        fit.beta(j) = bj;
        moved = std::max(moved, std::abs(bj - old) * col_sq(j));
      }
    }
    return moved;
  };

  std::vector<Index> all(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;

  const double active_tol = 0.1 * nn * cfg.tol;
  fit.converged = false;
  while (fit.n_iters < cfg.max_iter) {
    sweep(all);
    ++fit.n_iters;

    std::vector<Index> active;
    for (Index j = 0; j < p; ++j) {
      if (fit.beta(j) != 0.0) active.push_back(j);
    }
    while (fit.n_iters < cfg.max_iter && !active.empty()) {
      const double moved = sweep(active);
      ++fit.n_iters;
      if (moved <= active_tol) break;
    }

    // Fresh residual before the optimality check stops drift from the
    // incremental updates above.
    r = ds.y - ds.X * fit.beta;
    fit.kkt_residual = check_kkt(ds, fit.beta, weights, lambda);
    if (fit.kkt_residual <= cfg.tol) {
      fit.converged = true;
      break;
    }
  }

  fit.objective = weighted_lasso_objective(ds, fit.beta, weights, lambda);
  return fit;
}

}  // namespace salasso
