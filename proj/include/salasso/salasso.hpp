#pragma once

#include "salasso/prox.hpp"
#include "salasso/types.hpp"
#include "salasso/weights.hpp"

#include <optional>
#include <vector>

namespace salasso {

// Records of the alternating scheme: stage 0 is the unit-weight fit, stage
// t >= 1 refits with weights derived from stage t-1.
struct SalassoTrajectory {
  std::vector<Vector> beta;            // t = 0..T
  std::vector<WeightVector> weights;   // weights used at stage t (stage 0: ones)
  std::vector<double> objective;       // joint objective at (beta_t, w_t)
  std::vector<double> lambda;          // penalty level per stage
  std::vector<double> kkt_residual;
  std::vector<int> n_iters;
  double gamma = 1.0;
  std::optional<CovariateTau> tau;     // covariate variant: final weight map
  bool converged = true;               // all stage solves hit their tolerance

  const Vector& final_beta() const { return beta.back(); }
};

// Joint objective the alternation descends:
// (2n)^-1 ||y - X b||^2 + lambda [ sum_j w_j |b_j| - sum_j log g(w_j; gamma) ].
double salasso_objective(const LinearDataset& ds, const Vector& beta,
                         const WeightVector& weights, double lambda, double gamma);

// T weight refits after the unit-weight fit. lambda0 overrides the stage-0
// penalty (used when an earlier search already chose it); stages >= 1 use
// lambda. Weight rule chosen by the structure: none -> per-coordinate,
// group -> shared within group, covariate -> log-linear map in U.
SalassoTrajectory fit_salasso(const LinearDataset& ds, const StructureSpec& structure,
                              int T, double lambda, double gamma,
                              const SolverConfig& cfg = {},
                              std::optional<double> lambda0 = std::nullopt,
                              double cap = kDefaultWeightCap);

std::vector<double> default_lambda_grid(const LinearDataset& ds, int n_points = 50,
                                        double min_ratio = 1e-3);
std::vector<double> default_gamma_grid();  // 0.05, 0.10, ..., 1.00

struct CvResult {
  double lambda0_hat = 0.0;                 // stage-A choice for the unit-weight fit
  double lambda_hat = 0.0;
  double gamma_hat = 1.0;
  Matrix cv_error;                          // lambda x gamma, stage B
  std::vector<double> stage_a_error;        // per lambda
  std::vector<double> lambda_grid;
  std::vector<double> gamma_grid;
  std::vector<int> fold_of;                 // fold id per observation
};

// Two-stage k-fold search: stage A picks the unit-weight penalty on a 1-D
// grid; stage B scores (lambda, gamma) for the full alternation with stage 0
// pinned at that choice. Held-out squared errors are pooled over
// observations. Ties break to the smaller lambda, then smaller gamma, then
// first index. Throws FoldTooSmall when k < 2, a fold is empty, or a
// training complement has fewer than 2 points.
CvResult cross_validate(const LinearDataset& ds, const StructureSpec& structure,
                        const std::vector<double>& lambda_grid,
                        const std::vector<double>& gamma_grid, int k, int T,
                        const SolverConfig& cfg = {}, std::uint64_t seed = 0,
                        double cap = kDefaultWeightCap);

std::vector<int> assign_folds(Index n, int k, std::uint64_t seed);

}  // namespace salasso
