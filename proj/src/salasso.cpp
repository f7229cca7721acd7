#include "salasso/salasso.hpp"

#include "salasso/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace salasso {

namespace {

constexpr double kGammaOneEps = 1e-9;

double log_g(double w, double gamma) {
  if (std::abs(1.0 - gamma) < kGammaOneEps) return std::log(w);
  const double a = 1.0 - 1.0 / gamma;
  return std::pow(w, a) / a;
}

}  // namespace

double salasso_objective(const LinearDataset& ds, const Vector& beta,
                         const WeightVector& weights, double lambda, double gamma) {
  check_gamma(gamma);
  const double rss = (ds.y - ds.X * beta).squaredNorm();
  double pen = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double w = weights.values(j);
    if (beta(j) != 0.0) pen += w * std::abs(beta(j));
    pen -= log_g(w, gamma);
  }
  return rss / (2.0 * static_cast<double>(ds.n())) + lambda * pen;
}

namespace {

void check_structure(const LinearDataset& ds, const StructureSpec& structure) {
  if (const auto* g = std::get_if<GroupStructure>(&structure)) {
    validate_partition(g->partition, ds.p());
  }
  if (const auto* c = std::get_if<CovariateStructure>(&structure)) {
    if (c->U.rows() != ds.p()) {
      throw DimensionMismatch("covariate matrix has " + std::to_string(c->U.rows()) +
                              " rows for " + std::to_string(ds.p()) + " features");
    }
  }
}

SalassoTrajectory start_trajectory(const LinearDataset& ds, const LassoFit& fit0,
                                   double lambda0, double gamma, double cap) {
  SalassoTrajectory traj;
  traj.gamma = gamma;
  WeightVector ones{Vector::Ones(ds.p()), cap};
  traj.beta.push_back(fit0.beta);
  traj.weights.push_back(ones);
  traj.lambda.push_back(lambda0);
  traj.objective.push_back(salasso_objective(ds, fit0.beta, ones, lambda0, gamma));
  traj.kkt_residual.push_back(fit0.kkt_residual);
  traj.n_iters.push_back(fit0.n_iters);
  traj.converged = fit0.converged;
  return traj;
}

// Stages 1..T appended to a trajectory that already holds stage 0.
void refit_stages(SalassoTrajectory& traj, const LinearDataset& ds,
                  const StructureSpec& structure, int T, double lambda,
                  double gamma, const SolverConfig& cfg, double cap) {
  const CovariateTau* warm_tau = nullptr;
  for (int t = 1; t <= T; ++t) {
    WeightVector w;
    if (std::holds_alternative<NoStructure>(structure)) {
      w = update_weights_unstructured(traj.beta.back(), gamma, cap);
    } else if (const auto* g = std::get_if<GroupStructure>(&structure)) {
      w = update_weights_group(traj.beta.back(), g->partition, gamma, cap);
    } else {
      const auto& c = std::get<CovariateStructure>(structure);
      CovariateWeightResult cw = update_weights_covariate(traj.beta.back(), c.U, gamma,
                                                          -20.0, 20.0, cap, warm_tau);
      w = cw.weights;
      traj.tau = cw.tau;
      warm_tau = &*traj.tau;
      traj.converged = traj.converged && cw.tau.converged;
    }

    const LassoFit fit = fit_weighted_lasso(ds, w, lambda, cfg, &traj.beta.back());
    traj.beta.push_back(fit.beta);
    traj.weights.push_back(w);
    traj.lambda.push_back(lambda);
    traj.objective.push_back(salasso_objective(ds, fit.beta, w, lambda, gamma));
    traj.kkt_residual.push_back(fit.kkt_residual);
    traj.n_iters.push_back(fit.n_iters);
    traj.converged = traj.converged && fit.converged;
  }
}

}  // namespace

SalassoTrajectory fit_salasso(const LinearDataset& ds, const StructureSpec& structure,
                              int T, double lambda, double gamma,
                              const SolverConfig& cfg, std::optional<double> lambda0,
                              double cap) {
  check_gamma(gamma);
  if (T < 0) throw DimensionMismatch("number of refits must be nonnegative");
  check_structure(ds, structure);

  const double l0 = lambda0.value_or(lambda);
  WeightVector ones{Vector::Ones(ds.p()), cap};
  const LassoFit fit0 = fit_weighted_lasso(ds, ones, l0, cfg);
  SalassoTrajectory traj = start_trajectory(ds, fit0, l0, gamma, cap);
  refit_stages(traj, ds, structure, T, lambda, gamma, cfg, cap);
  return traj;
}

std::vector<double> default_lambda_grid(const LinearDataset& ds, int n_points,
                                        double min_ratio) {
  if (n_points < 1) throw EmptyGrid("lambda grid needs at least one point");
  WeightVector ones{Vector::Ones(ds.p()), kDefaultWeightCap};
  const double top = lambda_max(ds, ones);
  if (top <= 0.0) return std::vector<double>(static_cast<std::size_t>(n_points), 0.0);
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  if (n_points == 1) {
    grid[0] = top;
    return grid;
  }
  const double lo = std::log(top * min_ratio), hi = std::log(top);
  for (int i = 0; i < n_points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(hi + (lo - hi) * static_cast<double>(i) / static_cast<double>(n_points - 1));
  }
  return grid;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
  return grid;
}

std::vector<int> assign_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw FoldTooSmall("need at least 2 folds, got " + std::to_string(k));
  if (static_cast<Index>(k) > n) throw FoldTooSmall("more folds than observations");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  RandomStream stream(seed, make_stream(StreamTag::folds));
  stream.shuffle(perm);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (Index t = 0; t < n; ++t) {
    fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])] =
        static_cast<int>(t % k);
  }
  return fold_of;
}

namespace {

struct FoldSplit {
  LinearDataset train;
  Matrix x_test;
  Vector y_test;
};

FoldSplit split_fold(const LinearDataset& ds, const std::vector<int>& fold_of, int fold) {
  FoldSplit out;
  std::vector<Index> train_rows, test_rows;
  for (Index i = 0; i < ds.n(); ++i) {
    if (fold_of[static_cast<std::size_t>(i)] == fold) {
      test_rows.push_back(i);
    } else {
      train_rows.push_back(i);
    }
  }
  if (test_rows.empty()) throw FoldTooSmall("fold " + std::to_string(fold) + " is empty");
  if (train_rows.size() < 2) {
    throw FoldTooSmall("training complement of fold " + std::to_string(fold) +
                       " has fewer than 2 points");
  }
  out.train.y.resize(static_cast<Index>(train_rows.size()));
  out.train.X.resize(static_cast<Index>(train_rows.size()), ds.p());
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    out.train.y(static_cast<Index>(r)) = ds.y(train_rows[r]);
    out.train.X.row(static_cast<Index>(r)) = ds.X.row(train_rows[r]);
  }
  out.y_test.resize(static_cast<Index>(test_rows.size()));
  out.x_test.resize(static_cast<Index>(test_rows.size()), ds.p());
  for (std::size_t r = 0; r < test_rows.size(); ++r) {
    out.y_test(static_cast<Index>(r)) = ds.y(test_rows[r]);
    out.x_test.row(static_cast<Index>(r)) = ds.X.row(test_rows[r]);
  }
  return out;
}

}  // namespace

CvResult cross_validate(const LinearDataset& ds, const StructureSpec& structure,
                        const std::vector<double>& lambda_grid,
                        const std::vector<double>& gamma_grid, int k, int T,
                        const SolverConfig& cfg, std::uint64_t seed, double cap) {
  if (lambda_grid.empty() || gamma_grid.empty()) {
    throw EmptyGrid("cross-validation grids must be nonempty");
  }
  for (double g : gamma_grid) check_gamma(g);
  check_structure(ds, structure);

  CvResult res;
  res.lambda_grid = lambda_grid;
  res.gamma_grid = gamma_grid;
  res.fold_of = assign_folds(ds.n(), k, seed);

  const std::size_t L = lambda_grid.size();
  const std::size_t G = gamma_grid.size();
  const double n_total = static_cast<double>(ds.n());
  const WeightVector ones{Vector::Ones(ds.p()), cap};

  std::vector<FoldSplit> splits;
  splits.reserve(static_cast<std::size_t>(k));
  for (int fold = 0; fold < k; ++fold) splits.push_back(split_fold(ds, res.fold_of, fold));

  // Stage A: pooled held-out error of the unit-weight fit per lambda,
  // warm-started along the grid within each fold.
  res.stage_a_error.assign(L, 0.0);
  for (const auto& split : splits) {
    Vector warm = Vector::Zero(ds.p());
    for (std::size_t li = 0; li < L; ++li) {
      const LassoFit fit =
          fit_weighted_lasso(split.train, ones, lambda_grid[li], cfg, &warm);
      warm = fit.beta;
      res.stage_a_error[li] +=
          (split.y_test - split.x_test * fit.beta).squaredNorm() / n_total;
    }
  }
  std::size_t best_a = 0;
  for (std::size_t li = 1; li < L; ++li) {
    if (res.stage_a_error[li] < res.stage_a_error[best_a] ||
        (res.stage_a_error[li] == res.stage_a_error[best_a] &&
         lambda_grid[li] < lambda_grid[best_a])) {
      best_a = li;
    }
  }
  res.lambda0_hat = lambda_grid[best_a];

  // Stage B: the stage-0 fit at lambda0_hat is shared by the whole grid, so
  // compute it once per fold and append the refit stages per grid point.
  res.cv_error = Matrix::Zero(static_cast<Index>(L), static_cast<Index>(G));
  for (const auto& split : splits) {
    const LassoFit fit0 = fit_weighted_lasso(split.train, ones, res.lambda0_hat, cfg);
    for (std::size_t gi = 0; gi < G; ++gi) {
      for (std::size_t li = 0; li < L; ++li) {
        SalassoTrajectory traj =
            start_trajectory(split.train, fit0, res.lambda0_hat, gamma_grid[gi], cap);
        refit_stages(traj, split.train, structure, T, lambda_grid[li], gamma_grid[gi],
                     cfg, cap);
        res.cv_error(static_cast<Index>(li), static_cast<Index>(gi)) +=
            (split.y_test - split.x_test * traj.final_beta()).squaredNorm() / n_total;
      }
    }
  }

  std::size_t best_l = 0, best_g = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < L; ++li) {
    for (std::size_t gi = 0; gi < G; ++gi) {
      const double err = res.cv_error(static_cast<Index>(li), static_cast<Index>(gi));
      bool better = err < best;
      if (err == best) {
        better = lambda_grid[li] < lambda_grid[best_l] ||
                 (lambda_grid[li] == lambda_grid[best_l] &&
                  gamma_grid[gi] < gamma_grid[best_g]);
      }
      if (better) {
        best = err;
        best_l = li;
        best_g = gi;
      }
    }
  }
  res.lambda_hat = lambda_grid[best_l];
  res.gamma_hat = gamma_grid[best_g];
  return res;
}

}  // namespace salasso
