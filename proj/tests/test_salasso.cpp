#include <doctest.h>

#include "salasso/rng.hpp"
#include "salasso/salasso.hpp"
#include "salasso/simgen.hpp"

#include <algorithm>
#include <cmath>

using namespace salasso;

namespace {

struct Instance {
  LinearDataset ds;
  Partition partition;
};

Instance grouped_instance(Index n, Index p, std::uint64_t seed) {
  Instance inst;
  inst.ds.X = gen_design(n, p, DesignSpec{DesignKind::iid_gaussian, 0.0}, seed);
  const GroupSignal sig = gen_signal_group(p, group_preset(), seed);
  inst.partition = sig.partition;
  inst.ds.y = gen_response(inst.ds.X, sig.beta, 0.2, seed);
  inst.ds.beta_true = sig.beta;
  return inst;
}

// The four-component preset floors tiny groups to size zero below p ~ 31, so
// the small CV fixtures use an even two-component prior instead.
Instance small_instance(Index n, Index p, std::uint64_t seed) {
  Instance inst;
  inst.ds.X = gen_design(n, p, DesignSpec{DesignKind::iid_gaussian, 0.0}, seed);
  const GroupPrior prior{{{0.5, 0.9, 0.0, 1.0}, {0.5, 0.2, 1.5, 0.4}}};
  const GroupSignal sig = gen_signal_group(p, prior, seed);
  inst.partition = sig.partition;
  inst.ds.y = gen_response(inst.ds.X, sig.beta, 0.2, seed);
  inst.ds.beta_true = sig.beta;
  return inst;
}

}  // namespace

TEST_CASE("stage zero is the unit-weight fit, stage one folds the weights") {
  const auto inst = grouped_instance(80, 100, 3);
  const StructureSpec structure = GroupStructure{inst.partition};
  const double lambda = 0.008;
  const auto tr = fit_salasso(inst.ds, structure, 1, lambda, 1.0);
  REQUIRE(tr.beta.size() == 2);

  const WeightVector ones{Vector::Ones(100), kDefaultWeightCap};
  const auto stage0 = fit_weighted_lasso(inst.ds, ones, lambda);
  CHECK((tr.beta[0] - stage0.beta).lpNorm<Eigen::Infinity>() == 0.0);

  const auto w1 = update_weights_group(stage0.beta, inst.partition, 1.0);
  CHECK(tr.weights[1].values == w1.values);
  const auto stage1 = fit_weighted_lasso(inst.ds, w1, lambda);
  CHECK((tr.final_beta() - stage1.beta).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("joint objective is monotone along the alternation") {
  const auto inst = grouped_instance(60, 90, 7);
  const StructureSpec structure = GroupStructure{inst.partition};
  for (const double gamma : {1.0, 0.5}) {
    const auto tr = fit_salasso(inst.ds, structure, 4, 0.006, gamma);
    for (std::size_t t = 1; t < tr.objective.size(); ++t) {
      CHECK(tr.objective[t] <= tr.objective[t - 1] + 1e-10);
    }
  }
}

TEST_CASE("unstructured and covariate variants run the same alternation") {
  const auto inst = grouped_instance(50, 60, 11);
  const auto flat = fit_salasso(inst.ds, NoStructure{}, 1, 0.01, 0.8);
  REQUIRE(flat.beta.size() == 2);
  const auto w = update_weights_unstructured(flat.beta[0], 0.8);
  CHECK(flat.weights[1].values == w.values);
  CHECK_FALSE(flat.tau.has_value());

  Matrix U(60, 1);
  const RandomField f(2, make_stream(StreamTag::u_samples));
  for (Index j = 0; j < 60; ++j) U(j, 0) = f.normal(static_cast<std::uint64_t>(j), 0, 0);
  const auto cov = fit_salasso(inst.ds, CovariateStructure{U}, 1, 0.01, 1.0);
  CHECK(cov.tau.has_value());
  for (Index j = 0; j < 60; ++j) {
    const double expected =
        std::min(cov.tau->weight_at(U.row(j).transpose()), kDefaultWeightCap);
    CHECK(cov.weights[1].values[j] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("stage-0 penalty override is recorded and applied") {
  const auto inst = grouped_instance(60, 80, 13);
  const StructureSpec structure = GroupStructure{inst.partition};
  const auto tr = fit_salasso(inst.ds, structure, 1, 0.004, 1.0, {}, 0.02);
  CHECK(tr.lambda[0] == 0.02);
  CHECK(tr.lambda[1] == 0.004);

  const WeightVector ones{Vector::Ones(80), kDefaultWeightCap};
  const auto stage0 = fit_weighted_lasso(inst.ds, ones, 0.02);
  CHECK((tr.beta[0] - stage0.beta).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("T = 0 is exactly the plain fit") {
  const auto inst = grouped_instance(40, 50, 17);
  const auto tr = fit_salasso(inst.ds, GroupStructure{inst.partition}, 0, 0.01, 1.0);
  CHECK(tr.beta.size() == 1);
  CHECK(tr.weights.size() == 1);
  CHECK(tr.weights[0].values == Vector::Ones(50));
}

TEST_CASE("default grids are well-formed") {
  const auto inst = grouped_instance(40, 50, 19);
  const auto grid = default_lambda_grid(inst.ds, 20, 1e-3);
  REQUIRE(grid.size() == 20);
  CHECK(std::is_sorted(grid.rbegin(), grid.rend()));
  CHECK(grid.front() / grid.back() == doctest::Approx(1e3).epsilon(1e-9));
  const auto gammas = default_gamma_grid();
  REQUIRE(gammas.size() == 20);
  CHECK(gammas.front() == doctest::Approx(0.05));
  CHECK(gammas.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(default_lambda_grid(inst.ds, 0, 1e-3), EmptyGrid);
}

TEST_CASE("fold assignment is balanced, exhaustive, and seed-stable") {
  const auto folds = assign_folds(103, 5, 42);
  REQUIRE(folds.size() == 103);
  std::vector<int> counts(5, 0);
  for (int f : folds) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    ++counts[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);
  CHECK(assign_folds(103, 5, 42) == folds);
  CHECK(assign_folds(103, 5, 43) != folds);
}

TEST_CASE("cross-validation stage A matches a brute-force replication") {
  const auto inst = small_instance(30, 20, 23);
  const StructureSpec structure = GroupStructure{inst.partition};
  const std::vector<double> lambda_grid = default_lambda_grid(inst.ds, 6, 1e-2);
  const std::vector<double> gamma_grid = {1.0};
  const int k = 5;
  const std::uint64_t seed = 9;
  const auto res = cross_validate(inst.ds, structure, lambda_grid, gamma_grid, k, 1,
                                  {}, seed);

  const auto folds = assign_folds(inst.ds.n(), k, seed);
  std::vector<double> pooled(lambda_grid.size(), 0.0);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<Index> train, test;
    for (Index i = 0; i < inst.ds.n(); ++i) {
      (folds[static_cast<std::size_t>(i)] == fold ? test : train).push_back(i);
    }
    LinearDataset tr_ds, te_ds;
    tr_ds.X = inst.ds.X(train, Eigen::all);
    tr_ds.y = inst.ds.y(train);
    te_ds.X = inst.ds.X(test, Eigen::all);
    te_ds.y = inst.ds.y(test);
    const WeightVector ones{Vector::Ones(inst.ds.p()), kDefaultWeightCap};
    for (std::size_t l = 0; l < lambda_grid.size(); ++l) {
      const auto fit = fit_weighted_lasso(tr_ds, ones, lambda_grid[l]);
      pooled[l] += (te_ds.y - te_ds.X * fit.beta).squaredNorm();
    }
  }
  const auto n = static_cast<double>(inst.ds.n());
  std::size_t best = 0;
  for (std::size_t l = 0; l < lambda_grid.size(); ++l) {
    pooled[l] /= n;
    if (pooled[l] < pooled[best] ||
        (pooled[l] == pooled[best] && lambda_grid[l] < lambda_grid[best]))
      best = l;
  }
  REQUIRE(res.stage_a_error.size() == lambda_grid.size());
  for (std::size_t l = 0; l < lambda_grid.size(); ++l) {
    CHECK(res.stage_a_error[l] == doctest::Approx(pooled[l]).epsilon(1e-6));
  }
  CHECK(res.lambda0_hat == lambda_grid[best]);
}

TEST_CASE("one-point grids select that point") {
  const auto inst = small_instance(24, 15, 29);
  const auto res = cross_validate(inst.ds, GroupStructure{inst.partition}, {0.01},
                                  {0.7}, 3, 1, {}, 1);
  CHECK(res.lambda0_hat == 0.01);
  CHECK(res.lambda_hat == 0.01);
  CHECK(res.gamma_hat == 0.7);
  CHECK(res.cv_error.rows() == 1);
  CHECK(res.cv_error.cols() == 1);
}

TEST_CASE("exact ties break toward smaller lambda, then smaller gamma") {
  // All penalties above lambda_max give the zero fit, so every grid cell has
  // the identical pooled error and only the tie rule decides.
  const auto inst = small_instance(20, 10, 31);
  const double big = 10.0;  // far above lambda_max on this scale
  const auto res = cross_validate(inst.ds, GroupStructure{inst.partition},
                                  {4.0 * big, 2.0 * big, big}, {0.4, 0.9}, 4, 1, {}, 2);
  CHECK(res.lambda0_hat == big);
  CHECK(res.lambda_hat == big);
  CHECK(res.gamma_hat == 0.4);
}

TEST_CASE("cross-validation rejects degenerate fold requests") {
  const auto inst = small_instance(12, 8, 37);
  const StructureSpec s = GroupStructure{inst.partition};
  CHECK_THROWS_AS(cross_validate(inst.ds, s, {0.01}, {1.0}, 1, 1, {}, 1), FoldTooSmall);
  CHECK_THROWS_AS(cross_validate(inst.ds, s, {0.01}, {1.0}, 13, 1, {}, 1), FoldTooSmall);

  Instance tiny = small_instance(2, 8, 38);
  CHECK_THROWS_AS(
      cross_validate(tiny.ds, GroupStructure{tiny.partition}, {0.01}, {1.0}, 2, 1, {}, 1),
      FoldTooSmall);
  CHECK_THROWS_AS(cross_validate(inst.ds, s, {}, {1.0}, 3, 1, {}, 1), EmptyGrid);
}

TEST_CASE("cross-validation replays bitwise under a fixed seed") {
  const auto inst = small_instance(40, 30, 41);
  const StructureSpec s = GroupStructure{inst.partition};
  const auto grid = default_lambda_grid(inst.ds, 5, 1e-2);
  const auto a = cross_validate(inst.ds, s, grid, {0.5, 1.0}, 4, 1, {}, 77);
  const auto b = cross_validate(inst.ds, s, grid, {0.5, 1.0}, 4, 1, {}, 77);
  CHECK(a.lambda_hat == b.lambda_hat);
  CHECK(a.gamma_hat == b.gamma_hat);
  CHECK(a.cv_error == b.cv_error);
  CHECK(a.stage_a_error == b.stage_a_error);
}

TEST_CASE("joint objective value agrees with its definition") {
  const auto inst = small_instance(30, 12, 43);
  Vector beta = Vector::Zero(12);
  beta[0] = 1.5;
  beta[5] = -0.4;
  WeightVector w{Vector::Ones(12), kDefaultWeightCap};
  w.values[0] = 2.0;
  const double lambda = 0.03, gamma = 0.5;
  const double got = salasso_objective(inst.ds, beta, w, lambda, gamma);
  double expect = (inst.ds.y - inst.ds.X * beta).squaredNorm() /
                  (2.0 * static_cast<double>(inst.ds.n()));
  for (Index j = 0; j < 12; ++j) {
    const double wj = w.values[j];
    expect += lambda * wj * std::abs(beta[j]);
    expect -= lambda * std::pow(wj, 1.0 - 1.0 / gamma) / (1.0 - 1.0 / gamma);
  }
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
}
