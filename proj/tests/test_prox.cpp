#include <doctest.h>

#include "salasso/prox.hpp"
#include "salasso/rng.hpp"

#include <cmath>

using namespace salasso;

namespace {

LinearDataset random_instance(Index n, Index p, std::uint64_t seed, double sigma = 0.3) {
  const RandomField fx(seed, make_stream(StreamTag::design));
  const RandomField fs(seed, make_stream(StreamTag::signal));
  const RandomField fe(seed, make_stream(StreamTag::response));
  LinearDataset ds;
  ds.X.resize(n, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j)
      ds.X(i, j) = scale * fx.normal(static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j), 0);
  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < p; j += 4) beta[j] = 2.0 * fs.normal(static_cast<std::uint64_t>(j), 0, 0);
  ds.y = ds.X * beta;
  for (Index i = 0; i < n; ++i)
    ds.y[i] += sigma * fe.normal(static_cast<std::uint64_t>(i), 0, 0);
  ds.beta_true = beta;
  return ds;
}

WeightVector unit_weights(Index p) { return {Vector::Ones(p), kDefaultWeightCap}; }

// Accelerated proximal gradient reference: independent of the coordinate
// solver, same objective, so agreement pins the minimizer not the algorithm.
Vector ista(const LinearDataset& ds, const WeightVector& w, double lambda,
            int iters) {
  const auto n = static_cast<double>(ds.n());
  const double L = (ds.X.transpose() * ds.X).eigenvalues().real().maxCoeff() / n;
  const double step = 1.0 / L;
  Vector beta = Vector::Zero(ds.p());
  Vector z = beta;
  double t = 1.0;
  for (int it = 0; it < iters; ++it) {
    const Vector grad = ds.X.transpose() * (ds.X * z - ds.y) / n;
    Vector next = z - step * grad;
    for (Index j = 0; j < next.size(); ++j)
      next[j] = soft_threshold(next[j], step * lambda * w.values[j]);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - beta);
    const double moved = (next - beta).lpNorm<Eigen::Infinity>();
    beta = std::move(next);
    t = t_next;
    if (it > 10 && moved < 1e-14) break;
  }
  return beta;
}

}  // namespace

TEST_CASE("scalar soft threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(1.0, 1.0) == 0.0);  // kink maps to exactly zero
  CHECK_THROWS_AS(soft_threshold(1.0, -0.1), NegativeThreshold);

  CHECK(soft_threshold_derivative(3.0, 1.0) == 1.0);
  CHECK(soft_threshold_derivative(0.5, 1.0) == 0.0);
  CHECK(soft_threshold_derivative(1.0, 1.0) == 0.0);
}

TEST_CASE("orthogonal design has a closed-form solution") {
  // X = I2, y = (3, 0.5), lambda = 0.4: each coordinate is an independent
  // scalar problem min (1/4)(y_j - b)^2 + 0.4 |b| whose solution is
  // soft(y_j; 2 * 0.4).
  LinearDataset ds;
  ds.X = Matrix::Identity(2, 2);
  ds.y = Vector(2);
  ds.y << 3.0, 0.5;
  const auto fit = fit_weighted_lasso(ds, unit_weights(2), 0.4);
  CHECK(fit.converged);
  CHECK(fit.beta[0] == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(fit.beta[1] == 0.0);
  CHECK(fit.kkt_residual <= 1e-7);

  CHECK(lambda_max(ds, unit_weights(2)) == doctest::Approx(1.5));
  const auto null_fit = fit_weighted_lasso(ds, unit_weights(2), 1.5);
  CHECK(null_fit.beta.isZero(0.0));
}

TEST_CASE("matches an independent proximal-gradient solver") {
  const auto ds = random_instance(40, 60, 17);
  WeightVector w = unit_weights(60);
  const RandomField fw(99, make_stream(StreamTag::harness));
  for (Index j = 0; j < 60; ++j)
    w.values[j] = 0.5 + fw.uniform(static_cast<std::uint64_t>(j), 0, 0);

  const double lmax = lambda_max(ds, w);
  SolverConfig tight;
  tight.tol = 1e-10;  // the default 1e-7 leaves ~1e-6 coefficient slop
  for (const double frac : {0.5, 0.1, 0.02}) {
    const double lambda = frac * lmax;
    const auto fit = fit_weighted_lasso(ds, w, lambda, tight);
    const Vector ref = ista(ds, w, lambda, 20000);
    CHECK(fit.converged);
    CHECK((fit.beta - ref).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(weighted_lasso_objective(ds, fit.beta, w, lambda) <=
          weighted_lasso_objective(ds, ref, w, lambda) + 1e-10);
  }
}

TEST_CASE("weight/lambda homogeneity: (c w, lambda) solves like (w, c lambda)") {
  const auto ds = random_instance(30, 50, 23);
  WeightVector w = unit_weights(50);
  const RandomField fw(5, make_stream(StreamTag::harness, 7));
  for (Index j = 0; j < 50; ++j)
    w.values[j] = 0.2 + 2.0 * fw.uniform(static_cast<std::uint64_t>(j), 0, 0);
  const double c = 3.7;
  WeightVector cw = w;
  cw.values *= c;

  const auto a = fit_weighted_lasso(ds, cw, 0.01);
  const auto b = fit_weighted_lasso(ds, w, c * 0.01);
  CHECK((a.beta - b.beta).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("KKT residual honored on random instances") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const auto ds = random_instance(50, 80, seed);
    const WeightVector w = unit_weights(80);
    const double lambda = 0.3 * lambda_max(ds, w);
    const auto fit = fit_weighted_lasso(ds, w, lambda);
    CHECK(fit.converged);
    CHECK(fit.kkt_residual <= 1e-7);
    CHECK(check_kkt(ds, fit.beta, w, lambda) <= 1e-7);
    // Zeros are exact, never tiny leftovers.
    for (Index j = 0; j < fit.beta.size(); ++j) {
      if (fit.beta[j] != 0.0) CHECK(std::abs(fit.beta[j]) > 1e-12);
    }
  }
}

TEST_CASE("objective is monotone along a warm-started path") {
  const auto ds = random_instance(40, 70, 31);
  const WeightVector w = unit_weights(70);
  const double lmax = lambda_max(ds, w);
  Vector warm = Vector::Zero(70);
  for (double frac = 1.0; frac > 0.01; frac *= 0.7) {
    const double lambda = frac * lmax;
    const double before = weighted_lasso_objective(ds, warm, w, lambda);
    const auto fit = fit_weighted_lasso(ds, w, lambda, {}, &warm);
    const double after = weighted_lasso_objective(ds, fit.beta, w, lambda);
    CHECK(after <= before + 1e-12);
    warm = fit.beta;
  }
}

TEST_CASE("capped weights pin coordinates to exact zero") {
  auto ds = random_instance(30, 10, 41);
  WeightVector w = unit_weights(10);
  w.values[3] = kDefaultWeightCap;
  w.values[7] = kDefaultWeightCap;
  const auto fit = fit_weighted_lasso(ds, w, 0.01);
  CHECK(fit.beta[3] == 0.0);
  CHECK(fit.beta[7] == 0.0);
  CHECK(fit.converged);
  CHECK(std::isfinite(fit.objective));
}

TEST_CASE("lambda_max rejects zero weights, fit rejects negative lambda") {
  const auto ds = random_instance(20, 5, 3);
  WeightVector w = unit_weights(5);
  CHECK_THROWS_AS(fit_weighted_lasso(ds, w, -0.1), NegativeLambda);
  w.values[2] = 0.0;
  CHECK_THROWS_AS(lambda_max(ds, w), ZeroWeightUnpenalized);
  // A zero weight is legal for the fit itself; the coordinate is simply
  // unpenalized.
  CHECK_NOTHROW(fit_weighted_lasso(ds, w, 0.05));
}

TEST_CASE("warm start at the solution returns immediately") {
  const auto ds = random_instance(40, 60, 53);
  const WeightVector w = unit_weights(60);
  const double lambda = 0.2 * lambda_max(ds, w);
  const auto fit = fit_weighted_lasso(ds, w, lambda);
  Vector warm = fit.beta;
  const auto refit = fit_weighted_lasso(ds, w, lambda, {}, &warm);
  CHECK(refit.n_iters <= 2);
  // The verification sweep still applies coordinate updates of the size the
  // KKT tolerance permits, so the state can drift by that much but no more,
  // and never uphill.
  CHECK((refit.beta - fit.beta).lpNorm<Eigen::Infinity>() <= 1e-6);
  CHECK(weighted_lasso_objective(ds, refit.beta, w, lambda) <=
        weighted_lasso_objective(ds, fit.beta, w, lambda) + 1e-12);
}

TEST_CASE("zero-coefficient times capped weight contributes nothing") {
  LinearDataset ds;
  ds.X = Matrix::Identity(2, 2);
  ds.y = Vector::Zero(2);
  WeightVector w{Vector::Ones(2), kDefaultWeightCap};
  w.values[1] = kDefaultWeightCap;
  const Vector beta = Vector::Zero(2);
  CHECK(weighted_lasso_objective(ds, beta, w, 0.5) == 0.0);
}
