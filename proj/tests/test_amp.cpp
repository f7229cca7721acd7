#include <doctest.h>

#include "salasso/amp.hpp"
#include "salasso/prox.hpp"
#include "salasso/rng.hpp"
#include "salasso/simgen.hpp"
#include "salasso/state_evolution.hpp"

#include <algorithm>
#include <cmath>

using namespace salasso;

namespace {

struct Instance {
  LinearDataset ds;
  Vector beta_true;
  Partition partition;
};

Instance preset_instance(Index p, double delta, double sigma2, std::uint64_t seed) {
  Instance inst;
  const Index n = static_cast<Index>(std::llround(delta * static_cast<double>(p)));
  inst.ds.X = gen_design(n, p, DesignSpec{DesignKind::iid_gaussian, 0.0}, seed);
  const GroupSignal sig = gen_signal_group(p, group_preset(), seed);
  inst.beta_true = sig.beta;
  inst.partition = sig.partition;
  inst.ds.y = gen_response(inst.ds.X, sig.beta, sigma2, seed);
  inst.ds.beta_true = sig.beta;
  return inst;
}

double ks_statistic(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const auto n = static_cast<double>(z.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = normal_cdf(z[i]);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
  }
  return ks;
}

}  // namespace

TEST_CASE("zero response fixes the zero vector immediately") {
  LinearDataset ds;
  ds.X = Matrix::Identity(4, 4);
  ds.y = Vector::Zero(4);
  const auto r = amp_lasso(ds, 1.25);
  CHECK(r.converged);
  CHECK(r.beta.isZero(0.0));
  CHECK(r.tau_hat == 0.0);
}

TEST_CASE("noise track matches the theoretical fixed point within 5 percent") {
  const auto inst = preset_instance(500, 0.64, 0.2, 21);
  const auto r = amp_lasso(inst.ds, 1.25);
  CHECK(r.converged);
  const auto tr = se_lasso(SignalPrior{group_preset()}, 0.64, 0.2, 1.25);
  CHECK(r.tau_hat == doctest::Approx(tr.tau_star).epsilon(0.05));
}

TEST_CASE("effective observations look Gaussian around the truth") {
  const auto inst = preset_instance(500, 0.64, 0.2, 33);
  const auto r = amp_lasso(inst.ds, 1.25);
  // b = beta_t + X^T e is the effective observation; (b - beta_true)/tau_hat
  // should be near-standard-normal coordinates.
  Vector b = r.beta + inst.ds.X.transpose() * r.resid;
  std::vector<double> z(static_cast<std::size_t>(b.size()));
  for (Index j = 0; j < b.size(); ++j) z[static_cast<std::size_t>(j)] =
      (b[j] - inst.beta_true[j]) / r.tau_hat;
  CHECK(ks_statistic(z) <= 0.05);
}

TEST_CASE("fixed point nearly satisfies the penalized stationarity conditions") {
  const auto inst = preset_instance(400, 0.8, 0.2, 55);
  const auto r = amp_lasso(inst.ds, 1.5);
  const double lambda = amp_implied_lambda(r, inst.ds.n(), inst.ds.p());
  const WeightVector ones{Vector::Ones(inst.ds.p()), kDefaultWeightCap};
  CHECK(check_kkt(inst.ds, r.beta, ones, lambda) <= 5e-3);

  // And the penalized solver started there barely moves.
  const auto fit = fit_weighted_lasso(inst.ds, ones, lambda);
  CHECK((fit.beta - r.beta).norm() / std::max(1e-12, fit.beta.norm()) < 0.05);
}

TEST_CASE("unit omega reduces the core iteration to the plain one") {
  const auto inst = preset_instance(200, 0.8, 0.2, 8);
  const Vector ones = Vector::Ones(inst.ds.p());
  const auto a = amp_core(inst.ds, ones, 1.4);
  const auto b = amp_lasso(inst.ds, 1.4);
  CHECK(a.beta == b.beta);  // same code path must replay bitwise
  CHECK(a.tau_hat == b.tau_hat);
}

TEST_CASE("capped omega pins coordinates to zero through every iteration") {
  const auto inst = preset_instance(150, 1.0, 0.2, 13);
  Vector omega = Vector::Ones(inst.ds.p());
  omega[3] = kDefaultWeightCap;
  omega[77] = kDefaultWeightCap;
  const auto r = amp_core(inst.ds, omega, 1.3);
  CHECK(r.beta[3] == 0.0);
  CHECK(r.beta[77] == 0.0);
  CHECK(r.converged);
}

TEST_CASE("two-stage group run equals plain stage plus reweighted core") {
  const auto inst = preset_instance(250, 0.8, 0.2, 99);
  const auto staged = amp_salasso_group(inst.ds, inst.partition, 1.3, 1.0);
  const auto plain = amp_lasso(inst.ds, 1.3);
  CHECK(staged.plain.beta == plain.beta);
  const auto w = amp_weights_group(plain.beta, inst.partition, 1.0);
  CHECK(staged.weights.values == w.values);
  const auto weighted = amp_core(inst.ds, w.values, 1.3);
  CHECK(staged.weighted.beta == weighted.beta);
}

TEST_CASE("group weights from singleton partition equal unstructured weights") {
  const auto inst = preset_instance(120, 0.9, 0.2, 17);
  const auto plain = amp_lasso(inst.ds, 1.3);
  Partition singletons;
  for (Index j = 0; j < inst.ds.p(); ++j) singletons.push_back({j});
  const auto a = amp_weights_group(plain.beta, singletons, 0.7);
  const auto b = update_weights_unstructured(plain.beta, 0.7);
  CHECK(a.values == b.values);
}

TEST_CASE("weighted stage reduces the noise track for structured signals") {
  const auto inst = preset_instance(500, 0.64, 0.2, 71);
  const auto staged = amp_salasso_group(inst.ds, inst.partition, 1.25, 1.0);
  CHECK(staged.weighted.tau_hat < staged.plain.tau_hat);
  const double mse_plain = (staged.plain.beta - inst.beta_true).squaredNorm();
  const double mse_weighted = (staged.weighted.beta - inst.beta_true).squaredNorm();
  CHECK(mse_weighted < mse_plain);
}

TEST_CASE("covariate staging matches manual composition") {
  const Index p = 200;
  const auto seed = 31ULL;
  const Index n = 160;
  LinearDataset ds;
  ds.X = gen_design(n, p, DesignSpec{DesignKind::iid_gaussian, 0.0}, seed);
  const CovariateSignal sig = gen_signal_covariate(p, covariate_preset(), seed);
  ds.y = gen_response(ds.X, sig.beta, 0.2, seed);
  const auto staged = amp_salasso_covariate(ds, sig.U, 1.3, 1.0);
  const auto plain = amp_lasso(ds, 1.3);
  CHECK(staged.plain.beta == plain.beta);
  const auto w = amp_weights_covariate(plain.beta, sig.U, 1.0);
  CHECK(staged.weights.values == w.weights.values);
  const auto weighted = amp_core(ds, w.weights.values, 1.3);
  CHECK(staged.weighted.beta == weighted.beta);
}

TEST_CASE("subcritical threshold and aspect ratio diverge loudly") {
  const auto inst = preset_instance(200, 0.3, 0.2, 5);
  CHECK_THROWS_AS(amp_core(inst.ds, Vector::Ones(200), 0.05), Diverged);
}

TEST_CASE("iteration cap surfaces as an exception") {
  const auto inst = preset_instance(200, 0.64, 0.2, 6);
  AmpConfig cfg;
  cfg.tol = 0.0;  // unattainable
  cfg.max_iter = 3;
  CHECK_THROWS_AS(amp_lasso(inst.ds, 1.25, cfg), MaxIterationsExceeded);
}
