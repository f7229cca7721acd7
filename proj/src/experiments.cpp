#include "salasso/experiments.hpp"

#include "salasso/amp.hpp"
#include "salasso/io_csv.hpp"
#include "salasso/kernels.hpp"
#include "salasso/locmodel.hpp"
#include "salasso/prox.hpp"
#include "salasso/salasso.hpp"
#include "salasso/state_evolution.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

namespace salasso {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] =
        n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

GroupPrior null_prior() { return GroupPrior{{{1.0, 1.0, 0.0, 0.0}}}; }

struct Instance {
  LinearDataset ds;
  Vector beta_true;
  StructureSpec structure;
};

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  Instance inst;
  const Index n = static_cast<Index>(std::llround(cfg.delta * static_cast<double>(cfg.p)));
  DesignSpec design{design_kind_from_string(cfg.design), 0.5};
  inst.ds.X = gen_design(n, cfg.p, design, seed);
  if (cfg.preset == "covariate") {
    CovariateSignal sig = gen_signal_covariate(cfg.p, covariate_preset(), seed);
    inst.beta_true = sig.beta;
    inst.structure = CovariateStructure{sig.U};
  } else {
    const GroupPrior prior = cfg.preset == "null" ? null_prior() : group_preset();
    GroupSignal sig = gen_signal_group(cfg.p, prior, seed);
    inst.beta_true = sig.beta;
    inst.structure = GroupStructure{sig.partition};
  }
  inst.ds.y = gen_response(inst.ds.X, inst.beta_true, cfg.sigma2, seed);
  inst.ds.beta_true = inst.beta_true;
  inst.ds.sigma2 = cfg.sigma2;
  return inst;
}

MetricsRow base_row(const ExperimentConfig& cfg, const std::string& method,
                    int replication, double lambda, std::uint64_t seed) {
  MetricsRow row;
  row.method = method;
  row.replication = replication;
  row.delta = cfg.delta;
  row.lambda = lambda;
  row.gamma = cfg.gamma;
  row.seed = seed;
  return row;
}

// Predicted (lambda, risk) pairs for the plain fit over an alpha grid,
// lambda expressed on the solver scale for an n-row design.
struct PredictedCurve {
  std::vector<double> lambda;
  std::vector<double> risk;
};

PredictedCurve lasso_curve(const SignalPrior& prior, const ExperimentConfig& cfg,
                           const std::vector<double>& alphas, Index n) {
  PredictedCurve curve;
  for (double a : alphas) {
    const SETrace tr = se_lasso(prior, cfg.delta, cfg.sigma2, a, cfg.quad);
    curve.lambda.push_back(tr.implied_lambda / static_cast<double>(n));
    curve.risk.push_back(tr.predicted_risk);
  }
  return curve;
}

std::vector<MetricsRow> run_se_sweep(const ExperimentConfig& cfg) {
  std::vector<double> alphas =
      cfg.alpha_grid.empty() ? linspace(0.5, 3.0, 40) : cfg.alpha_grid;
  std::vector<MetricsRow> rows;
  const bool covariate = cfg.preset == "covariate";
  const GroupPrior gp = cfg.preset == "null"
                            ? null_prior()
                            : (covariate ? marginal_group_prior(covariate_preset())
                                         : group_preset());

  for (double a : alphas) {
    const auto start = Clock::now();
    const SETrace tr = se_lasso(SignalPrior{gp}, cfg.delta, cfg.sigma2, a, cfg.quad);
    MetricsRow row = base_row(cfg, "se_lasso", 0, tr.implied_lambda, cfg.seed);
    row.mse = tr.predicted_risk;
    row.wall_time_ms = ms_since(start);
    rows.push_back(row);
  }

  if (covariate) {
    const CovariatePrior prior = covariate_preset();
    const SETrace stage = se_lasso(SignalPrior{prior}, cfg.delta, cfg.sigma2,
                                   cfg.alpha_lasso, cfg.quad);
    const USamples us = draw_u_samples(prior, cfg.quad.n_mc, cfg.quad.seed);
    const CovariateTau tau_map =
        limit_covariate_tau(prior, stage, cfg.gamma, us, cfg.quad);
    for (double a : alphas) {
      const auto start = Clock::now();
      const SETrace tr =
          se_salasso_covariate(prior, cfg.delta, cfg.sigma2, a, tau_map, us, cfg.quad);
      MetricsRow row = base_row(cfg, "se_covariate", 0, tr.implied_lambda, cfg.seed);
      row.mse = tr.predicted_risk;
      row.wall_time_ms = ms_since(start);
      rows.push_back(row);
    }
  } else {
    const AsymptoticWeights aw = asymptotic_weights_group(
        gp, cfg.delta, cfg.sigma2, cfg.alpha_lasso, cfg.gamma, cfg.quad);
    for (double a : alphas) {
      const auto start = Clock::now();
      const SETrace tr =
          se_salasso_group(gp, cfg.delta, cfg.sigma2, a, aw.omega, cfg.quad);
      MetricsRow row = base_row(cfg, "se_group", 0, tr.implied_lambda, cfg.seed);
      row.mse = tr.predicted_risk;
      row.wall_time_ms = ms_since(start);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<MetricsRow> run_amp_vs_solver(const ExperimentConfig& cfg) {
  const std::vector<double> alphas =
      cfg.alpha_grid.empty() ? std::vector<double>{1.25, 1.5, 1.75, 2.0, 2.25}
                             : cfg.alpha_grid;
  const Index n = static_cast<Index>(std::llround(cfg.delta * static_cast<double>(cfg.p)));
  const GroupPrior gp =
      cfg.preset == "covariate" ? marginal_group_prior(covariate_preset()) : group_preset();

  // One SE solve per alpha gives the penalty the solver should match.
  std::vector<double> lambda_solver(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    lambda_solver[a] = se_lasso(SignalPrior{gp}, cfg.delta, cfg.sigma2, alphas[a],
                                cfg.quad).implied_lambda /
                       static_cast<double>(n);
  }

  std::vector<std::vector<MetricsRow>> per_rep(static_cast<std::size_t>(cfg.replications));
  for (int r = 0; r < cfg.replications; ++r) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
    const Instance inst = make_instance(cfg, seed);
    auto& rows = per_rep[static_cast<std::size_t>(r)];
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      auto start = Clock::now();
      const AmpResult amp = amp_lasso(inst.ds, alphas[a]);
      const double amp_ms = ms_since(start);

      start = Clock::now();
      const WeightVector ones{Vector::Ones(cfg.p), kDefaultWeightCap};
      const LassoFit fit = fit_weighted_lasso(inst.ds, ones, lambda_solver[a]);
      const double fit_ms = ms_since(start);

      MetricsRow amp_row = base_row(cfg, "amp", r, lambda_solver[a], seed);
      amp_row.mse = mse(amp.beta, inst.beta_true);
      amp_row.rmspe = rmspe(inst.ds.y, inst.ds.X * amp.beta);
      amp_row.mcc = mcc(support_of(amp.beta), support_of(inst.beta_true));
      amp_row.wall_time_ms = amp_ms;
      rows.push_back(amp_row);

      MetricsRow fit_row = base_row(cfg, "solver", r, lambda_solver[a], seed);
      fit_row.mse = mse(fit.beta, inst.beta_true);
      fit_row.rmspe = rmspe(inst.ds.y, inst.ds.X * fit.beta);
      fit_row.mcc = mcc(support_of(fit.beta), support_of(inst.beta_true));
      fit_row.wall_time_ms = fit_ms;
      rows.push_back(fit_row);

      MetricsRow gap = base_row(cfg, "amp_vs_solver", r, lambda_solver[a], seed);
      gap.mse = (amp.beta - fit.beta).norm() / std::max(fit.beta.norm(), 1e-12);
      gap.wall_time_ms = amp_ms + fit_ms;
      rows.push_back(gap);
    }
  }

  std::vector<MetricsRow> rows;
  for (auto& block : per_rep) {
    rows.insert(rows.end(), block.begin(), block.end());
  }
  return rows;
}

std::vector<MetricsRow> run_fig1(const ExperimentConfig& cfg) {
  const Index n = static_cast<Index>(std::llround(cfg.delta * static_cast<double>(cfg.p)));
  const bool covariate = cfg.preset == "covariate";
  const std::vector<double> alpha_lasso_grid = linspace(0.8, 2.5, 20);
  const std::vector<double> alpha_sa_grid =
      cfg.alpha_grid.empty()
          ? (covariate ? linspace(0.25, 1.0, 20) : linspace(0.12, 0.55, 20))
          : cfg.alpha_grid;

  std::vector<MetricsRow> rows;

  // Predicted curves.
  const GroupPrior gp = covariate ? marginal_group_prior(covariate_preset()) : group_preset();
  const PredictedCurve plain = lasso_curve(SignalPrior{gp}, cfg, alpha_lasso_grid, n);
  for (std::size_t i = 0; i < plain.lambda.size(); ++i) {
    MetricsRow row = base_row(cfg, "lasso_se", 0, plain.lambda[i], cfg.seed);
    row.mse = plain.risk[i];
    rows.push_back(row);
  }

  double lambda0_solver = 0.0;         // stage-0 penalty implied by alpha_lasso
  std::vector<double> lambda_sa, risk_sa;
  std::vector<double> omega;           // group variant
  CovariateTau tau_map;                // covariate variant
  if (covariate) {
    const CovariatePrior prior = covariate_preset();
    const CovariateSE pipe = se_salasso_covariate_pipeline(
        prior, cfg.delta, cfg.sigma2, cfg.alpha_lasso, alpha_sa_grid.front(),
        cfg.gamma, cfg.quad);
    lambda0_solver = pipe.lasso_stage.implied_lambda / static_cast<double>(n);
    tau_map = pipe.tau_map;
    const USamples us = draw_u_samples(prior, cfg.quad.n_mc, cfg.quad.seed);
    for (double a : alpha_sa_grid) {
      const SETrace tr =
          se_salasso_covariate(prior, cfg.delta, cfg.sigma2, a, tau_map, us, cfg.quad);
      lambda_sa.push_back(tr.implied_lambda / static_cast<double>(n));
      risk_sa.push_back(tr.predicted_risk);
    }
  } else {
    const AsymptoticWeights aw = asymptotic_weights_group(
        gp, cfg.delta, cfg.sigma2, cfg.alpha_lasso, cfg.gamma, cfg.quad);
    lambda0_solver = aw.lasso_stage.implied_lambda / static_cast<double>(n);
    omega = aw.omega;
    for (double a : alpha_sa_grid) {
      const SETrace tr = se_salasso_group(gp, cfg.delta, cfg.sigma2, a, aw.omega, cfg.quad);
      lambda_sa.push_back(tr.implied_lambda / static_cast<double>(n));
      risk_sa.push_back(tr.predicted_risk);
    }
  }
  for (std::size_t i = 0; i < lambda_sa.size(); ++i) {
    MetricsRow row = base_row(cfg, "salasso_se", 0, lambda_sa[i], cfg.seed);
    row.mse = risk_sa[i];
    rows.push_back(row);
  }

  // Empirical curves: descend each lambda grid with warm starts; the
  // weighted stage reuses the one stage-0 fit per replicate.
  std::vector<std::size_t> plain_order(plain.lambda.size()), sa_order(lambda_sa.size());
  std::iota(plain_order.begin(), plain_order.end(), 0u);
  std::iota(sa_order.begin(), sa_order.end(), 0u);
  std::sort(plain_order.begin(), plain_order.end(), [&](std::size_t i, std::size_t j) {
    return plain.lambda[i] > plain.lambda[j];
  });
  std::sort(sa_order.begin(), sa_order.end(), [&](std::size_t i, std::size_t j) {
    return lambda_sa[i] > lambda_sa[j];
  });

  std::vector<std::vector<MetricsRow>> per_rep(static_cast<std::size_t>(cfg.replications));
  for (int r = 0; r < cfg.replications; ++r) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
    const Instance inst = make_instance(cfg, seed);
    auto& out = per_rep[static_cast<std::size_t>(r)];
    const WeightVector ones{Vector::Ones(cfg.p), kDefaultWeightCap};

    Vector warm = Vector::Zero(cfg.p);
    for (std::size_t k : plain_order) {
      const auto start = Clock::now();
      const LassoFit fit = fit_weighted_lasso(inst.ds, ones, plain.lambda[k], {}, &warm);
      warm = fit.beta;
      MetricsRow row = base_row(cfg, "lasso_emp", r, plain.lambda[k], seed);
      row.mse = mse(fit.beta, inst.beta_true);
      row.rmspe = rmspe(inst.ds.y, inst.ds.X * fit.beta);
      row.mcc = mcc(support_of(fit.beta), support_of(inst.beta_true));
      row.wall_time_ms = ms_since(start);
      out.push_back(row);
    }

    const LassoFit fit0 = fit_weighted_lasso(inst.ds, ones, lambda0_solver);
    WeightVector w;
    if (covariate) {
      const auto& cs = std::get<CovariateStructure>(inst.structure);
      w = update_weights_covariate(fit0.beta, cs.U, cfg.gamma).weights;
    } else {
      const auto& gs = std::get<GroupStructure>(inst.structure);
      w = update_weights_group(fit0.beta, gs.partition, cfg.gamma);
    }
    warm = fit0.beta;
    for (std::size_t k : sa_order) {
      const auto start = Clock::now();
      const LassoFit fit = fit_weighted_lasso(inst.ds, w, lambda_sa[k], {}, &warm);
      warm = fit.beta;
      MetricsRow row = base_row(cfg, "salasso_emp", r, lambda_sa[k], seed);
      row.mse = mse(fit.beta, inst.beta_true);
      row.rmspe = rmspe(inst.ds.y, inst.ds.X * fit.beta);
      row.mcc = mcc(support_of(fit.beta), support_of(inst.beta_true));
      row.wall_time_ms = ms_since(start);
      out.push_back(row);
    }
  }
  for (auto& block : per_rep) rows.insert(rows.end(), block.begin(), block.end());
  (void)omega;
  return rows;
}

std::vector<MetricsRow> run_locmodel(const ExperimentConfig& cfg) {
  std::vector<Index> sizes(cfg.loc_a.size(), cfg.loc_nd);
  const RiskBoundReport bound = risk_bound(cfg.loc_a, sizes, cfg.sigma2,
                                           cfg.loc_tau_pilot, cfg.loc_n_mc, cfg.seed);
  std::vector<MetricsRow> rows;
  for (int r = 0; r < cfg.replications; ++r) {
    const std::uint64_t seed = cfg.seed + 1000 + static_cast<std::uint64_t>(r);
    const auto start = Clock::now();
    const LocationInstance inst =
        gen_location_instance(cfg.loc_a, sizes, cfg.sigma2, seed);
    const auto pilot = pilot_group_means(inst.y, inst.partition, cfg.loc_tau_pilot);
    const Vector mu_hat = location_estimator(inst.y, inst.partition, pilot, cfg.sigma2);
    MetricsRow row = base_row(cfg, "locmodel_emp", r, bound.bound, seed);
    row.mse = signal_group_loss(inst, mu_hat);
    row.rmspe = std::sqrt(row.mse / static_cast<double>(inst.y.size()));
    row.wall_time_ms = ms_since(start);
    rows.push_back(row);

    MetricsRow uni = base_row(cfg, "universal_oracle", r, bound.bound, seed);
    uni.mse = universal_risk_bound(inst.mu, cfg.sigma2);
    rows.push_back(uni);
  }
  return rows;
}

}  // namespace

std::string summary_json(const ExperimentConfig& cfg, const std::vector<MetricsRow>& rows) {
  // Group rows by (method, lambda) in first-appearance order.
  std::vector<std::pair<std::string, double>> keys;
  std::map<std::pair<std::string, double>, std::vector<double>> cells;
  for (const auto& row : rows) {
    const auto key = std::make_pair(row.method, row.lambda);
    if (!cells.count(key)) keys.push_back(key);
    cells[key].push_back(row.mse);
  }
  json methods = json::object();
  for (const auto& key : keys) {
    const auto& vals = cells[key];
    const double n = static_cast<double>(vals.size());
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double se = vals.size() > 1 ? std::sqrt(var / (n * (n - 1.0))) : 0.0;
    json& bucket = methods[key.first];
    bucket["lambda"].push_back(key.second);
    bucket["mse_mean"].push_back(mean);
    bucket["mse_se"].push_back(se);
    bucket["n"].push_back(vals.size());
  }
  json out;
  out["kind"] = cfg.kind;
  out["config"] = {{"preset", cfg.preset}, {"design", cfg.design},
                   {"p", cfg.p},           {"delta", cfg.delta},
                   {"sigma2", cfg.sigma2}, {"gamma", cfg.gamma},
                   {"alpha_lasso", cfg.alpha_lasso},
                   {"replications", cfg.replications},
                   {"T", cfg.T},           {"seed", cfg.seed}};
  out["methods"] = methods;
  return out.dump(2);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  kernels::set_threads(cfg.threads);
  ExperimentResult result;
  if (cfg.kind == "se_sweep") {
    result.rows = run_se_sweep(cfg);
  } else if (cfg.kind == "amp_vs_solver") {
    result.rows = run_amp_vs_solver(cfg);
  } else if (cfg.kind == "fig1") {
    result.rows = run_fig1(cfg);
  } else if (cfg.kind == "locmodel_bound") {
    result.rows = run_locmodel(cfg);
  } else {
    throw ParseError("unknown experiment kind: " + cfg.kind);
  }

  result.csv_path = cfg.out;
  write_metrics_csv(result.csv_path, result.rows);

  std::string json_path = cfg.out;
  const auto dot = json_path.rfind('.');
  if (dot != std::string::npos) json_path.resize(dot);
  json_path += ".json";
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + json_path);
  out << summary_json(cfg, result.rows) << '\n';
  result.json_path = json_path;
  return result;
}

}  // namespace salasso
