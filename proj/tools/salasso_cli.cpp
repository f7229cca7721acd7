// Command-line front end. Subcommands mirror the library surface:
//   simulate  draw a design/signal/response triple and write it out
//   fit       penalized fit at fixed (lambda, gamma), optional structure
//   cv        two-stage k-fold search, then a full-data refit
//   amp       message-passing solver, plain or two-stage
//   se        fixed-point theory: tau*, implied lambda, predicted risk
//   sweep     batch experiment drivers writing metrics CSV + JSON summary
//   locmodel  grouped-location estimator, condition check and risk bound
// Exit codes: 0 ok, 1 usage error, 2 runtime failure.
#include <CLI11.hpp>
#include <json.hpp>

#include "salasso/amp.hpp"
#include "salasso/experiments.hpp"
#include "salasso/io_csv.hpp"
#include "salasso/kernels.hpp"
#include "salasso/locmodel.hpp"
#include "salasso/salasso.hpp"
#include "salasso/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using namespace salasso;

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto sep = path.rfind('/');
  if (dot == std::string::npos || (sep != std::string::npos && dot < sep)) return path;
  return path.substr(0, dot);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text << '\n';
}

json trajectory_json(const SalassoTrajectory& tr) {
  json j;
  j["stages"] = tr.beta.size();
  j["lambda"] = tr.lambda;
  j["objective"] = tr.objective;
  j["kkt_residual"] = tr.kkt_residual;
  j["n_iters"] = tr.n_iters;
  j["gamma"] = tr.gamma;
  j["converged"] = tr.converged;
  j["nonzeros"] = (tr.final_beta().array() != 0.0).count();
  if (tr.tau) {
    j["tau0"] = tr.tau->tau0;
    j["tau1"] = std::vector<double>(tr.tau->tau1.begin(), tr.tau->tau1.end());
    j["tau_converged"] = tr.tau->converged;
  }
  return j;
}

json amp_json(const AmpResult& r, Index n, Index p) {
  json j;
  j["alpha"] = r.alpha;
  j["tau_hat"] = r.tau_hat;
  j["active_mean"] = r.active_mean;
  j["n_iters"] = r.n_iters;
  j["converged"] = r.converged;
  j["implied_lambda"] = amp_implied_lambda(r, n, p);
  j["nonzeros"] = (r.beta.array() != 0.0).count();
  return j;
}

// Column scaling to ||x_j||^2 = n, undone on the returned coefficients.
struct Standardizer {
  Vector scale;
  void apply(LinearDataset& ds) {
    const auto n = static_cast<double>(ds.n());
    scale = Vector::Ones(ds.p());
    for (Index j = 0; j < ds.p(); ++j) {
      const double norm = ds.X.col(j).norm();
      if (norm > 0.0) scale[j] = norm / std::sqrt(n);
      ds.X.col(j) /= scale[j];
    }
  }
  Vector undo(const Vector& beta) const {
    return (beta.array() / scale.array()).matrix();
  }
};

struct CommonOpts {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string config_path;  // handled by expand_config before parsing
  bool dump_config = false;
};

void add_common(CLI::App* sub, CommonOpts& c, const std::string& default_out) {
  c.out = default_out;
  sub->add_option("--seed", c.seed, "Base seed for all randomized steps");
  sub->add_option("--threads", c.threads, "Worker threads (0 = runtime default)");
  sub->add_option("--out", c.out, "Output path");
  sub->add_flag("--dump-config", c.dump_config,
                "Print the effective key=value configuration and exit");
  sub->add_option("--config", c.config_path,
                  "key=value file; explicit flags override file entries");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Expands a flat key=value file into --key=value arguments, appended after
// the explicit ones so the command line keeps priority (earlier occurrences
// of a key suppress the file entry entirely).
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file " + path);
  std::vector<std::string> out = args;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    const std::string flag = "--" + key;
    bool overridden = false;
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) overridden = true;
    }
    if (overridden) continue;
    if (value == "true" || value == "yes") {
      out.push_back(flag);
    } else if (value == "false" || value == "no") {
      // absent flag
    } else {
      out.push_back(flag + "=" + value);
    }
  }
  return out;
}

// Returns true when the callback should stop after printing the config.
bool maybe_dump(CLI::App* sub, const CommonOpts& c) {
  if (!c.dump_config) return false;
  std::cout << sub->config_to_str(true, false);
  return true;
}

StructureSpec load_structure_or_none(const std::string& path, Index p) {
  if (path.empty()) return NoStructure{};
  return load_structure_csv(path, p);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-adaptive penalized regression toolkit"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic instance");
  CommonOpts sim_c;
  std::string sim_preset = "group", sim_design = "iid", sim_eta_preset = "moderate";
  Index sim_p = 500, sim_n = 0;
  double sim_delta = 0.64, sim_sigma2 = 0.2, sim_rho = 0.5, sim_eta = 0.2;
  add_common(sim, sim_c, "data.csv");
  sim->add_option("--preset", sim_preset, "Signal prior: group | covariate | eta")
      ->check(CLI::IsMember({"group", "covariate", "eta"}));
  sim->add_option("--design", sim_design, "iid | binary | ar1 | equicorrelated");
  sim->add_option("--p", sim_p, "Number of features");
  sim->add_option("--n", sim_n, "Rows (overrides --delta when > 0)");
  sim->add_option("--delta", sim_delta, "Aspect ratio n/p");
  sim->add_option("--sigma2", sim_sigma2, "Noise variance");
  sim->add_option("--rho", sim_rho, "Correlation parameter for ar1/equicorrelated");
  sim->add_option("--eta", sim_eta, "Expected nonzero fraction (eta preset)");
  sim->add_option("--eta-preset", sim_eta_preset,
                  "Odds informativeness: non-informative | moderate | high");
  sim->callback([&] {
    if (maybe_dump(sim, sim_c)) return;
    kernels::set_threads(sim_c.threads);
    const Index n = sim_n > 0
                        ? sim_n
                        : static_cast<Index>(std::llround(sim_delta * static_cast<double>(sim_p)));
    const DesignSpec design{design_kind_from_string(sim_design), sim_rho};
    LinearDataset ds;
    ds.X = gen_design(n, sim_p, design, sim_c.seed);
    const std::string stem = stem_of(sim_c.out);
    if (sim_preset == "covariate") {
      const CovariateSignal sig = gen_signal_covariate(sim_p, covariate_preset(), sim_c.seed);
      ds.beta_true = sig.beta;
      write_covariate_structure_csv(stem + "_structure.csv", sig.U);
    } else if (sim_preset == "eta") {
      const GroupSignal sig =
          gen_signal_eta(sim_p, sim_eta, eta_preset(sim_eta_preset), sim_c.seed);
      ds.beta_true = sig.beta;
      write_group_structure_csv(stem + "_structure.csv", sig.partition);
    } else {
      const GroupSignal sig = gen_signal_group(sim_p, group_preset(), sim_c.seed);
      ds.beta_true = sig.beta;
      write_group_structure_csv(stem + "_structure.csv", sig.partition);
    }
    ds.y = gen_response(ds.X, *ds.beta_true, sim_sigma2, sim_c.seed);
    ds.sigma2 = sim_sigma2;
    write_regression_csv(sim_c.out, ds);
    write_beta_csv(stem + "_beta.csv", *ds.beta_true);
    std::cout << json{{"data", sim_c.out},
                      {"structure", stem + "_structure.csv"},
                      {"beta", stem + "_beta.csv"},
                      {"n", n},
                      {"p", sim_p}}
                     .dump(2)
              << '\n';
  });

  // --- fit ---
  auto* fit = app.add_subcommand("fit", "Penalized fit at fixed lambda");
  CommonOpts fit_c;
  std::string fit_data, fit_structure;
  double fit_lambda = 0.0, fit_gamma = 1.0, fit_tol = 1e-7;
  std::optional<double> fit_lambda0;
  int fit_T = 1, fit_max_iter = 100000;
  bool fit_standardize = false;
  add_common(fit, fit_c, "beta.csv");
  fit->add_option("--data", fit_data, "Input dataset CSV")->required();
  fit->add_option("--structure", fit_structure, "Structure CSV (group or covariate)");
  fit->add_option("--lambda", fit_lambda, "Penalty level")->required();
  fit->add_option("--lambda0", [&fit_lambda0](const std::vector<std::string>& v) {
        fit_lambda0 = std::stod(v.back());
        return true;
      },
      "Stage-0 penalty (defaults to --lambda)");
  fit->add_option("--gamma", fit_gamma, "Weight exponent in (0, 1]");
  fit->add_option("--stages", fit_T, "Weight refits after stage 0 (0 = plain fit)");
  fit->add_option("--tol", fit_tol, "KKT tolerance");
  fit->add_option("--max-iter", fit_max_iter, "Sweep cap per stage");
  fit->add_flag("--standardize", fit_standardize,
                "Scale columns to squared norm n before fitting");
  fit->callback([&] {
    if (maybe_dump(fit, fit_c)) return;
    kernels::set_threads(fit_c.threads);
    LinearDataset ds = load_regression_csv(fit_data);
    const StructureSpec structure = load_structure_or_none(fit_structure, ds.p());
    Standardizer std_;
    if (fit_standardize) std_.apply(ds);
    SolverConfig cfg;
    cfg.tol = fit_tol;
    cfg.max_iter = fit_max_iter;
    cfg.seed = fit_c.seed;
    SalassoTrajectory tr =
        fit_salasso(ds, structure, fit_T, fit_lambda, fit_gamma, cfg, fit_lambda0);
    Vector beta = tr.final_beta();
    if (fit_standardize) beta = std_.undo(beta);
    const Vector w = tr.weights.back().values;
    write_beta_csv(fit_c.out, beta, &w);
    json j = trajectory_json(tr);
    j["out"] = fit_c.out;
    std::cout << j.dump(2) << '\n';
  });

  // --- cv ---
  auto* cv = app.add_subcommand("cv", "k-fold search over (lambda, gamma)");
  CommonOpts cv_c;
  std::string cv_data, cv_structure;
  int cv_folds = 5, cv_T = 1, cv_n_lambda = 50, cv_max_iter = 100000;
  double cv_min_ratio = 1e-3, cv_tol = 1e-7;
  std::vector<double> cv_gamma_grid;
  add_common(cv, cv_c, "beta.csv");
  cv->add_option("--data", cv_data, "Input dataset CSV")->required();
  cv->add_option("--structure", cv_structure, "Structure CSV (group or covariate)");
  cv->add_option("--folds", cv_folds, "Number of folds");
  cv->add_option("--stages", cv_T, "Weight refits after stage 0");
  cv->add_option("--n-lambda", cv_n_lambda, "Lambda grid size");
  cv->add_option("--lambda-min-ratio", cv_min_ratio, "Smallest lambda / lambda_max");
  cv->add_option("--gamma-grid", cv_gamma_grid, "Gamma values (default 0.05..1.00)")
      ->delimiter(',');
  cv->add_option("--tol", cv_tol, "KKT tolerance");
  cv->add_option("--max-iter", cv_max_iter, "Sweep cap per stage");
  cv->callback([&] {
    if (maybe_dump(cv, cv_c)) return;
    kernels::set_threads(cv_c.threads);
    const LinearDataset ds = load_regression_csv(cv_data);
    const StructureSpec structure = load_structure_or_none(cv_structure, ds.p());
    const std::vector<double> lambda_grid =
        default_lambda_grid(ds, cv_n_lambda, cv_min_ratio);
    const std::vector<double> gamma_grid =
        cv_gamma_grid.empty() ? default_gamma_grid() : cv_gamma_grid;
    SolverConfig cfg;
    cfg.tol = cv_tol;
    cfg.max_iter = cv_max_iter;
    const CvResult res = cross_validate(ds, structure, lambda_grid, gamma_grid,
                                        cv_folds, cv_T, cfg, cv_c.seed);
    const SalassoTrajectory tr = fit_salasso(ds, structure, cv_T, res.lambda_hat,
                                             res.gamma_hat, cfg, res.lambda0_hat);
    const Vector w = tr.weights.back().values;
    write_beta_csv(cv_c.out, tr.final_beta(), &w);
    json j;
    j["lambda0_hat"] = res.lambda0_hat;
    j["lambda_hat"] = res.lambda_hat;
    j["gamma_hat"] = res.gamma_hat;
    j["lambda_grid"] = res.lambda_grid;
    j["gamma_grid"] = res.gamma_grid;
    j["stage_a_error"] = res.stage_a_error;
    j["cv_error"] = json::array();
    for (Index i = 0; i < res.cv_error.rows(); ++i) {
      json row = json::array();
      for (Index g = 0; g < res.cv_error.cols(); ++g) row.push_back(res.cv_error(i, g));
      j["cv_error"].push_back(row);
    }
    j["refit"] = trajectory_json(tr);
    j["out"] = cv_c.out;
    write_text(stem_of(cv_c.out) + "_cv.json", j.dump(2));
    std::cout << json{{"lambda0_hat", res.lambda0_hat},
                      {"lambda_hat", res.lambda_hat},
                      {"gamma_hat", res.gamma_hat},
                      {"out", cv_c.out},
                      {"report", stem_of(cv_c.out) + "_cv.json"}}
                     .dump(2)
              << '\n';
  });

  // --- amp ---
  auto* amp = app.add_subcommand("amp", "Message-passing solver");
  CommonOpts amp_c;
  std::string amp_data, amp_structure;
  double amp_alpha = 1.25, amp_gamma = 1.0, amp_tol = 1e-9;
  int amp_max_iter = 500;
  bool amp_plain = false;
  add_common(amp, amp_c, "beta.csv");
  amp->add_option("--data", amp_data, "Input dataset CSV")->required();
  amp->add_option("--structure", amp_structure, "Structure CSV; enables the weighted stage");
  amp->add_option("--alpha", amp_alpha, "Threshold constant");
  amp->add_option("--gamma", amp_gamma, "Weight exponent for the second stage");
  amp->add_option("--tol", amp_tol, "Relative change tolerance");
  amp->add_option("--max-iter", amp_max_iter, "Iteration cap");
  amp->add_flag("--plain", amp_plain, "Skip the weighted stage even with --structure");
  amp->callback([&] {
    if (maybe_dump(amp, amp_c)) return;
    kernels::set_threads(amp_c.threads);
    const LinearDataset ds = load_regression_csv(amp_data);
    AmpConfig cfg;
    cfg.tol = amp_tol;
    cfg.max_iter = amp_max_iter;
    const StructureSpec structure = load_structure_or_none(amp_structure, ds.p());
    json j;
    if (amp_plain || std::holds_alternative<NoStructure>(structure)) {
      const AmpResult r = amp_lasso(ds, amp_alpha, cfg);
      write_beta_csv(amp_c.out, r.beta);
      j["plain"] = amp_json(r, ds.n(), ds.p());
    } else if (const auto* gs = std::get_if<GroupStructure>(&structure)) {
      const AmpStages st = amp_salasso_group(ds, gs->partition, amp_alpha, amp_gamma, cfg);
      write_beta_csv(amp_c.out, st.weighted.beta, &st.weights.values);
      j["plain"] = amp_json(st.plain, ds.n(), ds.p());
      j["weighted"] = amp_json(st.weighted, ds.n(), ds.p());
    } else {
      const auto& cs = std::get<CovariateStructure>(structure);
      const AmpStages st = amp_salasso_covariate(ds, cs.U, amp_alpha, amp_gamma, cfg);
      write_beta_csv(amp_c.out, st.weighted.beta, &st.weights.values);
      j["plain"] = amp_json(st.plain, ds.n(), ds.p());
      j["weighted"] = amp_json(st.weighted, ds.n(), ds.p());
    }
    j["out"] = amp_c.out;
    std::cout << j.dump(2) << '\n';
  });

  // --- se ---
  auto* se = app.add_subcommand("se", "Fixed-point theory and risk prediction");
  CommonOpts se_c;
  std::string se_variant = "lasso", se_preset = "group";
  double se_delta = 0.64, se_sigma2 = 0.2, se_alpha = 1.25, se_alpha_lasso = 1.25,
         se_gamma = 1.0;
  int se_n_hermite = 61;
  long se_n_mc = 20000;
  add_common(se, se_c, "");
  se->add_option("--variant", se_variant, "lasso | group | covariate")
      ->check(CLI::IsMember({"lasso", "group", "covariate"}));
  se->add_option("--preset", se_preset, "Signal prior: group | covariate | null")
      ->check(CLI::IsMember({"group", "covariate", "null"}));
  se->add_option("--delta", se_delta, "Aspect ratio n/p");
  se->add_option("--sigma2", se_sigma2, "Noise variance");
  se->add_option("--alpha", se_alpha, "Threshold constant for the reported stage");
  se->add_option("--alpha-lasso", se_alpha_lasso, "Threshold constant for the weight stage");
  se->add_option("--gamma", se_gamma, "Weight exponent");
  se->add_option("--n-hermite", se_n_hermite, "Quadrature nodes");
  se->add_option("--n-mc", se_n_mc, "Covariate-average sample count");
  se->callback([&] {
    if (maybe_dump(se, se_c)) return;
    const QuadratureSpec quad{se_n_hermite, se_n_mc, se_c.seed};
    json j;
    const auto fill = [&](const SETrace& tr) {
      j["tau_star_sq"] = tr.tau_star * tr.tau_star;
      j["implied_lambda"] = tr.implied_lambda;
      j["predicted_risk"] = tr.predicted_risk;
      j["iterations"] = tr.tau_sequence.size();
      j["converged"] = tr.converged;
      j["variant"] = tr.variant;
    };
    const GroupPrior gp = se_preset == "covariate"
                              ? marginal_group_prior(covariate_preset())
                              : (se_preset == "null" ? GroupPrior{{{1.0, 1.0, 0.0, 0.0}}}
                                                     : group_preset());
    if (se_variant == "lasso") {
      if (se_preset == "covariate") {
        fill(se_lasso(SignalPrior{covariate_preset()}, se_delta, se_sigma2, se_alpha, quad));
      } else {
        fill(se_lasso(SignalPrior{gp}, se_delta, se_sigma2, se_alpha, quad));
      }
    } else if (se_variant == "group") {
      const AsymptoticWeights aw =
          asymptotic_weights_group(gp, se_delta, se_sigma2, se_alpha_lasso, se_gamma, quad);
      fill(se_salasso_group(gp, se_delta, se_sigma2, se_alpha, aw.omega, quad));
      j["omega"] = aw.omega;
      j["lambda_lasso_stage"] = aw.lasso_stage.implied_lambda;
    } else {
      const CovariateSE pipe = se_salasso_covariate_pipeline(
          covariate_preset(), se_delta, se_sigma2, se_alpha_lasso, se_alpha, se_gamma, quad);
      fill(pipe.trace);
      j["tau0"] = pipe.tau_map.tau0;
      j["tau1"] = std::vector<double>(pipe.tau_map.tau1.begin(), pipe.tau_map.tau1.end());
      j["lambda_lasso_stage"] = pipe.lasso_stage.implied_lambda;
    }
    const std::string text = j.dump(2);
    if (!se_c.out.empty()) write_text(se_c.out, text);
    std::cout << text << '\n';
  });

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "Batch experiments (CSV + JSON summary)");
  CommonOpts sweep_c;
  ExperimentConfig ecfg;
  add_common(sweep, sweep_c, "experiment.csv");
  sweep->add_option("--kind", ecfg.kind, "se_sweep | amp_vs_solver | fig1 | locmodel_bound")
      ->check(CLI::IsMember({"se_sweep", "amp_vs_solver", "fig1", "locmodel_bound"}));
  sweep->add_option("--preset", ecfg.preset, "group | covariate | null");
  sweep->add_option("--design", ecfg.design, "iid | binary | ar1 | equicorrelated");
  sweep->add_option("--p", ecfg.p, "Number of features");
  sweep->add_option("--delta", ecfg.delta, "Aspect ratio n/p");
  sweep->add_option("--sigma2", ecfg.sigma2, "Noise variance");
  sweep->add_option("--gamma", ecfg.gamma, "Weight exponent");
  sweep->add_option("--alpha-lasso", ecfg.alpha_lasso, "Weight-stage threshold constant");
  sweep->add_option("--alpha-grid", ecfg.alpha_grid, "Threshold grid (default per kind)")
      ->delimiter(',');
  sweep->add_option("--replications", ecfg.replications, "Replicates per cell");
  sweep->add_option("--stages", ecfg.T, "Weight refits after stage 0");
  sweep->add_option("--n-hermite", ecfg.quad.n_hermite, "Quadrature nodes");
  sweep->add_option("--n-mc", ecfg.quad.n_mc, "Covariate-average sample count");
  sweep->add_option("--loc-a", ecfg.loc_a, "Location-model group levels")->delimiter(',');
  sweep->add_option("--loc-nd", ecfg.loc_nd, "Observations per location group");
  sweep->add_option("--loc-tau-pilot", ecfg.loc_tau_pilot, "Pilot threshold");
  sweep->add_option("--loc-n-mc", ecfg.loc_n_mc, "Monte Carlo draws for ratio moments");
  sweep->callback([&] {
    if (maybe_dump(sweep, sweep_c)) return;
    ecfg.seed = sweep_c.seed;
    ecfg.threads = sweep_c.threads;
    ecfg.out = sweep_c.out;
    ecfg.quad.seed = sweep_c.seed;
    const ExperimentResult res = run_experiment(ecfg);
    std::cout << json{{"rows", res.rows.size()},
                      {"csv", res.csv_path},
                      {"summary", res.json_path}}
                     .dump(2)
              << '\n';
  });

  // --- locmodel ---
  auto* loc = app.add_subcommand("locmodel", "Grouped-location estimator analysis");
  CommonOpts loc_c;
  std::vector<double> loc_a = {0.0, 2.5, 3.0, 3.5};
  Index loc_nd = 10000;
  double loc_sigma2 = 1.0, loc_tau_pilot = 1.0;
  long loc_n_mc = 400;
  int loc_reps = 20;
  add_common(loc, loc_c, "locmodel.json");
  loc->add_option("--a", loc_a, "Group signal levels, first entry the null group")
      ->delimiter(',');
  loc->add_option("--nd", loc_nd, "Observations per group");
  loc->add_option("--sigma2", loc_sigma2, "Noise variance");
  loc->add_option("--tau-pilot", loc_tau_pilot, "Pilot threshold");
  loc->add_option("--n-mc", loc_n_mc, "Monte Carlo draws for ratio moments");
  loc->add_option("--replications", loc_reps, "Replicates for the empirical risk");
  loc->callback([&] {
    if (maybe_dump(loc, loc_c)) return;
    kernels::set_threads(loc_c.threads);
    const std::vector<Index> sizes(loc_a.size(), loc_nd);
    const RiskBoundReport rep =
        risk_bound(loc_a, sizes, loc_sigma2, loc_tau_pilot, loc_n_mc, loc_c.seed);
    json j;
    j["condition"] = {{"holds", rep.condition.holds},
                      {"margin", rep.condition.margin},
                      {"per_group", rep.condition.per_group},
                      {"ratio_mean", rep.condition.ratios.mean},
                      {"ratio_se", rep.condition.ratios.se}};
    j["bound"] = rep.bound;
    j["bound_per_group"] = rep.per_group;
    j["m0"] = location_m0(std::sqrt(loc_sigma2));
    std::vector<double> losses;
    double universal = 0.0;
    for (int r = 0; r < loc_reps; ++r) {
      const std::uint64_t seed = loc_c.seed + 1000 + static_cast<std::uint64_t>(r);
      const LocationInstance inst = gen_location_instance(loc_a, sizes, loc_sigma2, seed);
      const auto pilot = pilot_group_means(inst.y, inst.partition, loc_tau_pilot);
      const Vector mu_hat = location_estimator(inst.y, inst.partition, pilot, loc_sigma2);
      losses.push_back(signal_group_loss(inst, mu_hat));
      if (r == 0) universal = universal_risk_bound(inst.mu, loc_sigma2);
    }
    double mean = 0.0;
    for (double v : losses) mean += v;
    mean /= static_cast<double>(losses.size());
    double var = 0.0;
    for (double v : losses) var += (v - mean) * (v - mean);
    const double sem = losses.size() > 1
                           ? std::sqrt(var / (static_cast<double>(losses.size()) *
                                              (static_cast<double>(losses.size()) - 1.0)))
                           : 0.0;
    j["replicate_loss"] = losses;
    j["mean_loss"] = mean;
    j["se_loss"] = sem;
    j["universal_reference"] = universal;
    const std::string text = j.dump(2);
    write_text(loc_c.out, text);
    std::cout << text << '\n';
  });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const salasso::SalassoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
