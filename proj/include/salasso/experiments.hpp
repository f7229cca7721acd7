#pragma once

#include "salasso/metrics.hpp"
#include "salasso/quadrature.hpp"
#include "salasso/simgen.hpp"
#include "salasso/types.hpp"

#include <string>
#include <vector>

namespace salasso {

// One driver per study shape:
//   se_sweep       pure theory: alpha grid -> (lambda, predicted risk) rows
//   amp_vs_solver  per-replicate relative l2 gap between the AMP fixed point
//                  and the penalized solver at the corresponding lambda
//   fig1           risk-vs-lambda curves, empirical and predicted, for the
//                  plain and structure-weighted fits
//   locmodel_bound grouped-location estimator risk vs its bound
struct ExperimentConfig {
  std::string kind = "se_sweep";
  std::string preset = "group";  // group | covariate
  std::string design = "iid";
  Index p = 500;
  double delta = 0.64;
  double sigma2 = 0.2;
  double gamma = 1.0;
  double alpha_lasso = 1.25;          // weight-stage threshold constant
  std::vector<double> alpha_grid;     // empty -> kind-specific default
  int replications = 20;
  int T = 1;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "experiment.csv";  // JSON summary lands beside it
  QuadratureSpec quad{61, 20000, 1};
  // locmodel_bound only:
  std::vector<double> loc_a = {0.0, 2.5, 3.0, 3.5};
  Index loc_nd = 10000;
  double loc_tau_pilot = 1.0;
  long loc_n_mc = 400;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::string csv_path;
  std::string json_path;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Summary written beside the CSV: per (method, lambda) means and standard
// errors recomputed from the rows, plus the configuration.
std::string summary_json(const ExperimentConfig& cfg, const std::vector<MetricsRow>& rows);

}  // namespace salasso
