#pragma once

#include "salasso/quadrature.hpp"
#include "salasso/types.hpp"
#include "salasso/weights.hpp"

#include <string>
#include <vector>

namespace salasso {

// Scalar recursion tau_{t+1}^2 = sigma^2 + delta^-1 E{eta(B + tau_t Z) - B}^2
// tracked to its fixed point, plus the quantities read off there.
struct SETrace {
  std::vector<double> tau_sequence;  // tau_0, tau_1, ... (not squared)
  double tau_star = 0.0;
  double alpha = 0.0;
  double implied_lambda = 0.0;  // alpha tau* [1 - delta^-1 E eta'] (unit-norm scale)
  double predicted_risk = 0.0;  // delta (tau*^2 - sigma^2)
  std::string variant;
  bool converged = false;
};

// Integrating the covariate out of the zero-probability gives an ordinary
// point-normal mixture; exact via softplus differences.
GroupPrior marginal_group_prior(const CovariatePrior& prior);
GroupPrior as_group_prior(const SignalPrior& prior);

SETrace se_lasso(const SignalPrior& prior, double delta, double sigma2,
                 double alpha, const QuadratureSpec& quad = {});

// Large-system weights for the group rule, computed from the lasso-stage
// fixed point: omega_d = min(m_d^-gamma, cap), m_d the per-component E|eta|.
struct AsymptoticWeights {
  std::vector<double> omega;
  SETrace lasso_stage;
};
AsymptoticWeights asymptotic_weights_group(const GroupPrior& prior, double delta,
                                           double sigma2, double alpha, double gamma,
                                           const QuadratureSpec& quad = {},
                                           double cap = kDefaultWeightCap);

SETrace se_salasso_group(const GroupPrior& prior, double delta, double sigma2,
                         double alpha, const std::vector<double>& omega,
                         const QuadratureSpec& quad = {});

// Frozen draws of the covariate mixing variable; all covariate-variant
// expectations for one solve reuse the same draws.
struct USamples {
  std::vector<int> component;
  Vector u;    // covariate value (logit units)
  Vector pi0;  // logistic(u)
};
USamples draw_u_samples(const CovariatePrior& prior, long n_mc, std::uint64_t seed);

// Weight-map parameters in the large-p limit: the empirical objective with
// |beta_j| replaced by the expected magnitude m(u) at the lasso-stage fixed
// point. Reuses the finite-p optimizer on pseudo-data.
CovariateTau limit_covariate_tau(const CovariatePrior& prior, const SETrace& lasso_stage,
                                 double gamma, const USamples& us,
                                 const QuadratureSpec& quad = {},
                                 double box_lo = -20.0, double box_hi = 20.0);

SETrace se_salasso_covariate(const CovariatePrior& prior, double delta, double sigma2,
                             double alpha, const CovariateTau& tau_map,
                             const USamples& us, const QuadratureSpec& quad = {},
                             double cap = kDefaultWeightCap);

// Full covariate pipeline: lasso stage at alpha_lasso, limit weight map,
// weighted stage at alpha.
struct CovariateSE {
  SETrace lasso_stage;
  CovariateTau tau_map;
  SETrace trace;
};
CovariateSE se_salasso_covariate_pipeline(const CovariatePrior& prior, double delta,
                                          double sigma2, double alpha_lasso,
                                          double alpha, double gamma,
                                          const QuadratureSpec& quad = {},
                                          double box_lo = -20.0, double box_hi = 20.0,
                                          double cap = kDefaultWeightCap);

double lambda_of_alpha_lasso(const SignalPrior& prior, double delta, double sigma2,
                             double alpha, const QuadratureSpec& quad = {});
double lambda_of_alpha_group(const GroupPrior& prior, double delta, double sigma2,
                             double alpha, const std::vector<double>& omega,
                             const QuadratureSpec& quad = {});
double lambda_of_alpha_covariate(const CovariatePrior& prior, double delta,
                                 double sigma2, double alpha,
                                 const CovariateTau& tau_map, const USamples& us,
                                 const QuadratureSpec& quad = {});

// delta (tau*^2 - sigma^2); throws NegativeRisk below -1e-12, clamps tiny
// negatives to zero.
double predicted_risk(double tau_star, double sigma2, double delta);

}  // namespace salasso
