#include "salasso/state_evolution.hpp"

#include "salasso/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace salasso {

namespace {

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_se_inputs(double delta, double sigma2) {
  if (!(delta > 0.0)) throw NonFiniteEntry("undersampling ratio must be positive");
  if (!(sigma2 >= 0.0)) throw NonFiniteEntry("noise variance must be nonnegative");
}

// Damped fixed-point iteration on tau^2. The step is damped by half on each
// sign flip of the update, which kills the oscillation the plain recursion
// shows near the fixed point at small delta.
struct FixedPoint {
  std::vector<double> tau_sequence;
  double tau2 = 0.0;
  bool converged = false;
};

FixedPoint solve_fixed_point(const std::function<double(double)>& next_tau2,
                             double tau2_init, double tol = 1e-10,
                             int max_iter = 10000) {
  FixedPoint fp;
  fp.tau2 = tau2_init;
  fp.tau_sequence.push_back(std::sqrt(tau2_init));
  double damp = 1.0;
  double last_step = 0.0;
  for (int t = 0; t < max_iter; ++t) {
    const double target = next_tau2(fp.tau2);
    if (!std::isfinite(target)) {
      throw FixedPointNotReached("tau^2 recursion diverged to a non-finite value after " +
                                 std::to_string(t) + " iterations");
    }
    const double step = target - fp.tau2;
    if (last_step * step < 0.0) {
      damp = std::max(0.5 * damp, 1e-4);
    } else {
      damp = std::min(1.0, 1.25 * damp);
    }
    fp.tau2 += damp * step;
    fp.tau_sequence.push_back(std::sqrt(std::max(fp.tau2, 0.0)));
    if (std::abs(step) <= tol * std::max(1.0, fp.tau2)) {
      fp.converged = true;
      break;
    }
    last_step = step;
  }
  if (!fp.converged) {
    throw FixedPointNotReached("no fixed point after " + std::to_string(max_iter) +
                               " iterations; last tau^2 = " + std::to_string(fp.tau2));
  }
  return fp;
}

SETrace make_trace(const FixedPoint& fp, double alpha, double delta, double sigma2,
                   double active_mean, const std::string& variant) {
  SETrace out;
  out.tau_sequence = fp.tau_sequence;
  out.tau_star = std::sqrt(std::max(fp.tau2, 0.0));
  out.alpha = alpha;
  out.implied_lambda = alpha * out.tau_star * (1.0 - active_mean / delta);
  out.predicted_risk = predicted_risk(out.tau_star, sigma2, delta);
  out.variant = variant;
  out.converged = fp.converged;
  return out;
}

std::vector<double> scaled_thresholds(const std::vector<double>& omega, double alpha,
                                      double tau) {
  std::vector<double> th(omega.size());
  for (std::size_t d = 0; d < omega.size(); ++d) th[d] = alpha * tau * omega[d];
  return th;
}

}  // namespace

GroupPrior marginal_group_prior(const CovariatePrior& prior) {
  GroupPrior out;
  for (const auto& comp : prior.components) {
    double pi_bar;
    if (comp.pi_hi > comp.pi_lo) {
      const double lo = logit(comp.pi_lo), hi = logit(comp.pi_hi);
      pi_bar = (softplus(hi) - softplus(lo)) / (hi - lo);
    } else {
      pi_bar = comp.pi_lo;
    }
    out.components.push_back({comp.c, pi_bar, comp.mu, comp.s});
  }
  return out;
}

GroupPrior as_group_prior(const SignalPrior& prior) {
  if (const auto* g = std::get_if<GroupPrior>(&prior)) return *g;
  return marginal_group_prior(std::get<CovariatePrior>(prior));
}

SETrace se_lasso(const SignalPrior& prior, double delta, double sigma2, double alpha,
                 const QuadratureSpec& quad) {
  check_se_inputs(delta, sigma2);
  const GroupPrior gp = validate_group_prior(as_group_prior(prior));
  const GaussHermite gh = gauss_hermite(quad.n_hermite);
  const double eb2 = second_moment(gp);

  if (sigma2 == 0.0 && eb2 == 0.0) {
    SETrace out;
    out.tau_sequence = {0.0};
    out.alpha = alpha;
    out.variant = "lasso";
    out.converged = true;
    return out;
  }

  auto next = [&](double tau2) {
    const double tau = std::sqrt(tau2);
    return sigma2 + mse_expectation(gp, tau, alpha * tau, gh) / delta;
  };
  const FixedPoint fp = solve_fixed_point(next, sigma2 + eb2 / delta);
  const double tau = std::sqrt(fp.tau2);
  const double active = active_expectation(gp, tau, alpha * tau, gh);
  return make_trace(fp, alpha, delta, sigma2, active, "lasso");
}

AsymptoticWeights asymptotic_weights_group(const GroupPrior& prior, double delta,
                                           double sigma2, double alpha, double gamma,
                                           const QuadratureSpec& quad, double cap) {
  check_gamma(gamma);
  AsymptoticWeights out;
  out.lasso_stage = se_lasso(prior, delta, sigma2, alpha, quad);
  const GaussHermite gh = gauss_hermite(quad.n_hermite);
  const double tau = out.lasso_stage.tau_star;
  const double theta = alpha * tau;
  out.omega.resize(prior.components.size());
  for (std::size_t d = 0; d < prior.components.size(); ++d) {
    GroupPrior single{{prior.components[d]}};
    single.components[0].c = 1.0;
    const double m = tau > 0.0 ? absmean_expectation(single, tau, theta, gh) : 0.0;
    out.omega[d] = m > 0.0 ? std::min(std::pow(m, -gamma), cap) : cap;
  }
  return out;
}

SETrace se_salasso_group(const GroupPrior& prior, double delta, double sigma2,
                         double alpha, const std::vector<double>& omega,
                         const QuadratureSpec& quad) {
  check_se_inputs(delta, sigma2);
  const GroupPrior gp = validate_group_prior(prior);
  if (omega.size() != gp.components.size()) {
    throw DimensionMismatch("one omega per prior component required");
  }
  const GaussHermite gh = gauss_hermite(quad.n_hermite);
  const double eb2 = second_moment(gp);

  if (sigma2 == 0.0 && eb2 == 0.0) {
    SETrace out;
    out.tau_sequence = {0.0};
    out.alpha = alpha;
    out.variant = "group";
    out.converged = true;
    return out;
  }

  auto next = [&](double tau2) {
    const double tau = std::sqrt(tau2);
    return sigma2 + mixture_mse(gp, tau, scaled_thresholds(omega, alpha, tau), gh) / delta;
  };
  const FixedPoint fp = solve_fixed_point(next, sigma2 + eb2 / delta);
  const double tau = std::sqrt(fp.tau2);
  const double active = mixture_active(gp, tau, scaled_thresholds(omega, alpha, tau), gh);
  return make_trace(fp, alpha, delta, sigma2, active, "group");
}

USamples draw_u_samples(const CovariatePrior& prior, long n_mc, std::uint64_t seed) {
  validate_covariate_prior(prior);
  if (n_mc < 1) throw InvalidQuadrature("need at least one covariate draw");
  const std::size_t D = prior.components.size();
  // Stratified counts: floor(c_d n), remainder to the last component.
  std::vector<long> counts(D);
  long used = 0;
  for (std::size_t d = 0; d + 1 < D; ++d) {
    counts[d] = static_cast<long>(std::floor(prior.components[d].c * static_cast<double>(n_mc)));
    used += counts[d];
  }
  counts[D - 1] = n_mc - used;

  USamples us;
  us.component.reserve(static_cast<std::size_t>(n_mc));
  us.u.resize(n_mc);
  us.pi0.resize(n_mc);
  RandomField field(seed, make_stream(StreamTag::u_samples));
  long i = 0;
  for (std::size_t d = 0; d < D; ++d) {
    const double lo = logit(prior.components[d].pi_lo);
    const double hi = logit(prior.components[d].pi_hi);
    for (long k = 0; k < counts[d]; ++k, ++i) {
      const double u = lo + field.uniform(static_cast<std::uint64_t>(i)) * (hi - lo);
      us.component.push_back(static_cast<int>(d));
      us.u(i) = u;
      us.pi0(i) = logistic(u);
    }
  }
  return us;
}

CovariateTau limit_covariate_tau(const CovariatePrior& prior, const SETrace& lasso_stage,
                                 double gamma, const USamples& us,
                                 const QuadratureSpec& quad, double box_lo,
                                 double box_hi) {
  const GaussHermite gh = gauss_hermite(quad.n_hermite);
  const double tau = lasso_stage.tau_star;
  const double theta = lasso_stage.alpha * tau;
  const std::size_t D = prior.components.size();

  // Expected magnitude given the covariate: the atom part is shared, the
  // slab part depends only on the component.
  const double atom = soft_threshold_absmean(0.0, tau, theta);
  std::vector<double> slab(D, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    const auto& comp = prior.components[d];
    if (comp.s == 0.0) {
      slab[d] = soft_threshold_absmean(comp.mu, tau, theta);
    } else {
      for (Index k = 0; k < gh.nodes.size(); ++k) {
        slab[d] += gh.weights(k) *
                   soft_threshold_absmean(comp.mu + comp.s * gh.nodes(k), tau, theta);
      }
    }
  }

  const long M = us.u.size();
  Vector m(M);
  Matrix U(M, 1);
  for (long i = 0; i < M; ++i) {
    const double pi = us.pi0(i);
    m(i) = pi * atom + (1.0 - pi) * slab[static_cast<std::size_t>(us.component[static_cast<std::size_t>(i)])];
    U(i, 0) = us.u(i);
  }
  return fit_covariate_tau(m, U, gamma, box_lo, box_hi).tau;
}

namespace {

// Mixture expectations with per-draw thresholds theta_i = alpha tau w(u_i).
template <typename Fn>
double usample_expect(const CovariatePrior& prior, const USamples& us,
                      const Vector& w_of_u, double alpha, double tau,
                      const GaussHermite& gh, Fn&& conditional) {
  const std::size_t D = prior.components.size();
  double total = 0.0;
  for (long i = 0; i < us.u.size(); ++i) {
    const double th = alpha * tau * w_of_u(i);
    const auto& comp = prior.components[static_cast<std::size_t>(us.component[static_cast<std::size_t>(i)])];
    const double pi = us.pi0(i);
    double val = pi * conditional(0.0, th);
    if (pi < 1.0) {
      double slab = 0.0;
      if (comp.s == 0.0) {
        slab = conditional(comp.mu, th);
      } else {
        for (Index k = 0; k < gh.nodes.size(); ++k) {
          slab += gh.weights(k) * conditional(comp.mu + comp.s * gh.nodes(k), th);
        }
      }
      val += (1.0 - pi) * slab;
    }
    total += val;
  }
  (void)D;
  return total / static_cast<double>(us.u.size());
}

}  // namespace

SETrace se_salasso_covariate(const CovariatePrior& prior, double delta, double sigma2,
                             double alpha, const CovariateTau& tau_map,
                             const USamples& us, const QuadratureSpec& quad,
                             double cap) {
  check_se_inputs(delta, sigma2);
  validate_covariate_prior(prior);
  if (us.u.size() == 0) throw InvalidQuadrature("empty covariate sample");
  if (tau_map.tau1.size() != 1) {
    throw DimensionMismatch("covariate weight map must have one slope for scalar u");
  }
  const GaussHermite gh = gauss_hermite(quad.n_hermite);

  const long M = us.u.size();
  Vector w_of_u(M);
  for (long i = 0; i < M; ++i) {
    w_of_u(i) = std::min(std::exp(tau_map.tau0 + tau_map.tau1(0) * us.u(i)), cap);
  }

  // Sample-consistent second moment so the recursion and its seed use the
  // same measure over (U, B).
  double eb2 = 0.0;
  for (long i = 0; i < M; ++i) {
    const auto& comp = prior.components[static_cast<std::size_t>(us.component[static_cast<std::size_t>(i)])];
    eb2 += (1.0 - us.pi0(i)) * (comp.mu * comp.mu + comp.s * comp.s);
  }
  eb2 /= static_cast<double>(M);

  if (sigma2 == 0.0 && eb2 == 0.0) {
    SETrace out;
    out.tau_sequence = {0.0};
    out.alpha = alpha;
    out.variant = "covariate";
    out.converged = true;
    return out;
  }

  auto next = [&](double tau2) {
    const double tau = std::sqrt(tau2);
    const double mse = usample_expect(prior, us, w_of_u, alpha, tau, gh,
                                      [tau](double b, double th) {
                                        return soft_threshold_risk(b, tau, th);
                                      });
    return sigma2 + mse / delta;
  };
  const FixedPoint fp = solve_fixed_point(next, sigma2 + eb2 / delta);
  const double tau = std::sqrt(fp.tau2);
  const double active = usample_expect(prior, us, w_of_u, alpha, tau, gh,
                                       [tau](double b, double th) {
                                         return active_probability(b, tau, th);
                                       });
  return make_trace(fp, alpha, delta, sigma2, active, "covariate");
}

CovariateSE se_salasso_covariate_pipeline(const CovariatePrior& prior, double delta,
                                          double sigma2, double alpha_lasso,
                                          double alpha, double gamma,
                                          const QuadratureSpec& quad, double box_lo,
                                          double box_hi, double cap) {
  CovariateSE out;
  out.lasso_stage = se_lasso(SignalPrior{prior}, delta, sigma2, alpha_lasso, quad);
  const USamples us = draw_u_samples(prior, quad.n_mc, quad.seed);
  out.tau_map = limit_covariate_tau(prior, out.lasso_stage, gamma, us, quad,
                                    box_lo, box_hi);
  out.trace = se_salasso_covariate(prior, delta, sigma2, alpha, out.tau_map, us,
                                   quad, cap);
  return out;
}

double lambda_of_alpha_lasso(const SignalPrior& prior, double delta, double sigma2,
                             double alpha, const QuadratureSpec& quad) {
  return se_lasso(prior, delta, sigma2, alpha, quad).implied_lambda;
}

double lambda_of_alpha_group(const GroupPrior& prior, double delta, double sigma2,
                             double alpha, const std::vector<double>& omega,
                             const QuadratureSpec& quad) {
  return se_salasso_group(prior, delta, sigma2, alpha, omega, quad).implied_lambda;
}

double lambda_of_alpha_covariate(const CovariatePrior& prior, double delta,
                                 double sigma2, double alpha,
                                 const CovariateTau& tau_map, const USamples& us,
                                 const QuadratureSpec& quad) {
  return se_salasso_covariate(prior, delta, sigma2, alpha, tau_map, us, quad)
      .implied_lambda;
}

double predicted_risk(double tau_star, double sigma2, double delta) {
  const double gap = tau_star * tau_star - sigma2;
  if (gap < -1e-12) {
    throw NegativeRisk("tau*^2 = " + std::to_string(tau_star * tau_star) +
                       " is below sigma^2 = " + std::to_string(sigma2));
  }
  return delta * std::max(gap, 0.0);
}

}  // namespace salasso
