#pragma once

#include "salasso/types.hpp"

namespace salasso {

struct QuadratureSpec {
  int n_hermite = 61;           // slab nodes; must be >= 2
  long n_mc = 100000;           // covariate-draw count for the mixing variable
  std::uint64_t seed = 1;       // stream for those draws
};

// Nodes/weights integrating E f(Z) for Z ~ N(0,1) (weights sum to 1).
struct GaussHermite {
  Vector nodes;
  Vector weights;
};
GaussHermite gauss_hermite(int n);  // throws InvalidQuadrature for n < 2

// Exact Z-integrals of the soft thresholder at observation b + tau Z with
// threshold theta >= 0. Stable for huge theta (capped weights).
double soft_threshold_risk(double b, double tau, double theta);     // E (eta - b)^2
double active_probability(double b, double tau, double theta);      // E eta'
double soft_threshold_absmean(double b, double tau, double theta);  // E |eta|

// Expectations over a point-normal mixture B with per-component thresholds:
// the zero atom is handled exactly, the slab by Gauss-Hermite.
double mixture_mse(const GroupPrior& prior, double tau,
                   const std::vector<double>& theta, const GaussHermite& gh);
double mixture_active(const GroupPrior& prior, double tau,
                      const std::vector<double>& theta, const GaussHermite& gh);
double mixture_absmean(const GroupPrior& prior, double tau,
                       const std::vector<double>& theta, const GaussHermite& gh);

// Scalar-threshold forms (the plain-lasso case).
double mse_expectation(const GroupPrior& prior, double tau, double theta,
                       const GaussHermite& gh);
double active_expectation(const GroupPrior& prior, double tau, double theta,
                          const GaussHermite& gh);
double absmean_expectation(const GroupPrior& prior, double tau, double theta,
                           const GaussHermite& gh);

double second_moment(const GroupPrior& prior);  // E B^2

double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace salasso
