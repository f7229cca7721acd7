#include "salasso/locmodel.hpp"

#include "salasso/quadrature.hpp"
#include "salasso/rng.hpp"
#include "salasso/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace salasso {

namespace {

inline double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void check_location_args(const std::vector<double>& a, const std::vector<Index>& sizes,
                         double sigma2) {
  if (a.size() != sizes.size()) {
    throw DimensionMismatch("need one signal level per group");
  }
  if (a.size() < 2) throw EmptyGroup("need a null group plus at least one signal group");
  if (!(sigma2 > 0.0)) throw NonFiniteEntry("sigma2 must be positive");
  for (Index s : sizes) {
    if (s < 1) throw EmptyGroup("every group needs at least one observation");
  }
}

}  // namespace

LocationInstance gen_location_instance(const std::vector<double>& a,
                                       const std::vector<Index>& sizes,
                                       double sigma2, std::uint64_t seed) {
  check_location_args(a, sizes, sigma2);
  LocationInstance inst;
  inst.sigma2 = sigma2;
  inst.partition = contiguous_partition(sizes);
  Index n = 0;
  for (Index s : sizes) n += s;
  inst.mu.resize(n);
  inst.y.resize(n);
  const double sd = std::sqrt(sigma2);
  RandomField field(seed, make_stream(StreamTag::location_noise));
  for (std::size_t d = 0; d < inst.partition.size(); ++d) {
    for (Index i : inst.partition[d]) {
      inst.mu(i) = a[d];
      inst.y(i) = a[d] + sd * field.normal(static_cast<std::uint64_t>(i));
    }
  }
  return inst;
}

double location_m0(double sigma) { return sigma * std::sqrt(2.0 / M_PI); }

std::vector<double> pilot_group_means(const Vector& y, const Partition& partition,
                                      double tau) {
  validate_partition(partition, y.size());
  if (tau < 0.0) throw NegativeThreshold("pilot threshold is negative");
  std::vector<double> means(partition.size(), 0.0);
  for (std::size_t d = 0; d < partition.size(); ++d) {
    double acc = 0.0;
    for (Index i : partition[d]) acc += std::abs(soft(y(i), tau));
    means[d] = acc / static_cast<double>(partition[d].size());
  }
  return means;
}

Vector location_estimator(const Vector& y, const Partition& partition,
                          const std::vector<double>& pilot_means, double sigma2) {
  validate_partition(partition, y.size());
  if (pilot_means.size() != partition.size()) {
    throw DimensionMismatch("need one pilot mean per group");
  }
  const double sigma = std::sqrt(sigma2);
  const double m0 = location_m0(sigma);
  Vector mu_hat = Vector::Zero(y.size());
  for (std::size_t d = 0; d < partition.size(); ++d) {
    if (pilot_means[d] <= 0.0) continue;  // whole group estimated as zero
    const double n_d = static_cast<double>(partition[d].size());
    const double lambda_d = sigma * m0 * std::sqrt(2.0 * std::log(n_d));
    const double threshold = lambda_d / pilot_means[d];
    for (Index i : partition[d]) mu_hat(i) = soft(y(i), threshold);
  }
  return mu_hat;
}

RatioMoments ratio_second_moments(const std::vector<double>& a,
                                  const std::vector<Index>& sizes, double sigma2,
                                  double tau_pilot, long n_mc, std::uint64_t seed) {
  check_location_args(a, sizes, sigma2);
  if (n_mc < 2) throw InvalidQuadrature("need at least 2 replications");
  const double sigma = std::sqrt(sigma2);
  const double m0 = location_m0(sigma);

  RatioMoments out;
  out.mean.resize(a.size() - 1);
  out.se.resize(a.size() - 1);
  for (std::size_t d = 1; d < a.size(); ++d) {
    RandomStream stream(seed, make_stream(StreamTag::monte_carlo, d));
    const double n_d = static_cast<double>(sizes[d]);
    double acc = 0.0, acc2 = 0.0;
    for (long r = 0; r < n_mc; ++r) {
      double mean_abs = 0.0;
      for (Index i = 0; i < sizes[d]; ++i) {
        mean_abs += std::abs(soft(a[d] + sigma * stream.normal(), tau_pilot));
      }
      mean_abs /= n_d;
      const double ratio2 = (m0 / mean_abs) * (m0 / mean_abs);
      acc += ratio2;
      acc2 += ratio2 * ratio2;
    }
    const double mean = acc / static_cast<double>(n_mc);
    const double var =
        std::max(0.0, acc2 / static_cast<double>(n_mc) - mean * mean);
    out.mean[d - 1] = mean;
    out.se[d - 1] = std::sqrt(var / static_cast<double>(n_mc));
  }
  return out;
}

ConditionReport theorem_condition(const std::vector<double>& a,
                                  const std::vector<Index>& sizes, double sigma2,
                                  double tau_pilot, long n_mc, std::uint64_t seed) {
  ConditionReport rep;
  rep.ratios = ratio_second_moments(a, sizes, sigma2, tau_pilot, n_mc, seed);
  const double front = 2.0 * normal_pdf(1.0) + 1.0;
  rep.per_group.resize(a.size() - 1);
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t d = 1; d < a.size(); ++d) {
    const double n_d = static_cast<double>(sizes[d]);
    const double value = front * a[d] * a[d] -
                         2.0 * sigma2 * std::log(n_d) * rep.ratios.mean[d - 1] -
                         sigma2;
    rep.per_group[d - 1] = value;
    rep.margin = std::min(rep.margin, value);
  }
  rep.holds = rep.margin > 0.0;
  return rep;
}

RiskBoundReport risk_bound(const std::vector<double>& a,
                           const std::vector<Index>& sizes, double sigma2,
                           double tau_pilot, long n_mc, std::uint64_t seed) {
  RiskBoundReport rep;
  rep.condition = theorem_condition(a, sizes, sigma2, tau_pilot, n_mc, seed);
  if (!rep.condition.holds) {
    throw ConditionViolated("signal-strength condition fails; margin = " +
                            std::to_string(rep.condition.margin));
  }
  const double sigma = std::sqrt(sigma2);
  const double m0 = location_m0(sigma);
  rep.per_group.resize(a.size() - 1);
  rep.bound = 0.0;
  for (std::size_t d = 1; d < a.size(); ++d) {
    const double n_d = static_cast<double>(sizes[d]);
    const double root = std::sqrt(2.0 * std::log(n_d));
    const double bias = 2.0 * sigma * (sigma2 + a[d] * a[d]) / (m0 * root);
    const double spread =
        n_d * (2.0 * sigma2 * std::log(n_d) * rep.condition.ratios.mean[d - 1] + sigma2);
    rep.per_group[d - 1] = bias + spread;
    rep.bound += rep.per_group[d - 1];
  }
  return rep;
}

double universal_risk_bound(const Vector& mu, double sigma2) {
  const double n = static_cast<double>(mu.size());
  if (n < 1.0) throw EmptyGroup("need at least one observation");
  double body = sigma2;
  for (Index i = 0; i < mu.size(); ++i) {
    body += std::min(sigma2, mu(i) * mu(i));
  }
  return (2.0 * std::log(n) + 1.0) * body;
}

double signal_group_loss(const LocationInstance& inst, const Vector& mu_hat) {
  if (mu_hat.size() != inst.y.size()) throw DimensionMismatch("estimate has wrong length");
  double loss = 0.0;
  for (std::size_t d = 1; d < inst.partition.size(); ++d) {
    for (Index i : inst.partition[d]) {
      const double e = mu_hat(i) - inst.mu(i);
      loss += e * e;
    }
  }
  return loss;
}

}  // namespace salasso
