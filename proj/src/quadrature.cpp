#include "salasso/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace salasso {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

GaussHermite gauss_hermite(int n) {
  if (n < 2) throw InvalidQuadrature("need at least 2 Hermite nodes, got " + std::to_string(n));
  // Golub-Welsch on the Jacobi matrix of the Hermite recurrence (monic,
  // weight e^{-x^2/2}): zero diagonal, off-diagonal sqrt(k).
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  GaussHermite gh;
  gh.nodes = eig.eigenvalues();
  gh.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double first = eig.eigenvectors()(0, k);
    gh.weights(k) = first * first;
  }
  gh.weights /= gh.weights.sum();
  return gh;
}

namespace {

inline double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

double soft_threshold_risk(double b, double tau, double theta) {
  if (theta < 0.0) throw NegativeThreshold("threshold is negative");
  if (tau <= 0.0) {
    const double e = soft(b, theta) - b;
    return e * e;
  }
  const double zp = (theta - b) / tau;
  const double zm = (-theta - b) / tau;
  const double up = tau * tau * (normal_cdf(-zp) + zp * normal_pdf(zp)) -
                    2.0 * tau * theta * normal_pdf(zp) +
                    theta * theta * normal_cdf(-zp);
  const double mid = b * b * (normal_cdf(zp) - normal_cdf(zm));
  const double dn = tau * tau * (normal_cdf(zm) - zm * normal_pdf(zm)) -
                    2.0 * tau * theta * normal_pdf(zm) +
                    theta * theta * normal_cdf(zm);
  return up + mid + dn;
}

double active_probability(double b, double tau, double theta) {
  if (theta < 0.0) throw NegativeThreshold("threshold is negative");
  if (tau <= 0.0) return std::abs(b) > theta ? 1.0 : 0.0;
  return normal_cdf((b - theta) / tau) + normal_cdf(-(b + theta) / tau);
}

double soft_threshold_absmean(double b, double tau, double theta) {
  if (theta < 0.0) throw NegativeThreshold("threshold is negative");
  if (tau <= 0.0) return std::abs(soft(b, theta));
  const double zp = (theta - b) / tau;
  const double zm = (-theta - b) / tau;
  return (b - theta) * normal_cdf(-zp) + tau * normal_pdf(zp) -
         (b + theta) * normal_cdf(zm) + tau * normal_pdf(zm);
}

namespace {

template <typename Fn>
double mixture_expect(const GroupPrior& prior, const std::vector<double>& theta,
                      const GaussHermite& gh, Fn&& conditional) {
  if (theta.size() != prior.components.size()) {
    throw DimensionMismatch("one threshold per prior component required");
  }
  double total = 0.0;
  for (std::size_t d = 0; d < prior.components.size(); ++d) {
    const auto& comp = prior.components[d];
    const double th = theta[d];
    double val = comp.pi0 * conditional(0.0, th);
    if (comp.pi0 < 1.0) {
      double slab = 0.0;
      if (comp.s == 0.0) {
        slab = conditional(comp.mu, th);
      } else {
        for (Index k = 0; k < gh.nodes.size(); ++k) {
          slab += gh.weights(k) * conditional(comp.mu + comp.s * gh.nodes(k), th);
        }
      }
      val += (1.0 - comp.pi0) * slab;
    }
    total += comp.c * val;
  }
  return total;
}

}  // namespace

double mixture_mse(const GroupPrior& prior, double tau,
                   const std::vector<double>& theta, const GaussHermite& gh) {
  return mixture_expect(prior, theta, gh, [tau](double b, double th) {
    return soft_threshold_risk(b, tau, th);
  });
}

double mixture_active(const GroupPrior& prior, double tau,
                      const std::vector<double>& theta, const GaussHermite& gh) {
  return mixture_expect(prior, theta, gh, [tau](double b, double th) {
    return active_probability(b, tau, th);
  });
}

double mixture_absmean(const GroupPrior& prior, double tau,
                       const std::vector<double>& theta, const GaussHermite& gh) {
  return mixture_expect(prior, theta, gh, [tau](double b, double th) {
    return soft_threshold_absmean(b, tau, th);
  });
}

namespace {

std::vector<double> broadcast(const GroupPrior& prior, double theta) {
  return std::vector<double>(prior.components.size(), theta);
}

}  // namespace

double mse_expectation(const GroupPrior& prior, double tau, double theta,
                       const GaussHermite& gh) {
  return mixture_mse(prior, tau, broadcast(prior, theta), gh);
}

double active_expectation(const GroupPrior& prior, double tau, double theta,
                          const GaussHermite& gh) {
  return mixture_active(prior, tau, broadcast(prior, theta), gh);
}

double absmean_expectation(const GroupPrior& prior, double tau, double theta,
                           const GaussHermite& gh) {
  return mixture_absmean(prior, tau, broadcast(prior, theta), gh);
}

double second_moment(const GroupPrior& prior) {
  double total = 0.0;
  for (const auto& comp : prior.components) {
    total += comp.c * (1.0 - comp.pi0) * (comp.mu * comp.mu + comp.s * comp.s);
  }
  return total;
}

}  // namespace salasso
