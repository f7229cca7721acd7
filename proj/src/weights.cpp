#include "salasso/weights.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace salasso {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw GammaOutOfRange("gamma must lie in (0, 1], got " + std::to_string(gamma));
  }
}

namespace {

inline double power_weight(double mean_abs, double gamma, double cap) {
  if (mean_abs <= 0.0) return cap;
  return std::min(std::pow(mean_abs, -gamma), cap);
}

// log g(f; gamma) up to constants: f^(1-1/gamma)/(1-1/gamma), or log f in the
// gamma -> 1 limit.
constexpr double kGammaOneEps = 1e-9;

inline double log_g(double f, double log_f, double gamma) {
  if (std::abs(1.0 - gamma) < kGammaOneEps) return log_f;
  const double a = 1.0 - 1.0 / gamma;
  return std::pow(f, a) / a;
}

}  // namespace

WeightVector update_weights_group(const Vector& beta, const Partition& partition,
                                  double gamma, double cap) {
  check_gamma(gamma);
  validate_partition(partition, beta.size());
  WeightVector out{Vector::Zero(beta.size()), cap};
  for (const auto& group : partition) {
    double mean_abs = 0.0;
    for (Index j : group) mean_abs += std::abs(beta(j));
    mean_abs /= static_cast<double>(group.size());
    const double w = power_weight(mean_abs, gamma, cap);
    for (Index j : group) out.values(j) = w;
  }
  return out;
}

WeightVector update_weights_unstructured(const Vector& beta, double gamma, double cap) {
  check_gamma(gamma);
  WeightVector out{Vector::Zero(beta.size()), cap};
  for (Index j = 0; j < beta.size(); ++j) {
    out.values(j) = power_weight(std::abs(beta(j)), gamma, cap);
  }
  return out;
}

double covariate_objective(const Vector& tau, const Matrix& U, const Vector& abs_beta,
                           double gamma) {
  check_gamma(gamma);
  if (tau.size() != U.cols() + 1 || U.rows() != abs_beta.size()) {
    throw DimensionMismatch("covariate objective: tau/U/beta sizes disagree");
  }
  const Index p = abs_beta.size();
  double total = 0.0;
  for (Index j = 0; j < p; ++j) {
    const double log_f = tau(0) + U.row(j).dot(tau.tail(U.cols()));
    const double f = std::exp(log_f);
    total += f * abs_beta(j) - log_g(f, log_f, gamma);
  }
  return total / static_cast<double>(p);
}

Vector covariate_gradient(const Vector& tau, const Matrix& U, const Vector& abs_beta,
                          double gamma) {
  check_gamma(gamma);
  if (tau.size() != U.cols() + 1 || U.rows() != abs_beta.size()) {
    throw DimensionMismatch("covariate gradient: tau/U/beta sizes disagree");
  }
  const Index p = abs_beta.size();
  const Index q = U.cols();
  Vector grad = Vector::Zero(q + 1);
  for (Index j = 0; j < p; ++j) {
    const double log_f = tau(0) + U.row(j).dot(tau.tail(q));
    const double f = std::exp(log_f);
    // d/dtau log g = f^(-1/gamma) * f * v, which reduces to v at gamma = 1.
    const double coef = f * (abs_beta(j) - std::pow(f, -1.0 / gamma));
    grad(0) += coef;
    grad.tail(q) += coef * U.row(j).transpose();
  }
  return grad / static_cast<double>(p);
}

namespace {

// Hessian is p^-1 sum_j psi_j v_j v_j' with
// psi_j = f_j m_j + (1/gamma - 1) f_j^(1 - 1/gamma) >= 0, so the objective is
// convex on the whole parameter space.
Matrix covariate_hessian(const Vector& tau, const Matrix& U, const Vector& abs_beta,
                         double gamma) {
  const Index p = abs_beta.size();
  const Index q = U.cols();
  Matrix hess = Matrix::Zero(q + 1, q + 1);
  Vector v(q + 1);
  for (Index j = 0; j < p; ++j) {
    const double log_f = tau(0) + U.row(j).dot(tau.tail(q));
    const double f = std::exp(log_f);
    const double psi = f * abs_beta(j) +
                       (1.0 / gamma - 1.0) * std::pow(f, 1.0 - 1.0 / gamma);
    v(0) = 1.0;
    v.tail(q) = U.row(j).transpose();
    hess.noalias() += psi * v * v.transpose();
  }
  return hess / static_cast<double>(p);
}

Vector clip_box(Vector v, double lo, double hi) {
  for (Index k = 0; k < v.size(); ++k) v(k) = std::clamp(v(k), lo, hi);
  return v;
}

// Gradient components that can still produce descent inside the box.
double projected_grad_norm(const Vector& tau, const Vector& grad, double lo, double hi) {
  double worst = 0.0;
  for (Index k = 0; k < tau.size(); ++k) {
    double g = grad(k);
    if (tau(k) <= lo && g > 0.0) g = 0.0;
    if (tau(k) >= hi && g < 0.0) g = 0.0;
    worst = std::max(worst, std::abs(g));
  }
  return worst;
}

}  // namespace

CovariateWeightResult fit_covariate_tau(const Vector& abs_beta, const Matrix& U,
                                        double gamma, double box_lo, double box_hi,
                                        double cap, const CovariateTau* warm) {
  check_gamma(gamma);
  if (U.rows() != abs_beta.size()) {
    throw DimensionMismatch("covariate matrix has " + std::to_string(U.rows()) +
                            " rows for " + std::to_string(abs_beta.size()) + " features");
  }
  if (!(box_lo < box_hi)) throw NonFiniteEntry("covariate box is empty");
  const Index q = U.cols();

  Vector tau = Vector::Zero(q + 1);
  if (warm && warm->tau1.size() == q) {
    tau(0) = warm->tau0;
    tau.tail(q) = warm->tau1;
    tau = clip_box(tau, box_lo, box_hi);
  }

  const double tol = 1e-10;
  const int max_iter = 200;
  double obj = covariate_objective(tau, U, abs_beta, gamma);

  CovariateTau result;
  result.box_lo = box_lo;
  result.box_hi = box_hi;
  result.converged = false;

  int it = 0;
  for (; it < max_iter; ++it) {
    const Vector grad = covariate_gradient(tau, U, abs_beta, gamma);
    if (projected_grad_norm(tau, grad, box_lo, box_hi) <= tol) {
      result.converged = true;
      break;
    }

    Matrix hess = covariate_hessian(tau, U, abs_beta, gamma);
    const double ridge = 1e-10 * std::max(1.0, hess.trace());
    hess.diagonal().array() += ridge;
    Vector dir = -hess.ldlt().solve(grad);
    if (!dir.allFinite() || dir.dot(grad) >= 0.0) dir = -grad;

    // Backtracking on the projected step; fall back to the gradient
    // direction before giving up on this iteration.
    bool accepted = false;
    for (int pass = 0; pass < 2 && !accepted; ++pass) {
      double step = 1.0;
      for (int half = 0; half < 60; ++half) {
        const Vector cand = clip_box(tau + step * dir, box_lo, box_hi);
        const double cand_obj = covariate_objective(cand, U, abs_beta, gamma);
        if (cand_obj < obj - 1e-12 * std::abs(obj) ||
            (cand_obj < obj && (cand - tau).norm() > 0.0)) {
          tau = cand;
          obj = cand_obj;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted && pass == 0) dir = -grad;
    }
    if (!accepted) {
      // No descent available along either direction: treat the current
      // point as stationary for the box.
      result.converged =
          projected_grad_norm(tau, covariate_gradient(tau, U, abs_beta, gamma),
                              box_lo, box_hi) <= 1e-6;
      break;
    }
  }
  if (it == max_iter) {
    result.converged = projected_grad_norm(
        tau, covariate_gradient(tau, U, abs_beta, gamma), box_lo, box_hi) <= tol;
  }

  result.tau0 = tau(0);
  result.tau1 = tau.tail(q);
  result.objective = obj;
  result.n_iters = it;

  CovariateWeightResult out;
  out.tau = result;
  out.weights.cap = cap;
  out.weights.values.resize(abs_beta.size());
  for (Index j = 0; j < abs_beta.size(); ++j) {
    const double f = std::exp(tau(0) + U.row(j).dot(tau.tail(q)));
    out.weights.values(j) = std::min(f, cap);
  }
  return out;
}

CovariateWeightResult update_weights_covariate(const Vector& beta, const Matrix& U,
                                               double gamma, double box_lo,
                                               double box_hi, double cap,
                                               const CovariateTau* warm) {
  return fit_covariate_tau(beta.cwiseAbs(), U, gamma, box_lo, box_hi, cap, warm);
}

}  // namespace salasso
