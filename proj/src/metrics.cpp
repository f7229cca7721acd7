#include "salasso/metrics.hpp"

#include <cmath>

namespace salasso {

double mse(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size()) {
    throw DimensionMismatch("mse: vectors differ in length");
  }
  if (estimate.size() == 0) throw EmptyGroup("mse of empty vectors");
  return (estimate - truth).squaredNorm() / static_cast<double>(estimate.size());
}

double rmspe(const Vector& y, const Vector& y_hat) {
  return std::sqrt(mse(y_hat, y));
}

std::vector<bool> support_of(const Vector& beta) {
  std::vector<bool> s(static_cast<std::size_t>(beta.size()));
  for (Index j = 0; j < beta.size(); ++j) s[static_cast<std::size_t>(j)] = beta(j) != 0.0;
  return s;
}

double mcc(const std::vector<bool>& estimated, const std::vector<bool>& truth) {
  if (estimated.size() != truth.size()) {
    throw DimensionMismatch("mcc: supports differ in length");
  }
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (estimated[j] && truth[j]) ++tp;
    else if (estimated[j] && !truth[j]) ++fp;
    else if (!estimated[j] && truth[j]) ++fn;
    else ++tn;
  }
  const double den2 = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den2 == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den2);
}

}  // namespace salasso
