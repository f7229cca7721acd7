#pragma once

#include "salasso/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace salasso {

double mse(const Vector& estimate, const Vector& truth);  // p^-1 ||est - truth||^2
double rmspe(const Vector& y, const Vector& y_hat);       // sqrt(mean squared error)

std::vector<bool> support_of(const Vector& beta);

// Matthews correlation of support recovery; 0 when any margin is empty.
double mcc(const std::vector<bool>& estimated, const std::vector<bool>& truth);

struct MetricsRow {
  std::string method;
  int replication = 0;
  double delta = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double mse = 0.0;
  double rmspe = 0.0;
  double mcc = 0.0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace salasso
