#include "salasso/types.hpp"

#include <algorithm>
#include <cmath>

namespace salasso {

LinearDataset validate_dataset(LinearDataset ds) {
  if (ds.X.rows() != ds.y.size()) {
    throw DimensionMismatch("design has " + std::to_string(ds.X.rows()) +
                            " rows but response has " + std::to_string(ds.y.size()) +
                            " entries");
  }
  if (ds.beta_true && ds.beta_true->size() != ds.X.cols()) {
    throw DimensionMismatch("beta_true has " + std::to_string(ds.beta_true->size()) +
                            " entries but design has " + std::to_string(ds.X.cols()) +
                            " columns");
  }
  if (!ds.y.allFinite() || !ds.X.allFinite()) {
    throw NonFiniteEntry("dataset contains NaN or infinite entries");
  }
  if (ds.beta_true && !ds.beta_true->allFinite()) {
    throw NonFiniteEntry("beta_true contains NaN or infinite entries");
  }
  if (ds.sigma2 && (!std::isfinite(*ds.sigma2) || *ds.sigma2 < 0.0)) {
    throw NonFiniteEntry("sigma2 must be finite and nonnegative");
  }
  return ds;
}

Partition validate_partition(Partition partition, Index p) {
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  for (std::size_t d = 0; d < partition.size(); ++d) {
    if (partition[d].empty()) {
      throw EmptyGroup("group " + std::to_string(d) + " is empty");
    }
    for (Index j : partition[d]) {
      if (j < 0 || j >= p) {
        throw UncoveredIndex("group " + std::to_string(d) + " references feature " +
                             std::to_string(j) + " outside 0.." + std::to_string(p - 1));
      }
      if (seen[static_cast<std::size_t>(j)]) {
        throw OverlappingGroups("feature " + std::to_string(j) +
                                " appears in more than one group");
      }
      seen[static_cast<std::size_t>(j)] = 1;
    }
  }
  for (Index j = 0; j < p; ++j) {
    if (!seen[static_cast<std::size_t>(j)]) {
      throw UncoveredIndex("feature " + std::to_string(j) + " belongs to no group");
    }
  }
  return partition;
}

namespace {

// Prior specs arrive from configs and CLI flags, so content violations are
// schema errors rather than numeric-array ones.
void check_component_common(double c, double pi0, double mu, double s, std::size_t d) {
  if (!std::isfinite(c) || c <= 0.0) {
    throw SchemaError("component " + std::to_string(d) + ": proportion must be positive");
  }
  if (!std::isfinite(pi0) || pi0 < 0.0 || pi0 > 1.0) {
    throw SchemaError("component " + std::to_string(d) + ": pi0 must lie in [0,1]");
  }
  if (!std::isfinite(mu) || !std::isfinite(s) || s < 0.0) {
    throw SchemaError("component " + std::to_string(d) + ": slab parameters invalid");
  }
}

void check_proportions_sum(double total) {
  if (std::abs(total - 1.0) > 1e-12) {
    throw SchemaError("component proportions sum to " + std::to_string(total) +
                      ", expected 1 within 1e-12");
  }
}

}  // namespace

GroupPrior validate_group_prior(GroupPrior prior) {
  if (prior.components.empty()) throw EmptyGroup("prior has no components");
  double total = 0.0;
  for (std::size_t d = 0; d < prior.components.size(); ++d) {
    const auto& comp = prior.components[d];
    check_component_common(comp.c, comp.pi0, comp.mu, comp.s, d);
    total += comp.c;
  }
  check_proportions_sum(total);
  return prior;
}

CovariatePrior validate_covariate_prior(CovariatePrior prior) {
  if (prior.components.empty()) throw EmptyGroup("prior has no components");
  double total = 0.0;
  for (std::size_t d = 0; d < prior.components.size(); ++d) {
    const auto& comp = prior.components[d];
    if (!(comp.pi_lo > 0.0) || !(comp.pi_hi < 1.0) || comp.pi_lo > comp.pi_hi) {
      throw SchemaError("component " + std::to_string(d) +
                        ": zero-probability range must satisfy 0 < lo <= hi < 1");
    }
    check_component_common(comp.c, comp.pi_lo, comp.mu, comp.s, d);
    total += comp.c;
  }
  check_proportions_sum(total);
  return prior;
}

}  // namespace salasso
