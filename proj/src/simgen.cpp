#include "salasso/simgen.hpp"

#include "salasso/rng.hpp"

#include <algorithm>
#include <cmath>

namespace salasso {

DesignKind design_kind_from_string(const std::string& name) {
  if (name == "iid" || name == "iid_gaussian" || name == "gaussian") {
    return DesignKind::iid_gaussian;
  }
  if (name == "binary") return DesignKind::binary;
  if (name == "ar1") return DesignKind::ar1;
  if (name == "equicorrelated" || name == "equi") return DesignKind::equicorrelated;
  throw ParseError("unknown design kind: " + name);
}

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::iid_gaussian: return "iid";
    case DesignKind::binary: return "binary";
    case DesignKind::ar1: return "ar1";
    case DesignKind::equicorrelated: return "equicorrelated";
  }
  return "?";
}

Matrix gen_design(Index n, Index p, const DesignSpec& spec, std::uint64_t seed) {
  if (n < 1 || p < 1) throw DimensionMismatch("design needs n >= 1 and p >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  RandomField field(seed, make_stream(StreamTag::design));
  Matrix X(n, p);
  switch (spec.kind) {
    case DesignKind::iid_gaussian:
      for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
          X(i, j) = scale * field.normal(static_cast<std::uint64_t>(i),
                                         static_cast<std::uint64_t>(j));
        }
      }
      break;
    case DesignKind::binary:
      for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
          X(i, j) = scale * field.sign(static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(j));
        }
      }
      break;
    case DesignKind::ar1: {
      if (!(std::abs(spec.rho) < 1.0)) {
        throw InvalidRho("ar1 requires |rho| < 1, got " + std::to_string(spec.rho));
      }
      const double innov = std::sqrt(1.0 - spec.rho * spec.rho);
      // Exact construction: within each row the columns follow the
      // stationary recursion, so corr(x_j, x_k) = rho^|j-k|.
      for (Index i = 0; i < n; ++i) {
        double prev = field.normal(static_cast<std::uint64_t>(i), 0);
        X(i, 0) = scale * prev;
        for (Index j = 1; j < p; ++j) {
          prev = spec.rho * prev +
                 innov * field.normal(static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j));
          X(i, j) = scale * prev;
        }
      }
      break;
    }
    case DesignKind::equicorrelated: {
      if (!(spec.rho >= 0.0 && spec.rho < 1.0)) {
        throw InvalidRho("equicorrelated requires rho in [0, 1), got " +
                         std::to_string(spec.rho));
      }
      const double shared = std::sqrt(spec.rho);
      const double own = std::sqrt(1.0 - spec.rho);
      for (Index i = 0; i < n; ++i) {
        // One common factor per row (coordinate k = 1 keeps it clear of the
        // per-entry draws at k = 0).
        const double g = field.normal(static_cast<std::uint64_t>(i), 0, 1);
        for (Index j = 0; j < p; ++j) {
          X(i, j) = scale * (shared * g +
                             own * field.normal(static_cast<std::uint64_t>(i),
                                                static_cast<std::uint64_t>(j)));
        }
      }
      break;
    }
  }
  return X;
}

std::vector<Index> component_sizes(Index p, const std::vector<double>& proportions) {
  if (proportions.empty()) throw EmptyGroup("no component proportions");
  double total = 0.0;
  for (const double c : proportions) total += c;
  if (std::abs(total - 1.0) > 1e-9) {
    throw DimensionMismatch("component proportions sum to " + std::to_string(total) +
                            ", expected 1");
  }
  std::vector<Index> sizes(proportions.size());
  Index used = 0;
  for (std::size_t d = 0; d + 1 < proportions.size(); ++d) {
    sizes[d] = static_cast<Index>(std::floor(proportions[d] * static_cast<double>(p)));
    used += sizes[d];
  }
  sizes.back() = p - used;
  if (sizes.back() < 0) throw DimensionMismatch("component proportions exceed 1");
  return sizes;
}

Partition contiguous_partition(const std::vector<Index>& sizes) {
  Partition partition(sizes.size());
  Index j = 0;
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    for (Index k = 0; k < sizes[d]; ++k) partition[d].push_back(j++);
  }
  return partition;
}

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> component_proportions_group(const GroupPrior& prior) {
  std::vector<double> c;
  for (const auto& comp : prior.components) c.push_back(comp.c);
  return c;
}

}  // namespace

GroupSignal gen_signal_group(Index p, const GroupPrior& prior, std::uint64_t seed) {
  validate_group_prior(prior);
  GroupSignal out;
  const auto sizes = component_sizes(p, component_proportions_group(prior));
  out.partition = contiguous_partition(sizes);
  out.beta = Vector::Zero(p);
  RandomField field(seed, make_stream(StreamTag::signal));
  for (std::size_t d = 0; d < out.partition.size(); ++d) {
    const auto& comp = prior.components[d];
    for (Index j : out.partition[d]) {
      // Coordinate 0 holds the zero coin, 1 the slab draw; the covariate
      // generator shares these so degenerate ranges reproduce this path
      // bit for bit.
      if (field.uniform(static_cast<std::uint64_t>(j), 0) < comp.pi0) continue;
      out.beta(j) = comp.mu + comp.s * field.normal(static_cast<std::uint64_t>(j), 1);
    }
  }
  return out;
}

CovariateSignal gen_signal_covariate(Index p, const CovariatePrior& prior,
                                     std::uint64_t seed) {
  validate_covariate_prior(prior);
  CovariateSignal out;
  std::vector<double> c;
  for (const auto& comp : prior.components) c.push_back(comp.c);
  const auto sizes = component_sizes(p, c);
  out.partition = contiguous_partition(sizes);
  out.beta = Vector::Zero(p);
  out.U.resize(p, 1);
  out.pi0.resize(p);
  RandomField field(seed, make_stream(StreamTag::signal));
  for (std::size_t d = 0; d < out.partition.size(); ++d) {
    const auto& comp = prior.components[d];
    const double lo = logit(comp.pi_lo), hi = logit(comp.pi_hi);
    for (Index j : out.partition[d]) {
      const double u =
          lo + field.uniform(static_cast<std::uint64_t>(j), 2) * (hi - lo);
      out.U(j, 0) = u;
      out.pi0(j) = logistic(u);
      if (field.uniform(static_cast<std::uint64_t>(j), 0) < out.pi0(j)) continue;
      out.beta(j) = comp.mu + comp.s * field.normal(static_cast<std::uint64_t>(j), 1);
    }
  }
  return out;
}

EtaOddsRecipe eta_preset(const std::string& name) {
  EtaOddsRecipe r;
  r.c = {0.9, 0.033, 0.033, 0.034};
  r.s = 0.3;
  if (name == "non-informative" || name == "noninformative") {
    r.mu = {0.0, 0.8, -0.8, 1.2};
    r.odds = {1.0, 1.0 / 1.5, 1.0 / 1.5, 1.0 / 2.0};
  } else if (name == "moderate") {
    r.mu = {0.0, 1.5, -1.5, 2.0};
    r.odds = {1.0, 1.0 / 2.0, 1.0 / 2.0, 1.0 / 4.0};
  } else if (name == "high") {
    r.mu = {0.0, 2.0, -2.0, 4.0};
    r.odds = {1.0, 1.0 / 4.0, 1.0 / 4.0, 1.0 / 8.0};
  } else {
    throw ParseError("unknown eta preset: " + name);
  }
  return r;
}

GroupPrior eta_odds_prior(Index p, double eta, const EtaOddsRecipe& recipe) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw NonFiniteEntry("eta must lie in [0,1]");
  if (recipe.c.size() != recipe.mu.size() || recipe.c.size() != recipe.odds.size()) {
    throw DimensionMismatch("eta recipe fields disagree in length");
  }
  const auto sizes = component_sizes(p, recipe.c);
  GroupPrior prior;
  if (eta == 0.0 || eta == 1.0) {
    for (std::size_t d = 0; d < sizes.size(); ++d) {
      prior.components.push_back({recipe.c[d], 1.0 - eta, recipe.mu[d], recipe.s});
    }
    return prior;
  }
  // Distribute the (1 - eta) p expected zeros across groups in proportion to
  // size_d odds_d. A one-shot min(1, .) clip would strand the excess of a
  // saturated group and miss the sparsity target, so the excess is reassigned
  // to the unsaturated groups until the allocation is feasible. Without
  // saturation this reduces to pi0_d = (1 - eta) p odds_d / sum_e size_e odds_e.
  std::vector<double> pi0(sizes.size(), 1.0);
  std::vector<char> open(sizes.size(), 1);
  double remaining = (1.0 - eta) * static_cast<double>(p);
  for (;;) {
    double norm = 0.0;
    for (std::size_t d = 0; d < sizes.size(); ++d) {
      if (open[d]) norm += static_cast<double>(sizes[d]) * recipe.odds[d];
    }
    if (norm <= 0.0) break;
    const double scale = std::max(remaining, 0.0) / norm;
    bool saturated = false;
    for (std::size_t d = 0; d < sizes.size(); ++d) {
      if (open[d] && scale * recipe.odds[d] > 1.0) {
        open[d] = 0;
        remaining -= static_cast<double>(sizes[d]);
        saturated = true;
      }
    }
    if (!saturated) {
      for (std::size_t d = 0; d < sizes.size(); ++d) {
        if (open[d]) pi0[d] = std::min(1.0, scale * recipe.odds[d]);
      }
      break;
    }
  }
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    prior.components.push_back({recipe.c[d], pi0[d], recipe.mu[d], recipe.s});
  }
  return prior;
}

GroupSignal gen_signal_eta(Index p, double eta, const EtaOddsRecipe& recipe,
                           std::uint64_t seed) {
  return gen_signal_group(p, eta_odds_prior(p, eta, recipe), seed);
}

Vector gen_response(const Matrix& X, const Vector& beta, double sigma2,
                    std::uint64_t seed) {
  if (X.cols() != beta.size()) throw DimensionMismatch("beta length != design columns");
  if (!(sigma2 >= 0.0)) throw NonFiniteEntry("sigma2 must be nonnegative");
  Vector y = X * beta;
  if (sigma2 > 0.0) {
    const double sd = std::sqrt(sigma2);
    RandomField field(seed, make_stream(StreamTag::response));
    for (Index i = 0; i < y.size(); ++i) {
      y(i) += sd * field.normal(static_cast<std::uint64_t>(i));
    }
  }
  return y;
}

GroupPrior group_preset() {
  GroupPrior prior;
  prior.components = {{0.9, 0.9, 0.0, 0.3},
                      {0.033, 0.3, 2.0, 0.3},
                      {0.033, 0.2, -2.0, 0.3},
                      {0.034, 0.1, 4.0, 0.3}};
  return prior;
}

CovariatePrior covariate_preset() {
  CovariatePrior prior;
  prior.components = {{0.9, 0.7, 0.95, 0.0, 0.3},
                      {0.033, 0.1, 0.2, 2.0, 0.3},
                      {0.033, 0.2, 0.3, -2.0, 0.3},
                      {0.034, 0.01, 0.05, 4.0, 0.3}};
  return prior;
}

}  // namespace salasso
