#pragma once

#include "salasso/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace salasso {

enum class DesignKind { iid_gaussian, binary, ar1, equicorrelated };

struct DesignSpec {
  DesignKind kind = DesignKind::iid_gaussian;
  double rho = 0.5;  // ar1 needs |rho| < 1; equicorrelated needs rho in [0, 1)
};

DesignKind design_kind_from_string(const std::string& name);
std::string to_string(DesignKind kind);

// Entries scaled by 1/sqrt(n) so columns have norm ~1 (exactly 1 for binary).
// Every entry is a pure function of (seed, i, j): identical across thread
// counts and generation order.
Matrix gen_design(Index n, Index p, const DesignSpec& spec, std::uint64_t seed);

// floor(p c_d) features per component, remainder to the last one.
std::vector<Index> component_sizes(Index p, const std::vector<double>& proportions);
Partition contiguous_partition(const std::vector<Index>& sizes);

struct GroupSignal {
  Vector beta;
  Partition partition;
};
GroupSignal gen_signal_group(Index p, const GroupPrior& prior, std::uint64_t seed);

struct CovariateSignal {
  Vector beta;
  Partition partition;
  Matrix U;     // p x 1, logit-scale covariate
  Vector pi0;   // per-feature zero probability
};
CovariateSignal gen_signal_covariate(Index p, const CovariatePrior& prior,
                                     std::uint64_t seed);

// Sparsity-eta recipe: group zero-probabilities proportional to relative
// zero odds O_d, scaled so the expected nonzero fraction is eta:
// pi0_d = min(1, (1 - eta) p O_d / sum_e p_e O_e), p_e the component sizes.
struct EtaOddsRecipe {
  std::vector<double> c;     // component proportions
  std::vector<double> mu;    // slab means
  std::vector<double> odds;  // relative zero odds O_d
  double s = 0.3;            // slab sd
};
EtaOddsRecipe eta_preset(const std::string& name);  // non-informative|moderate|high
GroupPrior eta_odds_prior(Index p, double eta, const EtaOddsRecipe& recipe);
GroupSignal gen_signal_eta(Index p, double eta, const EtaOddsRecipe& recipe,
                           std::uint64_t seed);

Vector gen_response(const Matrix& X, const Vector& beta, double sigma2,
                    std::uint64_t seed);

// Bundled presets used across experiments.
GroupPrior group_preset();          // c (.9,.033,.033,.034), pi0 (.9,.3,.2,.1), mu (0,2,-2,4), s .3
CovariatePrior covariate_preset();  // same c/mu/s, pi ranges (.7,.1,.2,.01)-(.95,.2,.3,.05)

}  // namespace salasso
