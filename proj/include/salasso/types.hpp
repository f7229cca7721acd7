#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace salasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Weight cap: a coefficient whose weight sits at the cap is effectively
// excluded (its threshold exceeds any finite correlation).
inline constexpr double kDefaultWeightCap = 1e30;

// ---------------------------------------------------------------------------
// Errors. One type per failure condition; all catchable as SalassoError.
// ---------------------------------------------------------------------------
struct SalassoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SALASSO_DEFINE_ERROR(Name)                 \
  struct Name : SalassoError {                     \
    using SalassoError::SalassoError;              \
  }

SALASSO_DEFINE_ERROR(DimensionMismatch);
SALASSO_DEFINE_ERROR(NonFiniteEntry);
SALASSO_DEFINE_ERROR(OverlappingGroups);
SALASSO_DEFINE_ERROR(UncoveredIndex);
SALASSO_DEFINE_ERROR(EmptyGroup);
SALASSO_DEFINE_ERROR(NegativeThreshold);
SALASSO_DEFINE_ERROR(NegativeLambda);
SALASSO_DEFINE_ERROR(ZeroWeightUnpenalized);
SALASSO_DEFINE_ERROR(GammaOutOfRange);
SALASSO_DEFINE_ERROR(InvalidRho);
SALASSO_DEFINE_ERROR(FoldTooSmall);
SALASSO_DEFINE_ERROR(EmptyGrid);
SALASSO_DEFINE_ERROR(Diverged);
SALASSO_DEFINE_ERROR(MaxIterationsExceeded);
SALASSO_DEFINE_ERROR(FixedPointNotReached);
SALASSO_DEFINE_ERROR(NegativeRisk);
SALASSO_DEFINE_ERROR(ConditionViolated);
SALASSO_DEFINE_ERROR(ParseError);
SALASSO_DEFINE_ERROR(SchemaError);
SALASSO_DEFINE_ERROR(InvalidQuadrature);

#undef SALASSO_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------
struct LinearDataset {
  Vector y;                         // response, length n
  Matrix X;                         // design, n x p, column-major
  std::optional<Vector> beta_true;  // length p when the truth is known
  std::optional<double> sigma2;     // noise variance when known

  Index n() const { return y.size(); }
  Index p() const { return X.cols(); }
};

// Groups are disjoint, exhaustive, nonempty index sets over 0..p-1
// (0-based internally; file formats and CLI use 1-based ids).
using Partition = std::vector<std::vector<Index>>;

struct NoStructure {};
struct GroupStructure {
  Partition partition;
};
struct CovariateStructure {
  Matrix U;  // p x q external covariates
};
using StructureSpec = std::variant<NoStructure, GroupStructure, CovariateStructure>;

// Per-feature penalty weights; every producer clips into [0, cap] exactly.
struct WeightVector {
  Vector values;
  double cap = kDefaultWeightCap;
};

// Point-normal mixture component: B ~ pi0 * delta_0 + (1 - pi0) * N(mu, s^2).
struct PriorComponent {
  double c;    // population proportion of this group
  double pi0;  // probability of an exact zero
  double mu;   // slab mean
  double s;    // slab sd
};
struct GroupPrior {
  std::vector<PriorComponent> components;
};

// Covariate variant: within group d the covariate U is uniform on
// [logit(pi_lo), logit(pi_hi)] and the zero-probability is logit^-1(U).
struct CovariatePriorComponent {
  double c;
  double pi_lo;
  double pi_hi;
  double mu;
  double s;
};
struct CovariatePrior {
  std::vector<CovariatePriorComponent> components;
};
using SignalPrior = std::variant<GroupPrior, CovariatePrior>;

struct SolverConfig {
  double tol = 1e-7;        // KKT residual target
  int max_iter = 100000;    // coordinate-descent sweep cap
  double gamma = 1.0;       // weight exponent, in (0, 1] where log g is needed
  double lambda = 0.0;      // penalty level for harness plumbing
  std::uint64_t seed = 0;
};

LinearDataset validate_dataset(LinearDataset ds);
Partition validate_partition(Partition partition, Index p);

GroupPrior validate_group_prior(GroupPrior prior);
CovariatePrior validate_covariate_prior(CovariatePrior prior);

}  // namespace salasso
