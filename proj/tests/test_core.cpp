#include <doctest.h>

#include "salasso/kernels.hpp"
#include "salasso/rng.hpp"
#include "salasso/types.hpp"

#include <cmath>
#include <numeric>
#include <set>

using namespace salasso;

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

TEST_CASE("validate_dataset catches shape and finiteness problems") {
  LinearDataset ds;
  ds.y = Vector::Zero(3);
  ds.X = Matrix::Zero(3, 2);
  CHECK_NOTHROW(validate_dataset(ds));

  LinearDataset bad = ds;
  bad.X = Matrix::Zero(4, 2);
  CHECK_THROWS_AS(validate_dataset(bad), DimensionMismatch);

  bad = ds;
  bad.y[1] = std::nan("");
  CHECK_THROWS_AS(validate_dataset(bad), NonFiniteEntry);

  bad = ds;
  bad.X(2, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_dataset(bad), NonFiniteEntry);

  bad = ds;
  bad.beta_true = Vector::Zero(5);
  CHECK_THROWS_AS(validate_dataset(bad), DimensionMismatch);

  bad = ds;
  bad.sigma2 = -1.0;
  CHECK_THROWS_AS(validate_dataset(bad), NonFiniteEntry);
}

TEST_CASE("validate_partition enforces a disjoint exhaustive cover") {
  CHECK_NOTHROW(validate_partition({{0, 2}, {1}}, 3));
  CHECK_THROWS_AS(validate_partition({{0}, {}}, 1), EmptyGroup);
  CHECK_THROWS_AS(validate_partition({{0, 1}, {1, 2}}, 3), OverlappingGroups);
  CHECK_THROWS_AS(validate_partition({{0, 1}}, 3), UncoveredIndex);
  CHECK_THROWS_AS(validate_partition({{0, 3}}, 3), UncoveredIndex);
}

TEST_CASE("prior validation: proportions must sum to one") {
  GroupPrior ok{{{0.5, 0.9, 0.0, 1.0}, {0.5, 0.1, 2.0, 0.3}}};
  CHECK_NOTHROW(validate_group_prior(ok));
  GroupPrior bad{{{0.5, 0.9, 0.0, 1.0}, {0.4, 0.1, 2.0, 0.3}}};
  CHECK_THROWS_AS(validate_group_prior(bad), SchemaError);

  CovariatePrior cok{{{1.0, 0.2, 0.8, 1.0, 0.5}}};
  CHECK_NOTHROW(validate_covariate_prior(cok));
  CovariatePrior cbad{{{1.0, 0.8, 0.2, 1.0, 0.5}}};  // lo > hi
  CHECK_THROWS_AS(validate_covariate_prior(cbad), SchemaError);
  CovariatePrior cbad2{{{1.0, 0.0, 0.8, 1.0, 0.5}}};  // lo == 0 has no logit
  CHECK_THROWS_AS(validate_covariate_prior(cbad2), SchemaError);
}

// ---------------------------------------------------------------------------
// Counter-based generator. Known-answer vectors pin the exact bitstream so a
// refactor cannot silently change every simulated dataset.
// ---------------------------------------------------------------------------

// Vectors cross-checked against numpy's Philox bit generator. numpy advances
// its 256-bit counter once before emitting a block, so its counter c matches
// the raw function evaluated at c+1; the counters below are already shifted.
TEST_CASE("block generator known answers") {
  {
    const auto b = Philox4x64::generate(0, 0, 0, 0, 0, 0);
    CHECK(b[0] == 0x16554d9eca36314cULL);
    CHECK(b[1] == 0xdb20fe9d672d0fdcULL);
    CHECK(b[2] == 0xd7e772cee186176bULL);
    CHECK(b[3] == 0x7e68b68aec7ba23bULL);
  }
  {
    const auto b = Philox4x64::generate(0, 0, 1, 0, 0, 0);
    CHECK(b[0] == 0x02f4ba6408e4d89bULL);
    CHECK(b[1] == 0x3dd62b0b9ca8c5b2ULL);
    CHECK(b[2] == 0x1c8667a55d902e79ULL);
    CHECK(b[3] == 0x907d7a052fd5b4dcULL);
  }
  {
    const auto b = Philox4x64::generate(0xdeadbeefULL, 0xface0ff5ULL, 2, 2, 3, 4);
    CHECK(b[0] == 0xbab1f1e3ab184032ULL);
    CHECK(b[1] == 0xe43138579e7988f8ULL);
    CHECK(b[2] == 0xe7bb59376b9c2d26ULL);
    CHECK(b[3] == 0x3dcc1c7af8336597ULL);
  }
  {
    // All-ones counter wraps to zero under numpy's pre-increment.
    const std::uint64_t ones = ~0ULL;
    const auto b = Philox4x64::generate(ones, ones, 0, 0, 0, 0);
    CHECK(b[0] == 0x44b7493d1acfc229ULL);
    CHECK(b[1] == 0x6636af8e997921ddULL);
    CHECK(b[2] == 0x3f73e132b5b3780eULL);
    CHECK(b[3] == 0x605644dde03b01b1ULL);
  }
}

TEST_CASE("field draws are pure functions of coordinates") {
  const RandomField f(42, make_stream(StreamTag::design));
  const double a = f.normal(3, 7, 0);
  const double b = f.normal(3, 7, 0);
  CHECK(a == b);
  CHECK(f.normal(3, 8, 0) != a);

  // Distinct streams decorrelate the same coordinates.
  const RandomField g(42, make_stream(StreamTag::signal));
  CHECK(g.normal(3, 7, 0) != a);

  // Uniforms live in [0, 1).
  for (int i = 0; i < 1000; ++i) {
    const double u = f.uniform(static_cast<std::uint64_t>(i), 0, 0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }

  // Signs are exactly +-1.
  for (int i = 0; i < 100; ++i) {
    const double s = f.sign(static_cast<std::uint64_t>(i), 0, 0);
    CHECK(std::abs(s) == 1.0);
  }
}

TEST_CASE("field normals have the right first two moments") {
  const RandomField f(7, make_stream(StreamTag::harness));
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = f.normal(static_cast<std::uint64_t>(i), 0, 0);
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("sequential stream replays identically and shuffles  permutations") {
  RandomStream s1(9, make_stream(StreamTag::folds, 2));
  RandomStream s2(9, make_stream(StreamTag::folds, 2));
  for (int i = 0; i < 50; ++i) CHECK(s1.next_u64() == s2.next_u64());

  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  RandomStream s3(9, make_stream(StreamTag::folds, 3));
  s3.shuffle(v);
  std::set<int> seen(v.begin(), v.end());
  CHECK(seen.size() == 100);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 99);

  // Not the identity permutation (probability ~ 1/100!).
  std::vector<int> identity(100);
  std::iota(identity.begin(), identity.end(), 0);
  CHECK(v != identity);
}

TEST_CASE("stream and field domains never collide") {
  // Field uses counter word c3 = 0, stream uses c3 = 1; with equal keys the
  // first stream draw must differ from every low-coordinate field draw.
  const std::uint64_t key = make_stream(StreamTag::harness, 5);
  const RandomField f(11, key);
  RandomStream s(11, key);
  const std::uint64_t first = s.next_u64();
  bool collision = false;
  for (std::uint64_t i = 0; i < 64 && !collision; ++i) {
    for (std::uint64_t j = 0; j < 8; ++j) {
      const double fv = f.uniform(i, j, 0);
      if (fv == u64_to_unit(first)) collision = true;
    }
  }
  CHECK_FALSE(collision);
}

// ---------------------------------------------------------------------------
// Kernels: the parallel variants must match the serial reference bitwise for
// every shape, including edge sizes that do not fill one block.
// ---------------------------------------------------------------------------

TEST_CASE("serial and parallel kernels agree bitwise") {
  const RandomField f(3, make_stream(StreamTag::harness, 1));
  for (const auto& [n, p] : {std::pair<Index, Index>{1, 1},
                            {3, 7},
                            {64, 128},
                            {130, 1025},
                            {257, 33}}) {
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j)
        X(i, j) = f.normal(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 0);
    Vector b(p), e(n), theta(p);
    for (Index j = 0; j < p; ++j) {
      b[j] = f.normal(static_cast<std::uint64_t>(j), 0, 1);
      theta[j] = 0.5 * f.uniform(static_cast<std::uint64_t>(j), 1, 1);
    }
    for (Index i = 0; i < n; ++i) e[i] = f.normal(static_cast<std::uint64_t>(i), 0, 2);

    Vector out_s(n), out_p(n);
    kernels::serial::design_times(X, b, out_s);
    kernels::omp::design_times(X, b, out_p);
    CHECK(out_s == out_p);

    Vector gs(p), gp(p);
    kernels::serial::design_transpose_times(X, e, gs);
    kernels::omp::design_transpose_times(X, e, gp);
    CHECK(gs == gp);

    Vector ts(p), tp(p);
    kernels::serial::soft_threshold_vec(b, theta, ts);
    kernels::omp::soft_threshold_vec(b, theta, tp);
    CHECK(ts == tp);

    CHECK(kernels::serial::mean_active(b, theta) == kernels::omp::mean_active(b, theta));
    CHECK(kernels::serial::sum(e) == kernels::omp::sum(e));
  }
}

TEST_CASE("mean_active counts strict exceedances") {
  Vector v(4), theta(4);
  v << 1.0, -2.0, 0.5, 0.0;
  theta << 1.0, 1.0, 0.2, 0.0;
  // |1.0| > 1.0 is false, |-2| > 1 true, |0.5| > 0.2 true, |0| > 0 false.
  CHECK(kernels::serial::mean_active(v, theta) == doctest::Approx(0.5));
}

TEST_CASE("blocked sum matches sequential accumulation exactly") {
  const RandomField f(5, make_stream(StreamTag::harness, 2));
  Vector v(5000);
  for (Index i = 0; i < v.size(); ++i)
    v[i] = f.normal(static_cast<std::uint64_t>(i), 0, 0) * 1e6;
  double ref = 0.0;
  for (Index i = 0; i < v.size(); ++i) ref += v[i];
  // The serial kernel accumulates in index order by block; re-deriving it
  // with one flat loop must give a bit-identical result because the block
  // layout is part of the contract.
  CHECK(kernels::serial::sum(v) == kernels::omp::sum(v));
  const double blocked = kernels::serial::sum(v);
  CHECK(blocked == doctest::Approx(ref).epsilon(1e-12));
}
