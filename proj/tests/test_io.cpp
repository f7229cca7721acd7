#include <doctest.h>

#include "salasso/io_csv.hpp"
#include "salasso/rng.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using namespace salasso;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/salasso_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& text) const {
    std::ofstream out(path, std::ios::binary);
    out << text;
  }
};

}  // namespace

TEST_CASE("doubles survive the text round trip bitwise") {
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, 1.2345678901234567e17, -0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("regression CSV round trip is bitwise") {
  const RandomField f(3, make_stream(StreamTag::harness, 9));
  LinearDataset ds;
  ds.X.resize(7, 5);
  ds.y.resize(7);
  for (Index i = 0; i < 7; ++i) {
    ds.y[i] = f.normal(static_cast<std::uint64_t>(i), 100, 0);
    for (Index j = 0; j < 5; ++j)
      ds.X(i, j) = f.normal(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 0);
  }
  const TempFile tmp("roundtrip.csv");
  write_regression_csv(tmp.path, ds);
  const LinearDataset back = load_regression_csv(tmp.path);
  CHECK(back.y == ds.y);
  CHECK(back.X == ds.X);
}

TEST_CASE("regression CSV rejects malformed input with located errors") {
  const TempFile tmp("bad.csv");

  tmp.write("z,x_0001\n1.0,2.0\n");
  CHECK_THROWS_AS(load_regression_csv(tmp.path), SchemaError);

  tmp.write("y,x_0002\n1.0,2.0\n");  // wrong feature numbering
  CHECK_THROWS_AS(load_regression_csv(tmp.path), SchemaError);

  tmp.write("y,x_0001,x_0002\n1.0,2.0\n");  // ragged row
  try {
    load_regression_csv(tmp.path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  tmp.write("y,x_0001\n1.0,abc\n");
  CHECK_THROWS_AS(load_regression_csv(tmp.path), ParseError);

  CHECK_THROWS_AS(load_regression_csv("/tmp/salasso_no_such_file.csv"), ParseError);
}

TEST_CASE("group structure CSV round trip") {
  const Partition part = {{0, 2}, {1, 3, 4}};
  const TempFile tmp("groups.csv");
  write_group_structure_csv(tmp.path, part);
  const StructureSpec spec = load_structure_csv(tmp.path, 5);
  const auto* gs = std::get_if<GroupStructure>(&spec);
  REQUIRE(gs != nullptr);
  CHECK(gs->partition == part);
}

TEST_CASE("covariate structure CSV round trip") {
  Matrix U(4, 2);
  U << 0.5, -1.0, 0.25, 2.0, -0.125, 0.75, 1.5, -2.25;
  const TempFile tmp("covs.csv");
  write_covariate_structure_csv(tmp.path, U);
  const StructureSpec spec = load_structure_csv(tmp.path, 4);
  const auto* cs = std::get_if<CovariateStructure>(&spec);
  REQUIRE(cs != nullptr);
  CHECK(cs->U == U);
}

TEST_CASE("structure CSV enforces an exact 1..p cover") {
  const TempFile tmp("badstruct.csv");

  tmp.write("feature_id,group_id\n1,1\n1,2\n");  // duplicate id
  CHECK_THROWS_AS(load_structure_csv(tmp.path, 2), SchemaError);

  tmp.write("feature_id,group_id\n1,1\n3,1\n");  // id out of range
  CHECK_THROWS_AS(load_structure_csv(tmp.path, 2), SchemaError);

  tmp.write("feature_id,group_id\n1,1\n");  // too few rows
  CHECK_THROWS_AS(load_structure_csv(tmp.path, 2), SchemaError);

  tmp.write("id,group_id\n1,1\n2,1\n");  // wrong header
  CHECK_THROWS_AS(load_structure_csv(tmp.path, 2), SchemaError);
}

TEST_CASE("coefficient CSV round trip with optional weights") {
  Vector beta(3);
  beta << 0.1, 0.0, -2.5;
  const TempFile tmp("beta.csv");
  write_beta_csv(tmp.path, beta);
  CHECK(load_beta_csv(tmp.path) == beta);

  Vector w(3);
  w << 1.0, kDefaultWeightCap, 0.333333333333333315;
  write_beta_csv(tmp.path, beta, &w);
  CHECK(load_beta_csv(tmp.path) == beta);
}

TEST_CASE("metrics CSV round trip, including unsigned 64-bit seeds") {
  std::vector<MetricsRow> rows(2);
  rows[0].method = "solver";
  rows[0].replication = 3;
  rows[0].delta = 0.64;
  rows[0].lambda = 0.125;
  rows[0].gamma = 0.5;
  rows[0].mse = 1.0 / 3.0;
  rows[0].rmspe = 0.1;
  rows[0].mcc = -1.0;
  rows[0].wall_time_ms = 12.5;
  rows[0].seed = (1ULL << 63) + 5;  // beyond signed range
  rows[1].method = "amp";
  rows[1].seed = 7;

  const TempFile tmp("metrics.csv");
  write_metrics_csv(tmp.path, rows);
  const auto back = load_metrics_csv(tmp.path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].method == "solver");
  CHECK(back[0].mse == rows[0].mse);
  CHECK(back[0].seed == rows[0].seed);
  CHECK(back[1].seed == 7);

  std::ifstream in(tmp.path);
  std::string header;
  std::getline(in, header);
  CHECK(header == kMetricsHeader);
}
