// Timing comparison of the serial reference kernels against the OpenMP
// variants, with a bitwise equality check on every output. --quick shrinks
// the problem so the smoke test stays fast.
#include "salasso/kernels.hpp"
#include "salasso/rng.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

using namespace salasso;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const double total =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return total / reps;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--quick") quick = true;
  }
  const Index n = quick ? 200 : 2000;
  const Index p = quick ? 300 : 4000;
  const int reps = quick ? 3 : 20;

  const RandomField field(7, make_stream(StreamTag::harness));
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = field.normal(i, j, 0);
  Vector b(p), e(n), theta(p);
  for (Index j = 0; j < p; ++j) {
    b[j] = field.normal(j, 0, 1);
    theta[j] = 0.3 + 0.1 * field.uniform(j, 1, 1);
  }
  for (Index i = 0; i < n; ++i) e[i] = field.normal(i, 0, 2);

  std::printf("threads available: %d\n", kernels::max_threads());
  std::printf("%-24s %12s %12s %8s %s\n", "kernel", "serial ms", "omp ms", "speedup",
              "bitwise");

  bool all_equal = true;
  const auto report = [&](const char* name, double ts, double to, bool eq) {
    all_equal = all_equal && eq;
    std::printf("%-24s %12.3f %12.3f %8.2f %s\n", name, ts, to,
                to > 0 ? ts / to : 0.0, eq ? "yes" : "NO");
  };

  {
    Vector out_s(n), out_o(n);
    const double ts = time_ms([&] { kernels::serial::design_times(X, b, out_s); }, reps);
    const double to = time_ms([&] { kernels::omp::design_times(X, b, out_o); }, reps);
    report("design_times", ts, to, bitwise_equal(out_s, out_o));
  }
  {
    Vector out_s(p), out_o(p);
    const double ts =
        time_ms([&] { kernels::serial::design_transpose_times(X, e, out_s); }, reps);
    const double to =
        time_ms([&] { kernels::omp::design_transpose_times(X, e, out_o); }, reps);
    report("design_transpose_times", ts, to, bitwise_equal(out_s, out_o));
  }
  {
    Vector out_s(p), out_o(p);
    const double ts =
        time_ms([&] { kernels::serial::soft_threshold_vec(b, theta, out_s); }, reps);
    const double to =
        time_ms([&] { kernels::omp::soft_threshold_vec(b, theta, out_o); }, reps);
    report("soft_threshold_vec", ts, to, bitwise_equal(out_s, out_o));
  }
  {
    double rs = 0.0, ro = 0.0;
    const double ts = time_ms([&] { rs = kernels::serial::mean_active(b, theta); }, reps);
    const double to = time_ms([&] { ro = kernels::omp::mean_active(b, theta); }, reps);
    report("mean_active", ts, to, rs == ro);
  }
  {
    double rs = 0.0, ro = 0.0;
    const double ts = time_ms([&] { rs = kernels::serial::sum(e); }, reps);
    const double to = time_ms([&] { ro = kernels::omp::sum(e); }, reps);
    report("sum", ts, to, rs == ro);
  }

  if (!all_equal) {
    std::printf("FAIL: kernel outputs differ between serial and omp\n");
    return 1;
  }
  std::printf("all kernels bitwise identical\n");
  return 0;
}
