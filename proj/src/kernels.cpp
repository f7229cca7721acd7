#include "salasso/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace salasso::kernels {

namespace {

constexpr Index kBlock = 1024;

inline double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

namespace serial {

void design_times(const Matrix& X, const Vector& b, Vector& out) {
  out.resize(X.rows());
  for (Index i = 0; i < X.rows(); ++i) out(i) = X.row(i).dot(b);
}

void design_transpose_times(const Matrix& X, const Vector& e, Vector& out) {
  out.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) out(j) = X.col(j).dot(e);
}

void soft_threshold_vec(const Vector& v, const Vector& theta, Vector& out) {
  out.resize(v.size());
  for (Index j = 0; j < v.size(); ++j) out(j) = soft(v(j), theta(j));
}

double mean_active(const Vector& v, const Vector& theta) {
  Index count = 0;
  for (Index j = 0; j < v.size(); ++j) count += std::abs(v(j)) > theta(j);
  return v.size() ? static_cast<double>(count) / static_cast<double>(v.size()) : 0.0;
}

double sum(const Vector& v) {
  // Same fixed-block order as the parallel variant: the block layout is part
  // of the contract, so both kernels round identically.
  const Index n = v.size();
  const Index nblocks = (n + kBlock - 1) / kBlock;
  double total = 0.0;
  for (Index blk = 0; blk < nblocks; ++blk) {
    const Index lo = blk * kBlock;
    const Index hi = std::min(lo + kBlock, n);
    double acc = 0.0;
    for (Index i = lo; i < hi; ++i) acc += v(i);
    total += acc;
  }
  return total;
}

}  // namespace serial

namespace omp {

void design_times(const Matrix& X, const Vector& b, Vector& out) {
  out.resize(X.rows());
  const Index n = X.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) out(i) = X.row(i).dot(b);
}

void design_transpose_times(const Matrix& X, const Vector& e, Vector& out) {
  out.resize(X.cols());
  const Index p = X.cols();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < p; ++j) out(j) = X.col(j).dot(e);
}

void soft_threshold_vec(const Vector& v, const Vector& theta, Vector& out) {
  out.resize(v.size());
  const Index p = v.size();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < p; ++j) out(j) = soft(v(j), theta(j));
}

double mean_active(const Vector& v, const Vector& theta) {
  const Index p = v.size();
  if (p == 0) return 0.0;
  // Integer counts commute, so a plain reduction stays deterministic.
  long long count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (Index j = 0; j < p; ++j) count += std::abs(v(j)) > theta(j);
  return static_cast<double>(count) / static_cast<double>(p);
}

double sum(const Vector& v) {
  const Index n = v.size();
  const Index nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
  for (Index blk = 0; blk < nblocks; ++blk) {
    const Index lo = blk * kBlock;
    const Index hi = std::min(lo + kBlock, n);
    double acc = 0.0;
    for (Index i = lo; i < hi; ++i) acc += v(i);
    partial[static_cast<std::size_t>(blk)] = acc;
  }
  double total = 0.0;
  for (double d : partial) total += d;
  return total;
}

}  // namespace omp

#ifdef _OPENMP
void design_times(const Matrix& X, const Vector& b, Vector& out) {
  omp::design_times(X, b, out);
}
void design_transpose_times(const Matrix& X, const Vector& e, Vector& out) {
  omp::design_transpose_times(X, e, out);
}
void soft_threshold_vec(const Vector& v, const Vector& theta, Vector& out) {
  omp::soft_threshold_vec(v, theta, out);
}
double mean_active(const Vector& v, const Vector& theta) {
  return omp::mean_active(v, theta);
}
int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}
#else
void design_times(const Matrix& X, const Vector& b, Vector& out) {
  serial::design_times(X, b, out);
}
void design_transpose_times(const Matrix& X, const Vector& e, Vector& out) {
  serial::design_transpose_times(X, e, out);
}
void soft_threshold_vec(const Vector& v, const Vector& theta, Vector& out) {
  serial::soft_threshold_vec(v, theta, out);
}
double mean_active(const Vector& v, const Vector& theta) {
  return serial::mean_active(v, theta);
}
int max_threads() { return 1; }
void set_threads(int) {}
#endif

}  // namespace salasso::kernels
