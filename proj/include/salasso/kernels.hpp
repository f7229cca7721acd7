#pragma once

#include "salasso/types.hpp"

namespace salasso::kernels {

// Serial reference implementations. The omp_* variants below must produce
// bitwise-identical output for every thread count; tests compare them.
namespace serial {

void design_times(const Matrix& X, const Vector& b, Vector& out);            // X b
void design_transpose_times(const Matrix& X, const Vector& e, Vector& out);  // X^T e
void soft_threshold_vec(const Vector& v, const Vector& theta, Vector& out);
// Mean of 1{|v_j| > theta_j}: the average derivative of the thresholder.
double mean_active(const Vector& v, const Vector& theta);
double sum(const Vector& v);

}  // namespace serial

namespace omp {

void design_times(const Matrix& X, const Vector& b, Vector& out);
void design_transpose_times(const Matrix& X, const Vector& e, Vector& out);
void soft_threshold_vec(const Vector& v, const Vector& theta, Vector& out);
double mean_active(const Vector& v, const Vector& theta);
// Fixed-block partial sums combined in index order, so the result does not
// depend on the number of threads.
double sum(const Vector& v);

}  // namespace omp

// Dispatch used by the solvers; parallel when built with OpenMP.
void design_times(const Matrix& X, const Vector& b, Vector& out);
void design_transpose_times(const Matrix& X, const Vector& e, Vector& out);
void soft_threshold_vec(const Vector& v, const Vector& theta, Vector& out);
double mean_active(const Vector& v, const Vector& theta);

int max_threads();
void set_threads(int n);  // n <= 0 leaves the runtime default in place

}  // namespace salasso::kernels
