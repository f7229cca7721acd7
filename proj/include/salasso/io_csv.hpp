#pragma once

#include "salasso/metrics.hpp"
#include "salasso/types.hpp"

#include <string>
#include <vector>

namespace salasso {

// 17 significant digits: doubles survive a write/read round trip bitwise.
std::string format_double(double v);

// Dataset files: header "y,x_0001,...", one observation per row.
LinearDataset load_regression_csv(const std::string& path);
void write_regression_csv(const std::string& path, const LinearDataset& ds);

// Structure files, 1-based feature ids covering 1..p exactly once. Header
// "feature_id,group_id" gives a group structure, "feature_id,u_1,...,u_q" a
// covariate structure.
StructureSpec load_structure_csv(const std::string& path, Index p);
void write_group_structure_csv(const std::string& path, const Partition& partition);
void write_covariate_structure_csv(const std::string& path, const Matrix& U);

// Coefficient files: "feature_id,beta[,weight]".
void write_beta_csv(const std::string& path, const Vector& beta,
                    const Vector* weights = nullptr);
Vector load_beta_csv(const std::string& path);

inline constexpr const char* kMetricsHeader =
    "method,replication,delta,lambda,gamma,mse,rmspe,mcc,wall_time_ms,seed";
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> load_metrics_csv(const std::string& path);

}  // namespace salasso
