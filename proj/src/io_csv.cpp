#include "salasso/io_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace salasso {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Trailing blank lines are tolerated.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw SchemaError(path + " is empty");
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// line/column are 1-based; column counts fields.
double parse_double(const std::string& field, const std::string& path,
                    std::size_t line, std::size_t column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || field.empty()) {
    throw ParseError(path + ": line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": not a number: '" + field + "'");
  }
  return value;
}

long parse_long(const std::string& field, const std::string& path, std::size_t line,
                std::size_t column) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || field.empty()) {
    throw ParseError(path + ": line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": not an integer: '" + field + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& field, const std::string& path,
                        std::size_t line, std::size_t column) {
  std::uint64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || field.empty()) {
    throw ParseError(path + ": line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": not an unsigned integer: '" + field + "'");
  }
  return value;
}

std::string feature_column_name(std::size_t j) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "x_%04zu", j);
  return buf;
}

}  // namespace

LinearDataset load_regression_csv(const std::string& path) {
  const auto lines = read_lines(path);
  const auto header = split_fields(lines[0]);
  if (header.empty() || header[0] != "y") {
    throw SchemaError(path + ": first column must be 'y'");
  }
  const std::size_t p = header.size() - 1;
  if (p == 0) throw SchemaError(path + ": no feature columns");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != feature_column_name(j)) {
      throw SchemaError(path + ": expected column '" + feature_column_name(j) +
                        "', found '" + header[j] + "'");
    }
  }
  const std::size_t n = lines.size() - 1;
  if (n == 0) throw SchemaError(path + ": no data rows");

  LinearDataset ds;
  ds.y.resize(static_cast<Index>(n));
  ds.X.resize(static_cast<Index>(n), static_cast<Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    const auto fields = split_fields(lines[i + 1]);
    if (fields.size() != p + 1) {
      throw ParseError(path + ": line " + std::to_string(i + 2) + ": expected " +
                       std::to_string(p + 1) + " fields, found " +
                       std::to_string(fields.size()));
    }
    ds.y(static_cast<Index>(i)) = parse_double(fields[0], path, i + 2, 1);
    for (std::size_t j = 0; j < p; ++j) {
      ds.X(static_cast<Index>(i), static_cast<Index>(j)) =
          parse_double(fields[j + 1], path, i + 2, j + 2);
    }
  }
  return ds;
}

void write_regression_csv(const std::string& path, const LinearDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << "y";
  for (Index j = 0; j < ds.p(); ++j) {
    out << ',' << feature_column_name(static_cast<std::size_t>(j) + 1);
  }
  out << '\n';
  for (Index i = 0; i < ds.n(); ++i) {
    out << format_double(ds.y(i));
    for (Index j = 0; j < ds.p(); ++j) out << ',' << format_double(ds.X(i, j));
    out << '\n';
  }
}

StructureSpec load_structure_csv(const std::string& path, Index p) {
  const auto lines = read_lines(path);
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "feature_id") {
    throw SchemaError(path + ": first column must be 'feature_id'");
  }
  const bool grouped = header.size() == 2 && header[1] == "group_id";
  if (!grouped) {
    for (std::size_t k = 1; k < header.size(); ++k) {
      if (header[k] != "u_" + std::to_string(k)) {
        throw SchemaError(path + ": expected column 'u_" + std::to_string(k) +
                          "', found '" + header[k] + "'");
      }
    }
  }
  if (lines.size() - 1 != static_cast<std::size_t>(p)) {
    throw SchemaError(path + ": expected " + std::to_string(p) + " feature rows, found " +
                      std::to_string(lines.size() - 1));
  }

  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  if (grouped) {
    std::map<long, std::vector<Index>> groups;
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto fields = split_fields(lines[r]);
      if (fields.size() != 2) {
        throw ParseError(path + ": line " + std::to_string(r + 1) +
                         ": expected 2 fields");
      }
      const long fid = parse_long(fields[0], path, r + 1, 1);
      if (fid < 1 || fid > static_cast<long>(p)) {
        throw SchemaError(path + ": feature id " + std::to_string(fid) +
                          " outside 1.." + std::to_string(p));
      }
      if (seen[static_cast<std::size_t>(fid - 1)]++) {
        throw SchemaError(path + ": duplicate feature id " + std::to_string(fid));
      }
      groups[parse_long(fields[1], path, r + 1, 2)].push_back(static_cast<Index>(fid - 1));
    }
    GroupStructure gs;
    for (auto& [gid, members] : groups) {
      std::sort(members.begin(), members.end());
      gs.partition.push_back(std::move(members));
    }
    validate_partition(gs.partition, p);
    return gs;
  }

  const std::size_t q = header.size() - 1;
  CovariateStructure cs;
  cs.U.resize(p, static_cast<Index>(q));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != q + 1) {
      throw ParseError(path + ": line " + std::to_string(r + 1) + ": expected " +
                       std::to_string(q + 1) + " fields");
    }
    const long fid = parse_long(fields[0], path, r + 1, 1);
    if (fid < 1 || fid > static_cast<long>(p)) {
      throw SchemaError(path + ": feature id " + std::to_string(fid) + " outside 1.." +
                        std::to_string(p));
    }
    if (seen[static_cast<std::size_t>(fid - 1)]++) {
      throw SchemaError(path + ": duplicate feature id " + std::to_string(fid));
    }
    for (std::size_t k = 0; k < q; ++k) {
      cs.U(static_cast<Index>(fid - 1), static_cast<Index>(k)) =
          parse_double(fields[k + 1], path, r + 1, k + 2);
    }
  }
  return cs;
}

void write_group_structure_csv(const std::string& path, const Partition& partition) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << "feature_id,group_id\n";
  for (std::size_t d = 0; d < partition.size(); ++d) {
    for (Index j : partition[d]) {
      out << (j + 1) << ',' << (d + 1) << '\n';
    }
  }
}

void write_covariate_structure_csv(const std::string& path, const Matrix& U) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << "feature_id";
  for (Index k = 0; k < U.cols(); ++k) out << ",u_" << (k + 1);
  out << '\n';
  for (Index j = 0; j < U.rows(); ++j) {
    out << (j + 1);
    for (Index k = 0; k < U.cols(); ++k) out << ',' << format_double(U(j, k));
    out << '\n';
  }
}

void write_beta_csv(const std::string& path, const Vector& beta, const Vector* weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << (weights ? "feature_id,beta,weight" : "feature_id,beta") << '\n';
  for (Index j = 0; j < beta.size(); ++j) {
    out << (j + 1) << ',' << format_double(beta(j));
    if (weights) out << ',' << format_double((*weights)(j));
    out << '\n';
  }
}

Vector load_beta_csv(const std::string& path) {
  const auto lines = read_lines(path);
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "feature_id" || header[1] != "beta") {
    throw SchemaError(path + ": expected header 'feature_id,beta[,weight]'");
  }
  Vector beta(static_cast<Index>(lines.size() - 1));
  std::vector<char> seen(lines.size() - 1, 0);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != header.size()) {
      throw ParseError(path + ": line " + std::to_string(r + 1) + ": wrong field count");
    }
    const long fid = parse_long(fields[0], path, r + 1, 1);
    if (fid < 1 || fid > static_cast<long>(beta.size())) {
      throw SchemaError(path + ": feature id " + std::to_string(fid) + " out of range");
    }
    if (seen[static_cast<std::size_t>(fid - 1)]++) {
      throw SchemaError(path + ": duplicate feature id " + std::to_string(fid));
    }
    beta(static_cast<Index>(fid - 1)) = parse_double(fields[1], path, r + 1, 2);
  }
  return beta;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << kMetricsHeader << '\n';
  for (const auto& row : rows) {
    if (row.method.find(',') != std::string::npos) {
      throw SchemaError("method name contains a comma: " + row.method);
    }
    out << row.method << ',' << row.replication << ',' << format_double(row.delta)
        << ',' << format_double(row.lambda) << ',' << format_double(row.gamma) << ','
        << format_double(row.mse) << ',' << format_double(row.rmspe) << ','
        << format_double(row.mcc) << ',' << format_double(row.wall_time_ms) << ','
        << row.seed << '\n';
  }
}

std::vector<MetricsRow> load_metrics_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines[0] != kMetricsHeader) {
    throw SchemaError(path + ": unexpected metrics header");
  }
  std::vector<MetricsRow> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != 10) {
      throw ParseError(path + ": line " + std::to_string(r + 1) +
                       ": expected 10 fields");
    }
    MetricsRow row;
    row.method = fields[0];
    row.replication = static_cast<int>(parse_long(fields[1], path, r + 1, 2));
    row.delta = parse_double(fields[2], path, r + 1, 3);
    row.lambda = parse_double(fields[3], path, r + 1, 4);
    row.gamma = parse_double(fields[4], path, r + 1, 5);
    row.mse = parse_double(fields[5], path, r + 1, 6);
    row.rmspe = parse_double(fields[6], path, r + 1, 7);
    row.mcc = parse_double(fields[7], path, r + 1, 8);
    row.wall_time_ms = parse_double(fields[8], path, r + 1, 9);
    row.seed = parse_u64(fields[9], path, r + 1, 10);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace salasso
