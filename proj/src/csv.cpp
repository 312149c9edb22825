#include "slope/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>
#include <vector>

namespace slope {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_cell(std::string_view raw, double& out) {
  std::string_view s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path, bool allow_nonfinite) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open file");

  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool header_allowed = true;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_cells(line);
    std::vector<double> row(cells.size());
    bool ok = true;
    std::size_t bad = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_cell(cells[c], row[c])) {
        ok = false;
        bad = c;
        break;
      }
    }
    if (!ok) {
      if (header_allowed) {  // treat the first non-numeric line as a header
        header_allowed = false;
        continue;
      }
      throw IoError(path + ":" + std::to_string(lineno) + ": cannot parse '" + cells[bad] +
                    "' as a number");
    }
    header_allowed = false;
    if (!allow_nonfinite)
      for (std::size_t c = 0; c < row.size(); ++c)
        if (!std::isfinite(row[c]))
          throw IoError(path + ":" + std::to_string(lineno) + ": nonfinite value '" +
                        cells[c] + "' (pass the allow flag to accept)");
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                    " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no numeric data");

  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

Eigen::VectorXd read_vector_csv(const std::string& path, bool allow_nonfinite) {
  Eigen::MatrixXd M = read_matrix_csv(path, allow_nonfinite);
  if (M.cols() != 1)
    throw IoError(path + ": expected a single column, found " + std::to_string(M.cols()));
  return M.col(0);
}

void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const std::string& header) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  if (!header.empty()) out << header << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
  if (!out) throw IoError(path + ": write failed");
}

void write_lambda_csv(const std::string& path, const LambdaSequence& lambda) {
  write_vector_csv(path, lambda.values(), "lambda");
}

LambdaSequence read_lambda_csv(const std::string& path) {
  return LambdaSequence(read_vector_csv(path));
}

void write_sim_report_csv(const std::string& path, const SimReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "scenario,k,rep,R,V,FDP,TPP,relMSE,sigma_hat\n";
  for (const auto& r : report.records) {
    out << r.scenario << ',' << r.k << ',' << r.rep << ',' << r.R << ',' << r.V << ','
        << format_double(r.fdp) << ',' << format_double(r.tpp) << ',' << format_double(r.rel_mse)
        << ',' << format_double(r.sigma_hat) << '\n';
  }
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace slope
