#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "slope/lambda_sequence.hpp"
#include "slope/simlab.hpp"

namespace slope {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict CSV reader: every cell must parse fully as a double, rows must be
/// rectangular, and nonfinite values are rejected unless allowed. A single
/// leading header line is detected (any non-numeric cell) and skipped.
/// Errors carry file and line: "path:line: message".
Eigen::MatrixXd read_matrix_csv(const std::string& path, bool allow_nonfinite = false);

/// Single-column variant.
Eigen::VectorXd read_vector_csv(const std::string& path, bool allow_nonfinite = false);

/// One column with 17 significant digits, so values round-trip exactly.
void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const std::string& header);

void write_lambda_csv(const std::string& path, const LambdaSequence& lambda);
LambdaSequence read_lambda_csv(const std::string& path);

/// One row per (method, k, replicate) with columns
/// scenario,k,rep,R,V,FDP,TPP,relMSE,sigma_hat.
void write_sim_report_csv(const std::string& path, const SimReport& report);

/// printf %.17g, with "nan" for NaN.
std::string format_double(double x);

}  // namespace slope
