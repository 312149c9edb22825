#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace slope {

/// Center each column and scale it to unit l2 norm, in place. Constant
/// columns cannot be standardized and throw std::invalid_argument naming
/// the 1-based column.
inline void center_standardize_columns(Eigen::MatrixXd& X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    X.col(j).array() -= X.col(j).mean();
    double nrm = X.col(j).norm();
    if (nrm == 0.0)
      throw std::invalid_argument("column " + std::to_string(j + 1) +
                                  " is constant and cannot be standardized");
    X.col(j) /= nrm;
  }
}

/// Subtract the mean, in place.
inline void center(Eigen::VectorXd& y) { y.array() -= y.mean(); }

}  // namespace slope
