#pragma once

#include <Eigen/Dense>

namespace slope {

/// Nonincreasing, nonnegative, not-all-zero regularization weights
/// lambda_1 >= lambda_2 >= ... >= lambda_p >= 0. The constructor validates;
/// invalid input throws std::invalid_argument.
class LambdaSequence {
 public:
  explicit LambdaSequence(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

  /// Sequence multiplied by a positive scalar.
  LambdaSequence scaled(double factor) const;

 private:
  Eigen::VectorXd values_;
};

}  // namespace slope
