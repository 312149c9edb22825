#include "slope/lambda_sequence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace slope {

LambdaSequence::LambdaSequence(Eigen::VectorXd values) : values_(std::move(values)) {
  const Eigen::Index p = values_.size();
  if (p < 1) throw std::invalid_argument("LambdaSequence: empty sequence");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!std::isfinite(values_[i]))
      throw std::invalid_argument("LambdaSequence: nonfinite entry at index " +
                                  std::to_string(i + 1));
    if (values_[i] < 0.0)
      throw std::invalid_argument("LambdaSequence: negative entry at index " +
                                  std::to_string(i + 1));
    if (i > 0 && values_[i] > values_[i - 1])
      throw std::invalid_argument("LambdaSequence: increasing at index " + std::to_string(i + 1));
  }
  if (values_[0] == 0.0) throw std::invalid_argument("LambdaSequence: all entries are zero");
}

LambdaSequence LambdaSequence::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("LambdaSequence::scaled: factor must be positive and finite");
  return LambdaSequence(values_ * factor);
}

}  // namespace slope
