#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "slope/lambda_sequence.hpp"

namespace slope {

/// Sorted-l1 norm J_lambda(b) = sum_i lambda_i |b|_(i), with |b|_(1) >= ...
/// >= |b|_(p) the absolute entries in nonincreasing order.
double sorted_l1_norm(const Eigen::VectorXd& b, const LambdaSequence& lambda);

/// Scratch buffers for the prox: the block stack of the stack-based
/// algorithm plus permutation and sign buffers for input normalization.
/// One workspace serves one thread at a time and is reusable across calls.
class ProxWorkspace {
 public:
  /// Number of block merges performed by the most recent prox call.
  /// At most p - 1 on a length-p input: each entry starts its own block
  /// and every merge consumes one.
  std::size_t last_merge_count() const { return merge_count_; }

 private:
  struct Block {
    Eigen::Index lo, hi;  // inclusive entry range of the block
    double sum;           // unclamped running sum of y - lambda over the block
    double avg;           // clamped block average, (sum / len)+
  };

  std::vector<Block> stack_;
  std::vector<Eigen::Index> order_;
  Eigen::VectorXd sorted_abs_;
  std::size_t merge_count_ = 0;

  friend void prox_sorted_l1_scaled(const Eigen::VectorXd&, const Eigen::VectorXd&, double,
                                    ProxWorkspace&, Eigen::VectorXd&);
  friend void prox_core_sorted(const Eigen::VectorXd&, const Eigen::VectorXd&, double,
                               ProxWorkspace&, Eigen::VectorXd&);
};

/// Prox of the sorted-l1 norm: the unique minimizer of
/// 1/2 ||y - x||^2 + sum_i lambda_i |x|_(i). Accepts arbitrary signs and
/// orderings; internally reduces to the sorted nonnegative case and restores
/// signs and positions. Entries with y_i = 0 map to exactly 0.
Eigen::VectorXd prox_sorted_l1(const Eigen::VectorXd& y, const LambdaSequence& lambda);

/// Allocation-free variant writing into `out` (resized as needed).
void prox_sorted_l1(const Eigen::VectorXd& y, const LambdaSequence& lambda, ProxWorkspace& ws,
                    Eigen::VectorXd& out);

/// Hot-path variant used by the solvers: prox with weights scale * lambda,
/// where `lambda` is trusted to be nonincreasing and nonnegative (no
/// LambdaSequence revalidation, no finiteness scan of y).
void prox_sorted_l1_scaled(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda, double scale,
                           ProxWorkspace& ws, Eigen::VectorXd& out);

/// Prox restricted to inputs already sorted and nonnegative
/// (y_1 >= ... >= y_p >= 0); solves the quadratic program
///   min 1/2 ||y - x||^2 + sum_i lambda_i x_i  s.t.  x_1 >= ... >= x_p >= 0
/// in O(p) block merges. With verify_input, violations of the ordering
/// precondition throw std::invalid_argument; the solvers' hot path skips
/// the scan.
Eigen::VectorXd prox_sorted_l1_sorted_nonneg(const Eigen::VectorXd& y,
                                             const LambdaSequence& lambda,
                                             bool verify_input = true);

/// Least-squares fit under the nonincreasing constraint x_1 >= ... >= x_p
/// (pool-adjacent-violators; block means over the pooled partition, no
/// nonnegativity clamp).
Eigen::VectorXd isotonic_regression(const Eigen::VectorXd& y);

}  // namespace slope
