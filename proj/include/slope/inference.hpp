#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slope/lambda_sequence.hpp"
#include "slope/solver.hpp"

namespace slope {

/// Result of the iterative sigma-unknown SLOPE fit. beta is the final SLOPE
/// solution, beta_debiased the least-squares refit on its support (zeros
/// elsewhere). When the support loop fails to stabilize, converged is false
/// and previous_support holds the next-to-last support of the cycle.
struct ScaledSlopeResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd beta_debiased;
  std::vector<Eigen::Index> support;
  std::vector<Eigen::Index> previous_support;
  double sigma_hat = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Iterative SLOPE fit with unknown noise level. lambda_unit is the
/// sequence designed for sigma = 1; each pass estimates sigma^2 as
/// RSS/(n - |S| - 1) from the least-squares fit on the current support
/// (starting from the empty set, which for a centered response makes the
/// first scale Std(y)), solves SLOPE with sigma_hat * lambda_unit and
/// repeats until the support returns unchanged. The response is expected
/// centered; a constant response is rejected.
ScaledSlopeResult scaled_slope(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const LambdaSequence& lambda_unit, int max_iters = 100,
                               const SolverConfig& solver_config = {});

struct OlsFit {
  Eigen::VectorXd coef;  ///< coefficients over the support, in support order
  double rss = 0.0;
};

/// Least squares of y on the columns in `support` (no intercept). Empty
/// support yields an empty coefficient vector and rss = ||y||^2. Rank
/// deficiency throws, naming the dependent columns.
OlsFit ols_refit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<Eigen::Index>& support);

/// Selection outcome of a testing-style procedure.
struct RejectionSet {
  std::vector<Eigen::Index> rejected;  ///< 0-based indices
  Eigen::Index threshold_index = 0;    ///< i_BH or analogous rejection count
  double statistic_scale = 1.0;        ///< sigma used
};

/// Benjamini-Hochberg step-up on |statistics|/sigma against the critical
/// values Phi^{-1}(1 - i q / 2p); rejects the top i_BH statistics, with
/// i_BH = 0 when no index qualifies.
RejectionSet bh_step_up(const Eigen::VectorXd& statistics, double sigma, double q);

/// Hard thresholding at t_FDR = |y|_(i_BH): entries with |y_i| >= t_FDR are
/// kept, the rest set to zero; the all-zero vector when i_BH = 0.
Eigen::VectorXd fdr_threshold_estimate(const Eigen::VectorXd& y_tilde, double sigma, double q);

/// SLOPE selection under an orthogonal design: one prox of y_tilde at
/// sigma * lambda_BH, rejecting the exactly-nonzero coordinates.
RejectionSet slope_orthogonal_select(const Eigen::VectorXd& y_tilde, double sigma, double q);

}  // namespace slope
