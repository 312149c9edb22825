#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slope/lambda_sequence.hpp"

namespace slope {

/// Least-squares SLOPE instance: minimize 1/2 ||y - X b||^2 + J_lambda(b).
/// The lambda sequence is assumed already scaled by the noise level when
/// sigma is known. The constructor validates shapes and finiteness.
struct SlopeProblem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  LambdaSequence lambda;

  SlopeProblem(Eigen::MatrixXd X, Eigen::VectorXd y, LambdaSequence lambda);

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

enum class StepRule { fixed, backtracking };
enum class Acceleration { plain, fista };

struct SolverConfig {
  int max_iters = 20000;
  double tolerance = 1e-7;  ///< relative duality-gap threshold
  StepRule step_rule = StepRule::backtracking;
  double fixed_step = 0.0;     ///< 0 selects 1/||X||^2; must lie in (0, 2/||X||^2)
  double backtrack_eta = 0.5;  ///< step shrink factor in (0, 1)
  double initial_step = 0.0;   ///< backtracking start; 0 selects 1/||X||^2
  Acceleration acceleration = Acceleration::fista;
  Eigen::VectorXd b0;  ///< optional warm start; empty means zeros
};

struct SlopeSolution {
  Eigen::VectorXd beta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double dual_gap = 0.0;
  std::vector<Eigen::Index> support;  ///< 0-based indices with beta exactly nonzero
};

/// 1/2 ||y - X beta||^2 + J_lambda(beta).
double slope_objective(const SlopeProblem& problem, const Eigen::VectorXd& beta);

/// Plain proximal gradient iteration b+ = prox_{t J}(b - t X'(Xb - y)).
/// With a fixed valid step the objective is nonincreasing. Matrix products
/// use Eigen's sequential kernels, so results are reproducible per build.
SlopeSolution solve_proximal_gradient(const SlopeProblem& problem, const SolverConfig& config);

/// Accelerated variant carrying the (a, b) iterate pair with theta_0 = 1 and
/// 1/theta_{k+1} = (1 + sqrt(1 + 4/theta_k^2)) / 2. No restarts.
SlopeSolution solve_fista(const SlopeProblem& problem, const SolverConfig& config);

/// Dispatch on config.acceleration.
SlopeSolution solve_slope(const SlopeProblem& problem, const SolverConfig& config);

/// Certified upper bound on objective(beta) - objective(optimum): the
/// residual r = y - X beta is scaled by the largest c <= 1 making X'(c r)
/// feasible for the sorted-l1 dual ball (all cumulative sums of the sorted
/// absolute correlations bounded by those of lambda), and the Fenchel dual
/// value at that point is subtracted from the primal objective.
double duality_gap(const SlopeProblem& problem, const Eigen::VectorXd& beta);

/// Largest squared singular value of X via power iteration on the Gram
/// operator, deterministic start vector, relative accuracy about 1e-9.
/// Returns 0 for the zero matrix.
double operator_norm_sq(const Eigen::MatrixXd& X);

}  // namespace slope
