#include "slope/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slope/rng.hpp"
#include "slope/sorted_l1.hpp"

namespace slope {

SlopeProblem::SlopeProblem(Eigen::MatrixXd X_, Eigen::VectorXd y_, LambdaSequence lambda_)
    : X(std::move(X_)), y(std::move(y_)), lambda(std::move(lambda_)) {
  if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("SlopeProblem: empty design");
  if (!X.allFinite()) throw std::invalid_argument("SlopeProblem: X has NaN/Inf entries");
  if (!y.allFinite()) throw std::invalid_argument("SlopeProblem: y has NaN/Inf entries");
  if (y.size() != X.rows())
    throw std::invalid_argument("SlopeProblem: y has length " + std::to_string(y.size()) +
                                " but X has " + std::to_string(X.rows()) + " rows");
  if (lambda.size() != X.cols())
    throw std::invalid_argument("SlopeProblem: lambda has length " +
                                std::to_string(lambda.size()) + " but X has " +
                                std::to_string(X.cols()) + " columns");
}

double slope_objective(const SlopeProblem& problem, const Eigen::VectorXd& beta) {
  return 0.5 * (problem.y - problem.X * beta).squaredNorm() +
         sorted_l1_norm(beta, problem.lambda);
}

namespace {

std::vector<Eigen::Index> exact_support(const Eigen::VectorXd& beta) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta[i] != 0.0) s.push_back(i);
  return s;
}

// Gap given the residual r = y - X beta, the correlations X'r and the primal
// value at beta.
double gap_from_residual(const Eigen::VectorXd& y, const Eigen::VectorXd& r,
                         const Eigen::VectorXd& corr, const Eigen::VectorXd& lambda,
                         double primal) {
  Eigen::VectorXd a = corr.cwiseAbs();
  std::sort(a.data(), a.data() + a.size(), std::greater<double>());
  double scale = 1.0, cum_a = 0.0, cum_l = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    cum_a += a[k];
    cum_l += lambda[k];
    if (cum_a > cum_l) scale = std::min(scale, cum_l / cum_a);
  }
  // Fenchel dual value at nu = scale * r.
  double dual = scale * y.dot(r) - 0.5 * scale * scale * r.squaredNorm();
  return std::max(primal - dual, 0.0);
}

struct Validated {
  double gram_norm;   // ||X||^2
  double step;        // initial step size
};

Validated validate(const SlopeProblem& problem, const SolverConfig& config) {
  if (config.max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(config.tolerance >= 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be >= 0");
  if (config.step_rule == StepRule::backtracking &&
      !(config.backtrack_eta > 0.0 && config.backtrack_eta < 1.0))
    throw std::invalid_argument("SolverConfig: backtrack_eta must lie in (0, 1)");
  if (config.b0.size() != 0) {
    if (config.b0.size() != problem.p())
      throw std::invalid_argument("SolverConfig: warm start b0 has wrong length");
    if (!config.b0.allFinite())
      throw std::invalid_argument("SolverConfig: warm start b0 has NaN/Inf entries");
  }

  double L = operator_norm_sq(problem.X);
  double step;
  if (config.step_rule == StepRule::fixed) {
    step = config.fixed_step > 0.0 ? config.fixed_step : (L > 0.0 ? 1.0 / L : 1.0);
    if (L > 0.0 && !(step > 0.0 && step < 2.0 / L))
      throw std::invalid_argument("SolverConfig: fixed step must lie in (0, 2/||X||^2)");
  } else {
    step = config.initial_step > 0.0 ? config.initial_step : (L > 0.0 ? 1.0 / L : 1.0);
  }
  return {L, step};
}

SlopeSolution solve_impl(const SlopeProblem& problem, const SolverConfig& config,
                         Acceleration accel) {
  const Validated v = validate(problem, config);
  const Eigen::MatrixXd& X = problem.X;
  const Eigen::VectorXd& y = problem.y;
  const Eigen::VectorXd& lam = problem.lambda.values();
  const Eigen::Index p = problem.p();

  Eigen::VectorXd b = config.b0.size() ? config.b0 : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd Xb = X * b;
  Eigen::VectorXd a = b, Xa = Xb;
  double theta = 1.0;
  double t = v.step;

  ProxWorkspace ws;
  Eigen::VectorXd grad(p), cand(p), Xcand(y.size()), r(y.size()), corr(p), forward(p);

  SlopeSolution sol;
  sol.beta = b;
  sol.objective = 0.5 * (y - Xb).squaredNorm() + sorted_l1_norm(b, problem.lambda);
  sol.dual_gap = duality_gap(problem, b);

  const bool fista = accel == Acceleration::fista;

  for (int k = 1; k <= config.max_iters; ++k) {
    const Eigen::VectorXd& point = fista ? a : b;
    const Eigen::VectorXd& Xpoint = fista ? Xa : Xb;
    grad.noalias() = X.transpose() * (Xpoint - y);

    double g_point = 0.5 * (y - Xpoint).squaredNorm();
    for (;;) {
      forward = point - t * grad;
      prox_sorted_l1_scaled(forward, lam, t, ws, cand);
      Xcand.noalias() = X * cand;
      if (config.step_rule == StepRule::fixed) break;
      double lhs = 0.5 * (y - Xcand).squaredNorm();
      double rhs = g_point + grad.dot(cand - point) + (cand - point).squaredNorm() / (2.0 * t);
      if (lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs))) break;
      t *= config.backtrack_eta;
    }

    if (fista) {
      double theta_next = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (theta * theta)));
      double coef = theta_next * (1.0 / theta - 1.0);
      a = cand + coef * (cand - b);
      Xa = Xcand + coef * (Xcand - Xb);
      theta = theta_next;
    }
    b.swap(cand);
    Xb.swap(Xcand);

    r = y - Xb;
    double primal = 0.5 * r.squaredNorm() + sorted_l1_norm(b, problem.lambda);
    if (!std::isfinite(primal))
      throw std::runtime_error("solver: nonfinite objective at iteration " + std::to_string(k));
    corr.noalias() = X.transpose() * r;
    double gap = gap_from_residual(y, r, corr, lam, primal);

    sol.iterations = k;
    sol.objective = primal;
    sol.dual_gap = gap;
    if (gap <= config.tolerance * std::max(primal, 1e-12)) {
      sol.converged = true;
      break;
    }
  }

  sol.beta = b;
  sol.support = exact_support(b);
  return sol;
}

}  // namespace

SlopeSolution solve_proximal_gradient(const SlopeProblem& problem, const SolverConfig& config) {
  return solve_impl(problem, config, Acceleration::plain);
}

SlopeSolution solve_fista(const SlopeProblem& problem, const SolverConfig& config) {
  return solve_impl(problem, config, Acceleration::fista);
}

SlopeSolution solve_slope(const SlopeProblem& problem, const SolverConfig& config) {
  return solve_impl(problem, config, config.acceleration);
}

double duality_gap(const SlopeProblem& problem, const Eigen::VectorXd& beta) {
  if (beta.size() != problem.p())
    throw std::invalid_argument("duality_gap: beta has wrong length");
  Eigen::VectorXd r = problem.y - problem.X * beta;
  Eigen::VectorXd corr = problem.X.transpose() * r;
  double primal = 0.5 * r.squaredNorm() + sorted_l1_norm(beta, problem.lambda);
  return gap_from_residual(problem.y, r, corr, problem.lambda.values(), primal);
}

double operator_norm_sq(const Eigen::MatrixXd& X) {
  if (!X.allFinite()) throw std::invalid_argument("operator_norm_sq: X has NaN/Inf entries");
  if (X.size() == 0 || X.isZero(0.0)) return 0.0;

  // Iterate on the smaller Gram operator.
  const bool tall = X.rows() >= X.cols();
  const Eigen::Index dim = tall ? X.cols() : X.rows();

  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    CounterRng rng(0x9bd1f7a5u, {attempt});
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    v.normalize();

    double value = 0.0;
    Eigen::VectorXd w(dim);
    for (int it = 0; it < 100000; ++it) {
      if (tall)
        w.noalias() = X.transpose() * (X * v);
      else
        w.noalias() = X * (X.transpose() * v);
      double next = v.dot(w);  // Rayleigh quotient, v normalized
      double wn = w.norm();
      if (wn == 0.0) break;  // v landed in the null space; retry
      v = w / wn;
      if (std::abs(next - value) <= 1e-10 * std::max(next, 1e-300)) return next;
      value = next;
    }
    if (value > 0.0) return value;
  }
  return 0.0;
}

}  // namespace slope
