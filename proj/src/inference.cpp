#include "slope/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slope/lambda_gen.hpp"
#include "slope/normal.hpp"
#include "slope/sorted_l1.hpp"

namespace slope {

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd S(X.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) S.col(static_cast<Eigen::Index>(c)) = X.col(idx[c]);
  return S;
}

}  // namespace

OlsFit ols_refit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<Eigen::Index>& support) {
  if (y.size() != X.rows()) throw std::invalid_argument("ols_refit: X and y disagree on n");
  for (Eigen::Index j : support)
    if (j < 0 || j >= X.cols()) throw std::invalid_argument("ols_refit: support index out of range");
  if (static_cast<Eigen::Index>(support.size()) >= X.rows())
    throw std::invalid_argument("ols_refit: support size must be below n");

  if (support.empty()) return {Eigen::VectorXd(0), y.squaredNorm()};

  Eigen::MatrixXd XS = select_columns(X, support);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(XS);
  qr.setThreshold(1e-10);
  if (qr.rank() < XS.cols()) {
    // the trailing pivots identify the dependent columns
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < XS.cols(); ++k) {
      if (!cols.empty()) cols += ", ";
      cols += std::to_string(support[perm[k]] + 1);
    }
    throw std::runtime_error("ols_refit: rank-deficient design; dependent columns: " + cols);
  }
  OlsFit fit;
  fit.coef = qr.solve(y);
  fit.rss = (y - XS * fit.coef).squaredNorm();
  return fit;
}

ScaledSlopeResult scaled_slope(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const LambdaSequence& lambda_unit, int max_iters,
                               const SolverConfig& solver_config) {
  const Eigen::Index n = X.rows();
  if (y.size() != n) throw std::invalid_argument("scaled_slope: X and y disagree on n");
  if (lambda_unit.size() != X.cols())
    throw std::invalid_argument("scaled_slope: lambda length differs from column count");
  if (max_iters < 1) throw std::invalid_argument("scaled_slope: max_iters must be >= 1");
  if (n < 3) throw std::invalid_argument("scaled_slope: need n >= 3");

  const double centered_ss = (y.array() - y.mean()).matrix().squaredNorm();
  if (centered_ss == 0.0)
    throw std::invalid_argument("scaled_slope: response is constant, Std(y) = 0");

  ScaledSlopeResult result;
  std::vector<Eigen::Index> S;  // current support, empty at start
  double rss = y.squaredNorm();

  for (int it = 1; it <= max_iters; ++it) {
    const auto df = static_cast<double>(n - static_cast<Eigen::Index>(S.size()) - 1);
    const double sigma = std::sqrt(rss / df);

    SlopeProblem problem(X, y, lambda_unit.scaled(sigma));
    SolverConfig config = solver_config;
    SlopeSolution fit = solve_fista(problem, config);

    result.iterations = it;
    result.sigma_hat = sigma;
    result.beta = fit.beta;

    if (fit.support == S) {
      result.converged = true;
      result.support = std::move(fit.support);
      break;
    }
    result.previous_support = S;
    S = std::move(fit.support);
    result.support = S;

    if (static_cast<Eigen::Index>(S.size()) >= n - 1)
      throw std::runtime_error("scaled_slope: support grew to " + std::to_string(S.size()) +
                               " of n = " + std::to_string(n) + "; fit is degenerate");
    rss = ols_refit(X, y, S).rss;
  }

  OlsFit refit = ols_refit(X, y, result.support);
  result.beta_debiased = Eigen::VectorXd::Zero(X.cols());
  for (std::size_t c = 0; c < result.support.size(); ++c)
    result.beta_debiased[result.support[c]] = refit.coef[static_cast<Eigen::Index>(c)];
  if (result.converged) result.previous_support.clear();
  return result;
}

RejectionSet bh_step_up(const Eigen::VectorXd& statistics, double sigma, double q) {
  if (!statistics.allFinite()) throw std::invalid_argument("bh_step_up: nonfinite statistics");
  if (!(sigma > 0.0)) throw std::invalid_argument("bh_step_up: sigma must be positive");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("bh_step_up: q must lie in (0, 1)");

  const Eigen::Index p = statistics.size();
  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(statistics[a]) > std::abs(statistics[b]);
  });

  Eigen::Index i_bh = 0;
  for (Eigen::Index i = 1; i <= p; ++i) {
    double crit = inv_norm_cdf(1.0 - static_cast<double>(i) * q / (2.0 * static_cast<double>(p)));
    if (std::abs(statistics[order[i - 1]]) / sigma >= crit) i_bh = i;
  }

  RejectionSet set;
  set.threshold_index = i_bh;
  set.statistic_scale = sigma;
  set.rejected.assign(order.begin(), order.begin() + i_bh);
  std::sort(set.rejected.begin(), set.rejected.end());
  return set;
}

Eigen::VectorXd fdr_threshold_estimate(const Eigen::VectorXd& y_tilde, double sigma, double q) {
  RejectionSet set = bh_step_up(y_tilde, sigma, q);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(y_tilde.size());
  if (set.threshold_index == 0) return out;

  // t_FDR = |y|_(i_BH), the smallest rejected magnitude
  double t_fdr = std::numeric_limits<double>::infinity();
  for (Eigen::Index i : set.rejected) t_fdr = std::min(t_fdr, std::abs(y_tilde[i]));
  for (Eigen::Index i = 0; i < y_tilde.size(); ++i)
    if (std::abs(y_tilde[i]) >= t_fdr) out[i] = y_tilde[i];
  return out;
}

RejectionSet slope_orthogonal_select(const Eigen::VectorXd& y_tilde, double sigma, double q) {
  if (!y_tilde.allFinite()) throw std::invalid_argument("slope_orthogonal_select: nonfinite input");
  if (!(sigma > 0.0)) throw std::invalid_argument("slope_orthogonal_select: sigma must be positive");
  Eigen::VectorXd x = prox_sorted_l1(y_tilde, lambda_bh(y_tilde.size(), q).scaled(sigma));
  RejectionSet set;
  set.statistic_scale = sigma;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) set.rejected.push_back(i);
  set.threshold_index = static_cast<Eigen::Index>(set.rejected.size());
  return set;
}

}  // namespace slope
