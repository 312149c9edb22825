#include "slope/lambda_gen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slope/normal.hpp"
#include "slope/rng.hpp"
#include "slope/standardize.hpp"

namespace slope {

namespace {

void require_level(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
}

Eigen::VectorXd bh_values(Eigen::Index p, double q) {
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 1; i <= p; ++i) {
    double arg = 1.0 - static_cast<double>(i) * q / (2.0 * static_cast<double>(p));
    v[i - 1] = arg > 0.5 ? inv_norm_cdf(arg) : 0.0;
  }
  return v;
}

}  // namespace

LambdaSequence lambda_bh(Eigen::Index p, double q) {
  if (p < 1) throw std::invalid_argument("lambda_bh: p must be at least 1");
  require_level(q);
  return LambdaSequence(bh_values(p, q));
}

GaussianSequence lambda_gaussian(Eigen::Index p, Eigen::Index n, double q) {
  if (p < 1) throw std::invalid_argument("lambda_gaussian: p must be at least 1");
  if (n <= 2) throw std::invalid_argument("lambda_gaussian: n must exceed 2");
  require_level(q);

  const Eigen::Index limit = std::min(p, n - 1);  // w(i-1) = 1/(n-i) needs i < n
  Eigen::VectorXd bh = bh_values(p, q);
  Eigen::VectorXd raw(limit);
  raw[0] = bh[0];
  double sumsq = raw[0] * raw[0];
  for (Eigen::Index i = 2; i <= limit; ++i) {
    double w = 1.0 / static_cast<double>(n - i);
    raw[i - 1] = bh[i - 1] * std::sqrt(1.0 + w * sumsq);
    sumsq += raw[i - 1] * raw[i - 1];
  }

  Eigen::Index k_star = 1;
  for (Eigen::Index i = 2; i <= limit; ++i)
    if (raw[i - 1] < raw[k_star - 1]) k_star = i;

  if (limit < p && k_star == limit)
    throw std::runtime_error("lambda_gaussian: w undefined at index " + std::to_string(limit + 1) +
                             " before the sequence reached its minimum");

  Eigen::VectorXd seq(p);
  for (Eigen::Index i = 0; i < p; ++i) seq[i] = i < k_star ? raw[i] : raw[k_star - 1];
  return GaussianSequence{std::move(raw), k_star, LambdaSequence(std::move(seq))};
}

std::vector<Eigen::Index> default_mc_grid(Eigen::Index p, Eigen::Index n, int points) {
  Eigen::Index hi = std::max<Eigen::Index>(1, std::min(p, n / 2));
  std::vector<Eigen::Index> grid;
  grid.reserve(points);
  for (int t = 0; t < points; ++t) {
    double frac = points == 1 ? 0.0 : static_cast<double>(t) / (points - 1);
    auto idx = static_cast<Eigen::Index>(std::llround(std::exp(frac * std::log(double(hi)))));
    idx = std::clamp<Eigen::Index>(idx, 1, hi);
    if (grid.empty() || idx > grid.back()) grid.push_back(idx);
  }
  return grid;
}

MonteCarloSequence lambda_monte_carlo(const Eigen::MatrixXd& X, double q, int draws,
                                      std::vector<Eigen::Index> grid, std::uint64_t seed) {
  require_level(q);
  if (draws < 1) throw std::invalid_argument("lambda_monte_carlo: draws must be at least 1");
  const Eigen::Index p = X.cols();
  if (p < 1 || X.rows() < 1) throw std::invalid_argument("lambda_monte_carlo: empty design");
  if (!X.allFinite()) throw std::invalid_argument("lambda_monte_carlo: design has NaN/Inf");
  if (grid.empty() || grid.front() != 1)
    throw std::invalid_argument("lambda_monte_carlo: grid must start at index 1");
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (grid[t] < 1 || grid[t] > p)
      throw std::invalid_argument("lambda_monte_carlo: grid index out of range");
    if (t > 0 && grid[t] <= grid[t - 1])
      throw std::invalid_argument("lambda_monte_carlo: grid must be strictly increasing");
  }

  Eigen::MatrixXd Xs = X;
  center_standardize_columns(Xs);
  const Eigen::VectorXd bh = bh_values(p, q);

  Eigen::VectorXd lam(p);
  lam[0] = bh[0];
  std::vector<MonteCarloEstimate> estimates;
  estimates.push_back({1, 0.0, draws});

  Eigen::Index truncation = grid.back();
  bool truncated = false;
  Eigen::Index prev_grid = 1;

  std::vector<Eigen::Index> pool(p);
  constexpr int kMaxRetries = 100;

  for (std::size_t t = 1; t < grid.size() && !truncated; ++t) {
    const Eigen::Index g = grid[t];
    const Eigen::Index m = g - 1;  // |S|
    const Eigen::VectorXd lam_head = lam.head(m);

    double acc = 0.0;
    for (int d = 0; d < draws; ++d) {
      CounterRng rng(seed, {0x6d63u, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(d)});
      int failures = 0;
      for (;;) {
        // partial Fisher-Yates: first m entries form S, entry m is j
        for (Eigen::Index i = 0; i < p; ++i) pool[i] = i;
        for (Eigen::Index i = 0; i <= m; ++i) {
          Eigen::Index pick = i + static_cast<Eigen::Index>(rng.uniform_index(p - i));
          std::swap(pool[i], pool[pick]);
        }
        Eigen::MatrixXd XS(Xs.rows(), m);
        for (Eigen::Index c = 0; c < m; ++c) XS.col(c) = Xs.col(pool[c]);
        const auto& xj = Xs.col(pool[m]);

        Eigen::MatrixXd G = XS.transpose() * XS;
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
          if (++failures >= kMaxRetries)
            throw std::runtime_error(
                "lambda_monte_carlo: " + std::to_string(kMaxRetries) +
                " consecutive singular draws at grid index " + std::to_string(g));
          continue;
        }
        Eigen::VectorXd u = llt.solve(lam_head);
        double v = xj.dot(XS * u);
        acc += v * v;
        break;
      }
    }
    const double correction = acc / draws;
    estimates.push_back({g, correction, draws});
    const double value = bh[g - 1] * std::sqrt(1.0 + correction);

    if (value > lam[prev_grid - 1]) {
      // first local minimum reached at the previous grid point: flatten
      truncation = prev_grid;
      truncated = true;
      for (Eigen::Index i = prev_grid; i < p; ++i) lam[i] = lam[prev_grid - 1];
      break;
    }
    lam[g - 1] = value;
    for (Eigen::Index i = prev_grid + 1; i < g; ++i) {
      double frac = static_cast<double>(i - prev_grid) / static_cast<double>(g - prev_grid);
      lam[i - 1] = (1.0 - frac) * lam[prev_grid - 1] + frac * lam[g - 1];
    }
    prev_grid = g;
  }

  if (!truncated) {
    truncation = prev_grid;
    for (Eigen::Index i = prev_grid; i < p; ++i) lam[i] = lam[prev_grid - 1];
  }

  return MonteCarloSequence{LambdaSequence(std::move(lam)), std::move(estimates), truncation};
}

MonteCarloSequence lambda_monte_carlo(const Eigen::MatrixXd& X, double q, int draws,
                                      std::uint64_t seed) {
  return lambda_monte_carlo(X, q, draws, default_mc_grid(X.cols(), X.rows()), seed);
}

LambdaSequence lambda_oscar(Eigen::Index p, double l1, double l2) {
  if (p < 1) throw std::invalid_argument("lambda_oscar: p must be at least 1");
  if (l1 < 0.0 || l2 < 0.0 || l1 + l2 <= 0.0)
    throw std::invalid_argument("lambda_oscar: need l1 >= 0, l2 >= 0 and l1 + l2 > 0");
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 1; i <= p; ++i) v[i - 1] = l1 + static_cast<double>(p - i) * l2;
  return LambdaSequence(std::move(v));
}

}  // namespace slope
