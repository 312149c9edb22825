// Test-only reference implementations, kept independent of the library's
// algorithm paths: a series/continued-fraction normal CDF, a bisection
// quantile, exact face-enumeration solvers for the sorted-l1 prox QP and
// isotonic regression, and the step-down multiple-testing comparator.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

// Normal CDF from the Taylor series of the central region and a continued
// fraction for the tails, evaluated in long double. Does not use erf/erfc.
inline double norm_cdf(double x) {
  const long double xl = x;
  const long double ax = std::fabs(xl);
  const long double phi = std::exp(-0.5L * xl * xl) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
  if (ax < 7.0L) {
    // 0.5 + phi(x) * (x + x^3/3 + x^5/(3*5) + ...)
    long double term = xl, sum = xl;
    for (int k = 1; k < 300; ++k) {
      term *= xl * xl / (2.0L * k + 1.0L);
      sum += term;
      if (std::fabs(term) < 1e-25L * std::fabs(sum)) break;
    }
    return static_cast<double>(0.5L + phi * sum);
  }
  // Mills-ratio continued fraction Q(ax) = phi / (ax + 1/(ax + 2/(ax + ...)))
  long double cf = 0.0L;
  for (int k = 60; k >= 1; --k) cf = static_cast<long double>(k) / (ax + cf);
  long double q = phi / (ax + cf);
  return static_cast<double>(x > 0 ? 1.0L - q : q);
}

inline double inv_norm_cdf(double alpha) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (norm_cdf(mid) < alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Euclidean projection of z onto {x : x_1 >= ... >= x_p (>= 0)} by
// enumerating the faces of the cone: every tie pattern of adjacent
// coordinates, and optionally the last block pinned to zero. The projection
// onto the affine hull of the optimal face equals the true projection, so
// the feasible candidate at minimal distance is exact.
inline Eigen::VectorXd project_monotone(const Eigen::VectorXd& z, bool nonneg) {
  const int p = static_cast<int>(z.size());
  Eigen::VectorXd best = z;
  double best_dist = std::numeric_limits<double>::infinity();
  const std::uint64_t masks = p >= 2 ? (1ULL << (p - 1)) : 1;

  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    // mask bit i set: boundary between i and i+1 (block break)
    std::vector<std::pair<int, int>> blocks;
    int start = 0;
    for (int i = 0; i + 1 < p; ++i)
      if (mask & (1ULL << i)) {
        blocks.emplace_back(start, i);
        start = i + 1;
      }
    blocks.emplace_back(start, p - 1);

    for (int zero_last = 0; zero_last <= (nonneg ? 1 : 0); ++zero_last) {
      Eigen::VectorXd cand(p);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        auto [lo, hi] = blocks[b];
        double value = 0.0;
        if (!(zero_last && b + 1 == blocks.size())) {
          for (int i = lo; i <= hi; ++i) value += z[i];
          value /= (hi - lo + 1);
        }
        for (int i = lo; i <= hi; ++i) cand[i] = value;
      }
      bool feasible = true;
      for (int i = 0; i + 1 < p && feasible; ++i) feasible = cand[i] >= cand[i + 1] - 1e-12;
      if (nonneg && cand[p - 1] < -1e-12) feasible = false;
      if (!feasible) continue;
      double dist = (z - cand).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = cand;
      }
    }
  }
  return best;
}

// Exact solution of the sorted-l1 prox by normalization plus the
// face-enumeration QP on the sorted magnitudes. Practical for p <= 12.
inline Eigen::VectorXd prox_sorted_l1(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda) {
  const int p = static_cast<int>(y.size());
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(y[a]) > std::abs(y[b]); });
  Eigen::VectorXd z(p);
  for (int r = 0; r < p; ++r) z[r] = std::abs(y[order[r]]) - lambda[r];
  Eigen::VectorXd solved = project_monotone(z, true);
  Eigen::VectorXd x(p);
  for (int r = 0; r < p; ++r) {
    int i = order[r];
    x[i] = y[i] > 0 ? solved[r] : (y[i] < 0 ? -solved[r] : 0.0);
  }
  return x;
}

inline Eigen::VectorXd isotonic(const Eigen::VectorXd& y) { return project_monotone(y, false); }

// Step-down comparator: rejects H_(1..i-1) where i is the first sorted index
// with |stat|_(i)/sigma < Phi^-1(1 - i q / 2p).
inline std::vector<Eigen::Index> step_down_select(const Eigen::VectorXd& stats, double sigma,
                                                  double q) {
  const Eigen::Index p = stats.size();
  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(stats[a]) > std::abs(stats[b]); });
  Eigen::Index count = p;
  for (Eigen::Index i = 1; i <= p; ++i) {
    double crit = inv_norm_cdf(1.0 - static_cast<double>(i) * q / (2.0 * static_cast<double>(p)));
    if (std::abs(stats[order[i - 1]]) / sigma < crit) {
      count = i - 1;
      break;
    }
  }
  std::vector<Eigen::Index> rejected(order.begin(), order.begin() + count);
  std::sort(rejected.begin(), rejected.end());
  return rejected;
}

}  // namespace oracle
