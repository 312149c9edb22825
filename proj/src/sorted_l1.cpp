#include "slope/sorted_l1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace slope {

namespace {

void require_same_length(Eigen::Index ny, Eigen::Index nl, const char* who) {
  if (ny != nl)
    throw std::invalid_argument(std::string(who) + ": vector has length " + std::to_string(ny) +
                                " but lambda has length " + std::to_string(nl));
}

void require_finite(const Eigen::VectorXd& v, const char* who) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(who) + ": input has NaN/Inf entries");
}

}  // namespace

double sorted_l1_norm(const Eigen::VectorXd& b, const LambdaSequence& lambda) {
  require_same_length(b.size(), lambda.size(), "sorted_l1_norm");
  require_finite(b, "sorted_l1_norm");
  Eigen::VectorXd a = b.cwiseAbs();
  std::sort(a.data(), a.data() + a.size(), std::greater<double>());
  return a.dot(lambda.values());
}

// Stack pass of the fast prox on sorted nonnegative data. Maintains blocks
// (lo, hi, sum, avg) with sum the unclamped running total of y - scale*lambda
// and avg = (sum/len)+; merging while the previous block's average does not
// exceed the new one leaves the stack with strictly decreasing averages.
void prox_core_sorted(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda, double scale,
                      ProxWorkspace& ws, Eigen::VectorXd& out) {
  const Eigen::Index p = y.size();
  auto& stack = ws.stack_;
  stack.clear();
  if (stack.capacity() < static_cast<std::size_t>(p)) stack.reserve(p);
  ws.merge_count_ = 0;

  for (Eigen::Index k = 0; k < p; ++k) {
    double s = y[k] - scale * lambda[k];
    ProxWorkspace::Block blk{k, k, s, s > 0.0 ? s : 0.0};
    while (!stack.empty() && stack.back().avg <= blk.avg) {
      const auto& prev = stack.back();
      blk.lo = prev.lo;
      blk.sum += prev.sum;
      double mean = blk.sum / static_cast<double>(blk.hi - blk.lo + 1);
      blk.avg = mean > 0.0 ? mean : 0.0;
      stack.pop_back();
      ++ws.merge_count_;
    }
    stack.push_back(blk);
  }

  out.resize(p);
  for (const auto& blk : stack)
    for (Eigen::Index k = blk.lo; k <= blk.hi; ++k) out[k] = blk.avg;
}

void prox_sorted_l1_scaled(const Eigen::VectorXd& y, const Eigen::VectorXd& lambda, double scale,
                           ProxWorkspace& ws, Eigen::VectorXd& out) {
  const Eigen::Index p = y.size();
  auto& order = ws.order_;
  order.resize(p);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto& abs_sorted = ws.sorted_abs_;
  abs_sorted.resize(p);
  // Stable sort by |y| descending keeps ties in input order, so the output
  // is deterministic.
  std::stable_sort(order.begin(), order.end(), [&y](Eigen::Index a, Eigen::Index b) {
    return std::abs(y[a]) > std::abs(y[b]);
  });
  for (Eigen::Index r = 0; r < p; ++r) abs_sorted[r] = std::abs(y[order[r]]);

  Eigen::VectorXd solved;
  prox_core_sorted(abs_sorted, lambda, scale, ws, solved);

  out.resize(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    const Eigen::Index i = order[r];
    out[i] = y[i] > 0.0 ? solved[r] : (y[i] < 0.0 ? -solved[r] : 0.0);
  }
}

Eigen::VectorXd prox_sorted_l1(const Eigen::VectorXd& y, const LambdaSequence& lambda) {
  ProxWorkspace ws;
  Eigen::VectorXd out;
  prox_sorted_l1(y, lambda, ws, out);
  return out;
}

void prox_sorted_l1(const Eigen::VectorXd& y, const LambdaSequence& lambda, ProxWorkspace& ws,
                    Eigen::VectorXd& out) {
  require_same_length(y.size(), lambda.size(), "prox_sorted_l1");
  require_finite(y, "prox_sorted_l1");
  prox_sorted_l1_scaled(y, lambda.values(), 1.0, ws, out);
}

Eigen::VectorXd prox_sorted_l1_sorted_nonneg(const Eigen::VectorXd& y,
                                             const LambdaSequence& lambda, bool verify_input) {
  require_same_length(y.size(), lambda.size(), "prox_sorted_l1_sorted_nonneg");
  if (verify_input) {
    require_finite(y, "prox_sorted_l1_sorted_nonneg");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] < 0.0 || (i > 0 && y[i] > y[i - 1]))
        throw std::invalid_argument(
            "prox_sorted_l1_sorted_nonneg: input not nonincreasing nonnegative at index " +
            std::to_string(i + 1));
    }
  }
  ProxWorkspace ws;
  Eigen::VectorXd out;
  prox_core_sorted(y, lambda.values(), 1.0, ws, out);
  return out;
}

Eigen::VectorXd isotonic_regression(const Eigen::VectorXd& y) {
  require_finite(y, "isotonic_regression");
  const Eigen::Index p = y.size();
  struct Block {
    Eigen::Index lo, hi;
    double sum, mean;
  };
  std::vector<Block> stack;
  stack.reserve(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    Block blk{k, k, y[k], y[k]};
    while (!stack.empty() && stack.back().mean <= blk.mean) {
      const auto& prev = stack.back();
      blk.lo = prev.lo;
      blk.sum += prev.sum;
      blk.mean = blk.sum / static_cast<double>(blk.hi - blk.lo + 1);
      stack.pop_back();
    }
    stack.push_back(blk);
  }
  Eigen::VectorXd out(p);
  for (const auto& blk : stack)
    for (Eigen::Index k = blk.lo; k <= blk.hi; ++k) out[k] = blk.mean;
  return out;
}

}  // namespace slope
