#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "slope/lambda_sequence.hpp"

namespace slope {

/// Benjamini-Hochberg critical values as SLOPE weights:
/// lambda_BH(i) = Phi^{-1}(1 - i q / 2p), clamped at zero should the
/// argument ever reach 1/2 (it cannot for q < 1, but the clamp keeps the
/// sequence valid at the boundary).
LambdaSequence lambda_bh(Eigen::Index p, double q);

struct GaussianSequence {
  Eigen::VectorXd raw;      ///< recursive values where defined, length min(p, n-1)
  Eigen::Index k_star;      ///< 1-based location of the global minimum of raw
  LambdaSequence sequence;  ///< length p, held flat at raw(k_star) past k_star
};

/// Gaussian-design corrected sequence
///   lambda_G(i) = lambda_BH(i) * sqrt(1 + w(i-1) * sum_{j<i} lambda_G(j)^2),
///   w(k) = 1/(n - k - 1),
/// truncated flat after its global minimum k_star. Throws if the recursion
/// runs out of admissible indices (n - i <= 0) before a minimum is found.
GaussianSequence lambda_gaussian(Eigen::Index p, Eigen::Index n, double q);

struct MonteCarloEstimate {
  Eigen::Index index;  ///< 1-based sequence index i the estimate is for
  double correction;   ///< mean of (X_j' X_S (X_S' X_S)^{-1} lambda_{1:i-1})^2
  int draws;
};

struct MonteCarloSequence {
  LambdaSequence sequence;
  std::vector<MonteCarloEstimate> estimates;  ///< one per evaluated grid point
  Eigen::Index truncation_index;              ///< 1-based; sequence is flat from here on
};

/// Monte Carlo analogue of lambda_G for an arbitrary design: the correction
/// term is estimated at the given grid indices from random draws of (S, j)
/// with |S| = i - 1, j not in S, interpolating linearly in between and
/// flattening at the first local minimum across grid points. X is
/// standardized internally (centered, unit-norm columns). The grid must be
/// sorted, start at 1 and stay within 1..p.
MonteCarloSequence lambda_monte_carlo(const Eigen::MatrixXd& X, double q, int draws,
                                      std::vector<Eigen::Index> grid, std::uint64_t seed);

/// Convenience overload using default_mc_grid.
MonteCarloSequence lambda_monte_carlo(const Eigen::MatrixXd& X, double q, int draws,
                                      std::uint64_t seed);

/// Logarithmically spaced grid of `points` indices from 1 to min(p, n/2).
std::vector<Eigen::Index> default_mc_grid(Eigen::Index p, Eigen::Index n, int points = 40);

/// OSCAR weights alpha_i = l1 + (p - i) * l2, i = 1..p.
LambdaSequence lambda_oscar(Eigen::Index p, double l1, double l2);

}  // namespace slope
