#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace slope {

enum class Scenario { orthogonal, gaussian_design, anova, gwas };
enum class SequenceKind { bh, gaussian_star, monte_carlo, oscar };
enum class SigmaMode { known, scaled };
enum class ErrorDist { gaussian, laplace_unit_var, contaminated };
enum class VarianceMode { known, estimated };

/// Experiment description. All randomness derives from (seed, scenario,
/// k, replicate, purpose) counter streams, so a config reruns bit-identically
/// regardless of thread count.
struct SimConfig {
  Scenario scenario = Scenario::orthogonal;
  Eigen::Index n = 1000;
  Eigen::Index p = 1000;
  std::vector<Eigen::Index> k_list = {0};
  double signal_magnitude = 5.0;  ///< in multiples of sqrt(2 log p)
  double q = 0.1;
  int replicates = 200;
  std::uint64_t seed = 1;
  SequenceKind sequence_kind = SequenceKind::bh;
  SigmaMode sigma_mode = SigmaMode::known;
  double sigma_known = 1.0;
  ErrorDist error_dist = ErrorDist::gaussian;
  double contamination_frac = 0.01;
  double contamination_scale = 5.0;
  bool dominant_effects = false;   ///< gwas: add unmodeled dominant effects
  bool compare_lasso_bonf = false; ///< gaussian: also run Lasso at lambda_Bonf
  double oscar_l1 = 1.0;
  double oscar_l2 = 0.0;
  int mc_draws = 5000;
  int mc_grid_points = 40;
  int threads = 0;  ///< 0: SLOPE_THREADS env var, else hardware concurrency
};

/// One (method, k, replicate) outcome. rel_mse and sigma_hat are NaN where
/// not applicable.
struct SimRecord {
  std::string scenario;
  Eigen::Index k = 0;
  int rep = 0;
  Eigen::Index R = 0;
  Eigen::Index V = 0;
  double fdp = 0.0;
  double tpp = 0.0;
  double rel_mse = 0.0;
  double sigma_hat = 0.0;
  bool converged = true;
};

struct SimAggregate {
  std::string scenario;
  Eigen::Index k = 0;
  int replicates = 0;
  double mean_fdp = 0.0;
  double se_fdp = 0.0;  ///< sd(FDP)/sqrt(replicates); plotted bars are +-2 SE
  double mean_tpp = 0.0;
  double mean_rel_mse = 0.0;
  double mean_sigma_hat = 0.0;
  double convergence_rate = 1.0;
};

struct SimReport {
  std::vector<SimRecord> records;
  std::vector<SimAggregate> aggregates;
};

/// Orthogonal-design FDR experiment: y_tilde ~ N(beta, sigma^2 I),
/// selection by one sorted-l1 prox at sigma * lambda_BH.
SimReport run_orthogonal_fdr(const SimConfig& config);

/// Gaussian-design experiment: fresh X with N(0, 1/n) entries per
/// replicate, SLOPE fit with the configured sequence, and optionally Lasso
/// at lambda_Bonf for comparison; raw and OLS-debiased relative MSE.
SimReport run_gaussian_design(const SimConfig& config);

struct AnovaConfig {
  Eigen::Index p = 1000;
  int labs = 5;
  double sigma_tau2 = 2.5;
  double sigma_z2 = 2.5;
  Eigen::Index k = 0;
  VarianceMode variance_mode = VarianceMode::known;
};

/// Multiple testing with equicorrelated statistics: BH on the lab averages
/// versus SLOPE on the whitened regression, with variance components known
/// or estimated by the unweighted-means method (negative tau-component
/// estimates clamp to zero).
SimReport run_anova_testing(const AnovaConfig& config, double q, int replicates,
                            std::uint64_t seed, int threads = 0);

/// Idealized GWAS: one genotype design per run (Hardy-Weinberg draws at
/// MAF ~ U(0.1, 0.5), centered and standardized), scaled SLOPE with the
/// configured sequence against BH on marginal t statistics, with optional
/// error-distribution and dominant-effect misspecification hooks.
SimReport run_gwas_sim(const SimConfig& config);

/// Closed-form inverse square root of sigma2*I + rho*(J - I), using its
/// two-eigenvalue structure: a*I + b*J with a = (sigma2 - rho)^{-1/2} and
/// b = ((sigma2 + (p-1) rho)^{-1/2} - a)/p. Throws std::domain_error when
/// the matrix is not positive definite.
Eigen::MatrixXd equicorrelated_inv_sqrt(Eigen::Index p, double sigma2, double rho);

}  // namespace slope
