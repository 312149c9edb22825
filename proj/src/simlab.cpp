#include "slope/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "slope/inference.hpp"
#include "slope/lambda_gen.hpp"
#include "slope/rng.hpp"
#include "slope/solver.hpp"
#include "slope/sorted_l1.hpp"
#include "slope/standardize.hpp"

namespace slope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// stream labels: (seed, scenario, purpose, k, rep)
enum ScenarioId : std::uint64_t { kOrthogonal = 1, kGaussian = 2, kAnova = 3, kGwas = 4 };
enum Purpose : std::uint64_t {
  kPlacement = 1,
  kNoise = 2,
  kDesign = 3,
  kContamination = 4,
  kLabEffects = 5,
  kDominant = 6,
  kMcSeed = 7
};

CounterRng stream(const SimConfig& cfg, std::uint64_t scenario, std::uint64_t purpose,
                  Eigen::Index k, int rep) {
  return CounterRng(cfg.seed, {scenario, purpose, static_cast<std::uint64_t>(k),
                               static_cast<std::uint64_t>(rep)});
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SLOPE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(int n_items, int threads, const std::function<void(int)>& body) {
  threads = std::min(threads, n_items);
  if (threads <= 1) {
    for (int i = 0; i < n_items; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < n_items; i += threads) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<Eigen::Index> sample_support(Eigen::Index p, Eigen::Index k, CounterRng& rng) {
  std::vector<Eigen::Index> pool(p);
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index pick = i + static_cast<Eigen::Index>(rng.uniform_index(p - i));
    std::swap(pool[i], pool[pick]);
  }
  std::vector<Eigen::Index> support(pool.begin(), pool.begin() + k);
  std::sort(support.begin(), support.end());
  return support;
}

Eigen::VectorXd draw_errors(const SimConfig& cfg, Eigen::Index n, Eigen::Index k, int rep,
                            std::uint64_t scenario) {
  CounterRng rng = stream(cfg, scenario, kNoise, k, rep);
  Eigen::VectorXd z(n);
  switch (cfg.error_dist) {
    case ErrorDist::gaussian:
      for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
      break;
    case ErrorDist::laplace_unit_var:
      // scale 1/sqrt(2) makes the variance one
      for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.laplace(M_SQRT1_2);
      break;
    case ErrorDist::contaminated: {
      for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
      CounterRng crng = stream(cfg, scenario, kContamination, k, rep);
      auto m = static_cast<Eigen::Index>(std::llround(cfg.contamination_frac * double(n)));
      std::vector<Eigen::Index> where = sample_support(n, std::min(m, n), crng);
      for (Eigen::Index i : where) z[i] = cfg.contamination_scale * crng.normal();
      break;
    }
  }
  return z * cfg.sigma_known;
}

struct Counts {
  Eigen::Index R = 0, V = 0;
  double fdp = 0.0, tpp = 0.0;
};

Counts count_selection(const std::vector<Eigen::Index>& selected,
                       const std::vector<Eigen::Index>& truth, Eigen::Index k) {
  Counts c;
  c.R = static_cast<Eigen::Index>(selected.size());
  std::vector<Eigen::Index> fp;
  std::set_difference(selected.begin(), selected.end(), truth.begin(), truth.end(),
                      std::back_inserter(fp));
  c.V = static_cast<Eigen::Index>(fp.size());
  c.fdp = static_cast<double>(c.V) / std::max<Eigen::Index>(c.R, 1);
  c.tpp = static_cast<double>(c.R - c.V) / std::max<Eigen::Index>(k, 1);
  return c;
}

double mean_skipnan(const std::vector<double>& v) {
  double s = 0.0;
  int n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      s += x;
      ++n;
    }
  return n > 0 ? s / n : kNaN;
}

void append_aggregates(SimReport& report) {
  struct Key {
    std::string tag;
    Eigen::Index k;
    bool operator==(const Key& o) const { return tag == o.tag && k == o.k; }
  };
  std::vector<Key> keys;
  for (const auto& r : report.records) {
    Key key{r.scenario, r.k};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& key : keys) {
    std::vector<double> fdps, tpps, mses, sigmas;
    int n = 0, nconv = 0;
    for (const auto& r : report.records) {
      if (r.scenario != key.tag || r.k != key.k) continue;
      fdps.push_back(r.fdp);
      tpps.push_back(r.tpp);
      mses.push_back(r.rel_mse);
      sigmas.push_back(r.sigma_hat);
      ++n;
      nconv += r.converged ? 1 : 0;
    }
    SimAggregate agg;
    agg.scenario = key.tag;
    agg.k = key.k;
    agg.replicates = n;
    agg.mean_fdp = mean_skipnan(fdps);
    double var = 0.0;
    for (double f : fdps) var += (f - agg.mean_fdp) * (f - agg.mean_fdp);
    agg.se_fdp = n > 1 ? std::sqrt(var / (n - 1)) / std::sqrt(double(n)) : 0.0;
    agg.mean_tpp = mean_skipnan(tpps);
    agg.mean_rel_mse = mean_skipnan(mses);
    agg.mean_sigma_hat = mean_skipnan(sigmas);
    agg.convergence_rate = n > 0 ? static_cast<double>(nconv) / n : 1.0;
    report.aggregates.push_back(std::move(agg));
  }
}

void validate_common(const SimConfig& cfg, Scenario expected, const char* name) {
  if (cfg.scenario != expected)
    throw std::invalid_argument(std::string(name) + ": config.scenario mismatch");
  if (cfg.p < 1 || cfg.n < 1) throw std::invalid_argument("config: n and p must be >= 1");
  if (cfg.replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) throw std::invalid_argument("config: q must lie in (0, 1)");
  if (cfg.k_list.empty()) throw std::invalid_argument("config: k_list must be nonempty");
  for (Eigen::Index k : cfg.k_list)
    if (k < 0 || k > cfg.p) throw std::invalid_argument("config: k_list entry outside 0..p");
  if (!(cfg.signal_magnitude >= 0.0))
    throw std::invalid_argument("config: signal_magnitude must be >= 0");
  if (cfg.contamination_frac < 0.0 || cfg.contamination_frac > 1.0)
    throw std::invalid_argument("config: contamination_frac must lie in [0, 1]");
  if (!(cfg.sigma_known > 0.0)) throw std::invalid_argument("config: sigma must be positive");
}

LambdaSequence unit_sequence(const SimConfig& cfg, const Eigen::MatrixXd* design) {
  switch (cfg.sequence_kind) {
    case SequenceKind::bh:
      return lambda_bh(cfg.p, cfg.q);
    case SequenceKind::gaussian_star:
      return lambda_gaussian(cfg.p, cfg.n, cfg.q).sequence;
    case SequenceKind::oscar:
      return lambda_oscar(cfg.p, cfg.oscar_l1, cfg.oscar_l2);
    case SequenceKind::monte_carlo: {
      if (design == nullptr)
        throw std::invalid_argument(
            "config: the monte_carlo sequence needs a fixed design; "
            "it is available in the gwas scenario only");
      CounterRng derive(cfg.seed, {kGwas, kMcSeed});
      return lambda_monte_carlo(*design, cfg.q, cfg.mc_draws,
                                default_mc_grid(cfg.p, cfg.n, cfg.mc_grid_points),
                                derive.next_u64())
          .sequence;
    }
  }
  throw std::invalid_argument("config: unknown sequence kind");
}

SolverConfig sim_solver_config() {
  SolverConfig sc;
  sc.tolerance = 1e-6;
  sc.max_iters = 20000;
  return sc;
}

}  // namespace

Eigen::MatrixXd equicorrelated_inv_sqrt(Eigen::Index p, double sigma2, double rho) {
  if (p < 1) throw std::invalid_argument("equicorrelated_inv_sqrt: p must be >= 1");
  double tail = sigma2 - rho;
  double head = sigma2 + static_cast<double>(p - 1) * rho;
  if (!(tail > 0.0) || !(head > 0.0))
    throw std::domain_error("equicorrelated_inv_sqrt: matrix is not positive definite");
  double a = 1.0 / std::sqrt(tail);
  double b = (1.0 / std::sqrt(head) - a) / static_cast<double>(p);
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(p, p, b);
  M.diagonal().array() += a;
  return M;
}

SimReport run_orthogonal_fdr(const SimConfig& cfg) {
  validate_common(cfg, Scenario::orthogonal, "run_orthogonal_fdr");
  if (cfg.sigma_mode != SigmaMode::known)
    throw std::invalid_argument("run_orthogonal_fdr: requires sigma_mode known");

  const double sigma = cfg.sigma_known;
  const double mag = cfg.signal_magnitude * std::sqrt(2.0 * std::log(double(cfg.p)));
  const LambdaSequence lam = lambda_bh(cfg.p, cfg.q).scaled(sigma);

  SimReport report;
  const int threads = resolve_threads(cfg.threads);
  for (Eigen::Index k : cfg.k_list) {
    std::vector<SimRecord> recs(cfg.replicates);
    parallel_for(cfg.replicates, threads, [&](int rep) {
      CounterRng place = stream(cfg, kOrthogonal, kPlacement, k, rep);
      std::vector<Eigen::Index> truth = sample_support(cfg.p, k, place);
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(cfg.p);
      for (Eigen::Index i : truth) beta[i] = mag;
      Eigen::VectorXd y_tilde = beta + draw_errors(cfg, cfg.p, k, rep, kOrthogonal);

      RejectionSet sel = slope_orthogonal_select(y_tilde, sigma, cfg.q);
      Counts c = count_selection(sel.rejected, truth, k);

      SimRecord rec{"orthogonal", k, rep, c.R, c.V, c.fdp, c.tpp, kNaN, kNaN, true};
      if (k > 0) {
        Eigen::VectorXd est = prox_sorted_l1(y_tilde, lam);
        rec.rel_mse = 100.0 * (est - beta).squaredNorm() / beta.squaredNorm();
      }
      recs[rep] = std::move(rec);
    });
    for (auto& r : recs) report.records.push_back(std::move(r));
  }
  append_aggregates(report);
  return report;
}

SimReport run_gaussian_design(const SimConfig& cfg) {
  validate_common(cfg, Scenario::gaussian_design, "run_gaussian_design");
  const double sigma = cfg.sigma_known;
  const double mag = cfg.signal_magnitude * std::sqrt(2.0 * std::log(double(cfg.p)));
  const LambdaSequence lam_unit = unit_sequence(cfg, nullptr);
  const double lambda_bonf = sigma * inv_norm_cdf(1.0 - cfg.q / (2.0 * double(cfg.p)));

  SimReport report;
  const int threads = resolve_threads(cfg.threads);
  for (Eigen::Index k : cfg.k_list) {
    std::vector<std::vector<SimRecord>> recs(cfg.replicates);
    parallel_for(cfg.replicates, threads, [&](int rep) {
      CounterRng xs = stream(cfg, kGaussian, kDesign, k, rep);
      Eigen::MatrixXd X(cfg.n, cfg.p);
      const double root_n = std::sqrt(double(cfg.n));
      for (Eigen::Index j = 0; j < cfg.p; ++j)
        for (Eigen::Index i = 0; i < cfg.n; ++i) X(i, j) = xs.normal() / root_n;

      CounterRng place = stream(cfg, kGaussian, kPlacement, k, rep);
      std::vector<Eigen::Index> truth = sample_support(cfg.p, k, place);
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(cfg.p);
      for (Eigen::Index i : truth) beta[i] = mag;
      Eigen::VectorXd mu = X * beta;
      Eigen::VectorXd y = mu + draw_errors(cfg, cfg.n, k, rep, kGaussian);
      const double mu_ss = mu.squaredNorm();

      auto emit = [&](const std::string& tag, const std::vector<Eigen::Index>& support,
                      const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& response,
                      double sigma_hat, bool converged) {
        Counts c = count_selection(support, truth, k);
        SimRecord raw{tag, k, rep, c.R, c.V, c.fdp, c.tpp, kNaN, sigma_hat, converged};
        SimRecord deb = raw;
        deb.scenario = tag + "_debiased";
        if (k > 0) {
          raw.rel_mse = 100.0 * (X * beta_hat - mu).squaredNorm() / mu_ss;
          OlsFit refit = ols_refit(X, response, support);
          Eigen::VectorXd bdeb = Eigen::VectorXd::Zero(cfg.p);
          for (std::size_t c2 = 0; c2 < support.size(); ++c2)
            bdeb[support[c2]] = refit.coef[static_cast<Eigen::Index>(c2)];
          deb.rel_mse = 100.0 * (X * bdeb - mu).squaredNorm() / mu_ss;
        }
        recs[rep].push_back(std::move(raw));
        recs[rep].push_back(std::move(deb));
      };

      if (cfg.sigma_mode == SigmaMode::known) {
        SlopeProblem problem(X, y, lam_unit.scaled(sigma));
        SlopeSolution fit = solve_fista(problem, sim_solver_config());
        emit("gaussian_slope", fit.support, fit.beta, y, kNaN, fit.converged);
      } else {
        Eigen::VectorXd yc = y;
        center(yc);
        ScaledSlopeResult res = scaled_slope(X, yc, lam_unit, 100, sim_solver_config());
        emit("gaussian_slope", res.support, res.beta, yc, res.sigma_hat, res.converged);
      }

      if (cfg.compare_lasso_bonf) {
        LambdaSequence constant(Eigen::VectorXd::Constant(cfg.p, lambda_bonf));
        SlopeProblem problem(X, y, constant);
        SlopeSolution fit = solve_fista(problem, sim_solver_config());
        emit("gaussian_lasso_bonf", fit.support, fit.beta, y, kNaN, fit.converged);
      }
    });
    for (auto& bundle : recs)
      for (auto& r : bundle) report.records.push_back(std::move(r));
  }
  append_aggregates(report);
  return report;
}

SimReport run_anova_testing(const AnovaConfig& acfg, double q, int replicates, std::uint64_t seed,
                            int threads) {
  if (acfg.p < 2) throw std::invalid_argument("anova: p must be >= 2");
  if (acfg.labs < 2) throw std::invalid_argument("anova: labs must be >= 2");
  if (acfg.sigma_tau2 < 0.0 || acfg.sigma_z2 <= 0.0)
    throw std::invalid_argument("anova: variance components must be nonnegative (sigma_z2 > 0)");
  if (acfg.k < 0 || acfg.k > acfg.p) throw std::invalid_argument("anova: k outside 0..p");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("anova: q must lie in (0, 1)");
  if (replicates < 1) throw std::invalid_argument("anova: replicates must be >= 1");

  const Eigen::Index p = acfg.p;
  const int labs = acfg.labs;
  const double sigma2 = (acfg.sigma_tau2 + acfg.sigma_z2) / labs;
  const double rho = acfg.sigma_tau2 / labs;

  // nonzero means sqrt(2 log p)/c with c the column norm of the true whitener
  const Eigen::MatrixXd W_true = equicorrelated_inv_sqrt(p, sigma2, rho);
  const double col_norm = W_true.col(0).norm();
  const double mag = std::sqrt(2.0 * std::log(double(p))) / col_norm;

  const LambdaSequence lam = lambda_bh(p, q);

  SimConfig keycfg;  // only used to derive streams
  keycfg.seed = seed;

  SimReport report;
  std::vector<std::vector<SimRecord>> recs(replicates);
  parallel_for(replicates, resolve_threads(threads), [&](int rep) {
    CounterRng place = stream(keycfg, kAnova, kPlacement, acfg.k, rep);
    std::vector<Eigen::Index> truth = sample_support(p, acfg.k, place);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i : truth) mu[i] = mag;

    CounterRng lab_rng = stream(keycfg, kAnova, kLabEffects, acfg.k, rep);
    CounterRng z_rng = stream(keycfg, kAnova, kNoise, acfg.k, rep);
    Eigen::VectorXd tau(labs);
    for (int j = 0; j < labs; ++j) tau[j] = std::sqrt(acfg.sigma_tau2) * lab_rng.normal();
    Eigen::MatrixXd Y(p, labs);
    for (int j = 0; j < labs; ++j)
      for (Eigen::Index i = 0; i < p; ++i)
        Y(i, j) = mu[i] + tau[j] + std::sqrt(acfg.sigma_z2) * z_rng.normal();

    Eigen::VectorXd ybar = Y.rowwise().mean();

    double sii = sigma2, rij = rho;
    if (acfg.variance_mode == VarianceMode::estimated) {
      // unweighted means: equate ANOVA mean squares to their expectations
      Eigen::VectorXd col_means = Y.colwise().mean().transpose();
      double grand = Y.mean();
      double ss_tau = 0.0;
      for (int j = 0; j < labs; ++j) ss_tau += (col_means[j] - grand) * (col_means[j] - grand);
      ss_tau *= double(p);
      double ms_tau = ss_tau / (labs - 1);
      double sse = 0.0;
      for (int j = 0; j < labs; ++j)
        for (Eigen::Index i = 0; i < p; ++i) {
          double rterm = Y(i, j) - ybar[i] - col_means[j] + grand;
          sse += rterm * rterm;
        }
      double mse = sse / (double(p - 1) * (labs - 1));
      double tau2_hat = std::max((ms_tau - mse) / double(p), 0.0);
      sii = (tau2_hat + mse) / labs;
      rij = tau2_hat / labs;
    }
    const double sigma_marginal = std::sqrt(sii);

    RejectionSet bh = bh_step_up(ybar, sigma_marginal, q);
    Counts cb = count_selection(bh.rejected, truth, acfg.k);
    recs[rep].push_back(
        {"anova_bh", acfg.k, rep, cb.R, cb.V, cb.fdp, cb.tpp, kNaN, sigma_marginal, true});

    Eigen::MatrixXd X = equicorrelated_inv_sqrt(p, sii, rij);
    Eigen::VectorXd y_tilde = X * ybar;
    center(y_tilde);
    center_standardize_columns(X);
    SlopeProblem problem(std::move(X), std::move(y_tilde), lam);
    SlopeSolution fit = solve_fista(problem, sim_solver_config());
    Counts cs = count_selection(fit.support, truth, acfg.k);
    recs[rep].push_back({"anova_slope", acfg.k, rep, cs.R, cs.V, cs.fdp, cs.tpp, kNaN,
                         sigma_marginal, fit.converged});
  });
  for (auto& bundle : recs)
    for (auto& r : bundle) report.records.push_back(std::move(r));
  append_aggregates(report);
  return report;
}

SimReport run_gwas_sim(const SimConfig& cfg) {
  validate_common(cfg, Scenario::gwas, "run_gwas_sim");
  const Eigen::Index n = cfg.n, p = cfg.p;
  const double mag = cfg.signal_magnitude * std::sqrt(2.0 * std::log(double(p)));

  // One genotype design per run: MAF ~ U(0.1, 0.5), Hardy-Weinberg classes
  // aa/aA/AA coded -1/0/1. Dominant coding: -1 for homozygous, 1 for
  // heterozygous. Monomorphic columns are redrawn.
  Eigen::MatrixXd G(n, p), Z(n, p);
  {
    CounterRng rng(cfg.seed, {kGwas, kDesign});
    for (Eigen::Index j = 0; j < p; ++j) {
      for (int attempt = 0;; ++attempt) {
        if (attempt >= 100)
          throw std::runtime_error("run_gwas_sim: failed to draw a polymorphic column");
        double f = 0.1 + 0.4 * rng.uniform();
        double p_aa = f * f, p_het = 2.0 * f * (1.0 - f);
        bool seen_distinct = false;
        double first = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          double u = rng.uniform();
          double g = u < p_aa ? -1.0 : (u < p_aa + p_het ? 0.0 : 1.0);
          G(i, j) = g;
          Z(i, j) = g == 0.0 ? 1.0 : -1.0;
          if (i == 0)
            first = g;
          else if (g != first)
            seen_distinct = true;
        }
        if (seen_distinct) break;
      }
    }
  }
  Eigen::MatrixXd X = G;
  center_standardize_columns(X);
  if (cfg.dominant_effects) center_standardize_columns(Z);

  const LambdaSequence lam_unit = unit_sequence(cfg, &X);
  const double dom_sd = 2.0 * std::sqrt(2.0 * std::log(double(p)));

  SimReport report;
  const int threads = resolve_threads(cfg.threads);
  for (Eigen::Index k : cfg.k_list) {
    std::vector<std::vector<SimRecord>> recs(cfg.replicates);
    parallel_for(cfg.replicates, threads, [&](int rep) {
      CounterRng place = stream(cfg, kGwas, kPlacement, k, rep);
      std::vector<Eigen::Index> truth = sample_support(p, k, place);
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
      for (Eigen::Index i : truth) beta[i] = mag;

      Eigen::VectorXd mu = X * beta;
      Eigen::VectorXd y = mu;
      if (cfg.dominant_effects) {
        CounterRng drng = stream(cfg, kGwas, kDominant, k, rep);
        Eigen::VectorXd beta_dom = Eigen::VectorXd::Zero(p);
        for (Eigen::Index i : truth) beta_dom[i] = dom_sd * drng.normal();
        y += Z * beta_dom;
      }
      y += draw_errors(cfg, n, k, rep, kGwas);
      center(y);
      const double mu_ss = mu.squaredNorm();

      // scaled SLOPE (or a plain fit when sigma is declared known)
      std::vector<Eigen::Index> support;
      Eigen::VectorXd beta_hat, beta_deb;
      double sigma_hat = kNaN;
      bool converged = true;
      if (cfg.sigma_mode == SigmaMode::scaled) {
        ScaledSlopeResult res = scaled_slope(X, y, lam_unit, 100, sim_solver_config());
        support = res.support;
        beta_hat = res.beta;
        beta_deb = res.beta_debiased;
        sigma_hat = res.sigma_hat;
        converged = res.converged;
      } else {
        SlopeProblem problem(X, y, lam_unit.scaled(cfg.sigma_known));
        SlopeSolution fit = solve_fista(problem, sim_solver_config());
        support = fit.support;
        beta_hat = fit.beta;
        converged = fit.converged;
        OlsFit refit = ols_refit(X, y, support);
        beta_deb = Eigen::VectorXd::Zero(p);
        for (std::size_t c = 0; c < support.size(); ++c)
          beta_deb[support[c]] = refit.coef[static_cast<Eigen::Index>(c)];
      }
      Counts cs = count_selection(support, truth, k);
      SimRecord raw{"gwas_slope", k, rep, cs.R, cs.V, cs.fdp, cs.tpp, kNaN, sigma_hat, converged};
      SimRecord deb = raw;
      deb.scenario = "gwas_slope_debiased";
      if (k > 0) {
        raw.rel_mse = 100.0 * (X * beta_hat - mu).squaredNorm() / mu_ss;
        deb.rel_mse = 100.0 * (X * beta_deb - mu).squaredNorm() / mu_ss;
      }
      recs[rep].push_back(std::move(raw));
      recs[rep].push_back(std::move(deb));

      // marginal single-SNP t statistics with BH correction
      Eigen::VectorXd t_stats(p);
      const double y_ss = y.squaredNorm();
      for (Eigen::Index j = 0; j < p; ++j) {
        double bj = X.col(j).dot(y);  // unit-norm columns
        double rss_j = std::max(y_ss - bj * bj, 0.0);
        double se = std::sqrt(rss_j / double(n - 2));
        t_stats[j] = se > 0.0 ? bj / se : std::copysign(1e300, bj);
      }
      RejectionSet bh = bh_step_up(t_stats, 1.0, cfg.q);
      Counts cb = count_selection(bh.rejected, truth, k);
      recs[rep].push_back({"gwas_bh", k, rep, cb.R, cb.V, cb.fdp, cb.tpp, kNaN, kNaN, true});
    });
    for (auto& bundle : recs)
      for (auto& r : bundle) report.records.push_back(std::move(r));
  }
  append_aggregates(report);
  return report;
}

}  // namespace slope
