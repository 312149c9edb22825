// Command-line front end: solve, scaled solve, prox, lambda generation and
// simulation subcommands over CSV/JSON files. Exit codes: 0 ok, 1 input
// error, 2 nonconvergence.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slope/csv.hpp"
#include "slope/inference.hpp"
#include "slope/lambda_gen.hpp"
#include "slope/normal.hpp"
#include "slope/simlab.hpp"
#include "slope/solver.hpp"
#include "slope/sorted_l1.hpp"
#include "slope/standardize.hpp"

namespace {

using json = nlohmann::json;
using namespace slope;

constexpr const char* kVersion = "0.1.0";

int run_args(const std::vector<std::string>& args);  // forward, used by rerun

json make_manifest(const std::string& subcommand, const std::vector<std::string>& args,
                   std::uint64_t seed, const std::vector<std::string>& outputs,
                   double wall_seconds) {
  json m;
  m["artifact_version"] = kVersion;
  m["subcommand"] = subcommand;
  m["argv"] = args;
  m["seed"] = seed;
  m["outputs"] = outputs;
  m["wall_clock_seconds"] = wall_seconds;
  return m;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError(path + ": write failed");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return j;
}

// --- config field access with error messages naming the field path ---

template <typename T>
T field_as(const json& j, const std::string& path);

template <>
double field_as<double>(const json& j, const std::string& path) {
  if (!j.is_number()) throw IoError("config." + path + ": expected a number");
  return j.get<double>();
}
template <>
std::int64_t field_as<std::int64_t>(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw IoError("config." + path + ": expected an integer");
  return j.get<std::int64_t>();
}
template <>
bool field_as<bool>(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw IoError("config." + path + ": expected a boolean");
  return j.get<bool>();
}
template <>
std::string field_as<std::string>(const json& j, const std::string& path) {
  if (!j.is_string()) throw IoError("config." + path + ": expected a string");
  return j.get<std::string>();
}

template <typename T>
T require_field(const json& cfg, const std::string& name) {
  if (!cfg.contains(name)) throw IoError("config: missing required field '" + name + "'");
  return field_as<T>(cfg.at(name), name);
}

template <typename T>
T optional_field(const json& cfg, const std::string& name, T fallback) {
  if (!cfg.contains(name)) return fallback;
  return field_as<T>(cfg.at(name), name);
}

SequenceKind parse_sequence_kind(const std::string& s) {
  if (s == "bh") return SequenceKind::bh;
  if (s == "gstar") return SequenceKind::gaussian_star;
  if (s == "mc") return SequenceKind::monte_carlo;
  if (s == "oscar") return SequenceKind::oscar;
  throw IoError("config.sequence_kind: unknown value '" + s + "' (bh|gstar|mc|oscar)");
}

ErrorDist parse_error_dist(const std::string& s) {
  if (s == "gaussian") return ErrorDist::gaussian;
  if (s == "laplace") return ErrorDist::laplace_unit_var;
  if (s == "contaminated") return ErrorDist::contaminated;
  throw IoError("config.error_dist: unknown value '" + s + "' (gaussian|laplace|contaminated)");
}

SimConfig parse_sim_config(const json& cfg, Scenario scenario) {
  SimConfig c;
  c.scenario = scenario;
  c.p = require_field<std::int64_t>(cfg, "p");
  c.n = scenario == Scenario::orthogonal ? optional_field<std::int64_t>(cfg, "n", c.p)
                                         : require_field<std::int64_t>(cfg, "n");
  c.q = require_field<double>(cfg, "q");
  c.replicates = static_cast<int>(require_field<std::int64_t>(cfg, "replicates"));
  c.seed = static_cast<std::uint64_t>(require_field<std::int64_t>(cfg, "seed"));

  if (!cfg.contains("k_list")) throw IoError("config: missing required field 'k_list'");
  if (!cfg.at("k_list").is_array()) throw IoError("config.k_list: expected an array");
  c.k_list.clear();
  for (std::size_t i = 0; i < cfg.at("k_list").size(); ++i)
    c.k_list.push_back(
        field_as<std::int64_t>(cfg.at("k_list")[i], "k_list[" + std::to_string(i) + "]"));

  c.signal_magnitude = optional_field<double>(cfg, "signal_magnitude", 5.0);
  c.sequence_kind = parse_sequence_kind(optional_field<std::string>(cfg, "sequence_kind", "bh"));
  std::string sm = optional_field<std::string>(cfg, "sigma_mode", "known");
  if (sm == "known")
    c.sigma_mode = SigmaMode::known;
  else if (sm == "scaled")
    c.sigma_mode = SigmaMode::scaled;
  else
    throw IoError("config.sigma_mode: unknown value '" + sm + "' (known|scaled)");
  c.sigma_known = optional_field<double>(cfg, "sigma", 1.0);
  c.error_dist = parse_error_dist(optional_field<std::string>(cfg, "error_dist", "gaussian"));
  c.contamination_frac = optional_field<double>(cfg, "contamination_frac", 0.01);
  c.contamination_scale = optional_field<double>(cfg, "contamination_scale", 5.0);
  c.dominant_effects = optional_field<bool>(cfg, "dominant_effects", false);
  c.compare_lasso_bonf = optional_field<bool>(cfg, "compare_lasso_bonf", false);
  c.oscar_l1 = optional_field<double>(cfg, "oscar_l1", 1.0);
  c.oscar_l2 = optional_field<double>(cfg, "oscar_l2", 0.0);
  c.mc_draws = static_cast<int>(optional_field<std::int64_t>(cfg, "mc_draws", 5000));
  c.mc_grid_points = static_cast<int>(optional_field<std::int64_t>(cfg, "mc_grid_points", 40));
  c.threads = static_cast<int>(optional_field<std::int64_t>(cfg, "threads", 0));
  return c;
}

json aggregates_json(const SimReport& report) {
  json arr = json::array();
  for (const auto& a : report.aggregates) {
    json row;
    row["scenario"] = a.scenario;
    row["k"] = a.k;
    row["replicates"] = a.replicates;
    row["mean_fdp"] = a.mean_fdp;
    row["se_fdp"] = a.se_fdp;
    // plotting convention: bars are mean +- 2 SE
    row["fdp_bar_low"] = a.mean_fdp - 2.0 * a.se_fdp;
    row["fdp_bar_high"] = a.mean_fdp + 2.0 * a.se_fdp;
    row["mean_tpp"] = a.mean_tpp;
    row["mean_rel_mse"] = a.mean_rel_mse;
    row["mean_sigma_hat"] = a.mean_sigma_hat;
    row["convergence_rate"] = a.convergence_rate;
    arr.push_back(row);
  }
  return arr;
}

// ---------------------------------------------------------------- solve ---

struct SolveOpts {
  std::string x_path, y_path, lambda_spec, sigma = "1", out_path;
  double q = 0.1;
  double tol = 1e-7;
  int max_iters = 20000;
  std::string standardize = "on";
  std::uint64_t seed = 1;
  int draws = 5000;
  int grid_points = 40;
};

LambdaSequence build_unit_lambda(const std::string& spec, const Eigen::MatrixXd& X, double q,
                                 int draws, int grid_points, std::uint64_t seed) {
  const Eigen::Index p = X.cols();
  if (spec == "bh") return lambda_bh(p, q);
  if (spec == "gstar") return lambda_gaussian(p, X.rows(), q).sequence;
  if (spec == "mc")
    return lambda_monte_carlo(X, q, draws, default_mc_grid(p, X.rows(), grid_points), seed)
        .sequence;
  if (spec.rfind("file:", 0) == 0) {
    LambdaSequence lam = read_lambda_csv(spec.substr(5));
    if (lam.size() != p)
      throw IoError("lambda file has length " + std::to_string(lam.size()) + " but X has " +
                    std::to_string(p) + " columns");
    return lam;
  }
  if (spec.rfind("const:", 0) == 0) {
    double v = std::stod(spec.substr(6));
    return LambdaSequence(Eigen::VectorXd::Constant(p, v));
  }
  throw IoError("unknown --lambda spec '" + spec + "' (bh|gstar|mc|file:PATH|const:V)");
}

int cmd_solve(const SolveOpts& opt, const std::vector<std::string>& args) {
  auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd X = read_matrix_csv(opt.x_path);
  Eigen::VectorXd y = read_vector_csv(opt.y_path);
  if (y.size() != X.rows())
    throw IoError("row mismatch: X has " + std::to_string(X.rows()) + " rows, y has " +
                  std::to_string(y.size()));
  if (opt.standardize == "on") {
    center(y);
    center_standardize_columns(X);
  } else if (opt.standardize != "off") {
    throw IoError("--standardize must be 'on' or 'off'");
  }

  LambdaSequence lam_unit =
      build_unit_lambda(opt.lambda_spec, X, opt.q, opt.draws, opt.grid_points, opt.seed);

  SolverConfig config;
  config.tolerance = opt.tol;
  config.max_iters = opt.max_iters;

  json out;
  out["n"] = X.rows();
  out["p"] = X.cols();
  out["lambda"] = opt.lambda_spec;
  out["standardize"] = opt.standardize;
  bool converged = false;

  if (opt.sigma == "scaled") {
    ScaledSlopeResult res = scaled_slope(X, y, lam_unit, 100, config);
    SlopeProblem problem(X, y, lam_unit.scaled(res.sigma_hat));
    out["beta"] = std::vector<double>(res.beta.data(), res.beta.data() + res.beta.size());
    out["beta_debiased"] = std::vector<double>(res.beta_debiased.data(),
                                               res.beta_debiased.data() + res.beta.size());
    json sup = json::array();
    for (auto i : res.support) sup.push_back(i + 1);
    out["support"] = sup;
    out["sigma_hat"] = res.sigma_hat;
    out["iterations"] = res.iterations;
    out["converged"] = res.converged;
    out["objective"] = slope_objective(problem, res.beta);
    out["dual_gap"] = duality_gap(problem, res.beta);
    converged = res.converged;
  } else {
    double sigma = 0.0;
    try {
      sigma = std::stod(opt.sigma);
    } catch (const std::exception&) {
      throw IoError("--sigma must be a positive number or 'scaled'");
    }
    if (!(sigma > 0.0)) throw IoError("--sigma must be positive");
    SlopeProblem problem(X, y, lam_unit.scaled(sigma));
    SlopeSolution fit = solve_fista(problem, config);
    out["beta"] = std::vector<double>(fit.beta.data(), fit.beta.data() + fit.beta.size());
    json sup = json::array();
    for (auto i : fit.support) sup.push_back(i + 1);
    out["support"] = sup;
    out["objective"] = fit.objective;
    out["dual_gap"] = fit.dual_gap;
    out["iterations"] = fit.iterations;
    out["converged"] = fit.converged;
    converged = fit.converged;
  }

  write_json(opt.out_path, out);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(opt.out_path + ".manifest.json",
             make_manifest("solve", args, opt.seed, {opt.out_path}, secs));
  return converged ? 0 : 2;
}

// --------------------------------------------------------------- lambda ---

struct LambdaOpts {
  std::string kind, x_path, out_path;
  Eigen::Index p = 0, n = 0;
  double q = 0.1, l1 = 1.0, l2 = 0.0;
  int draws = 5000, grid_points = 40;
  std::uint64_t seed = 1;
};

int cmd_lambda(const LambdaOpts& opt, const std::vector<std::string>& args) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> outputs{opt.out_path};
  if (opt.kind == "bh") {
    write_lambda_csv(opt.out_path, lambda_bh(opt.p, opt.q));
  } else if (opt.kind == "gstar") {
    GaussianSequence g = lambda_gaussian(opt.p, opt.n, opt.q);
    write_lambda_csv(opt.out_path, g.sequence);
    json side;
    side["k_star"] = g.k_star;
    std::string side_path = opt.out_path + ".kstar.json";
    write_json(side_path, side);
    outputs.push_back(side_path);
  } else if (opt.kind == "oscar") {
    write_lambda_csv(opt.out_path, lambda_oscar(opt.p, opt.l1, opt.l2));
  } else if (opt.kind == "mc") {
    if (opt.x_path.empty()) throw IoError("--kind mc requires --x FILE");
    Eigen::MatrixXd X = read_matrix_csv(opt.x_path);
    MonteCarloSequence mc = lambda_monte_carlo(
        X, opt.q, opt.draws, default_mc_grid(X.cols(), X.rows(), opt.grid_points), opt.seed);
    write_lambda_csv(opt.out_path, mc.sequence);
  } else {
    throw IoError("unknown --kind '" + opt.kind + "' (bh|gstar|oscar|mc)");
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(opt.out_path + ".manifest.json",
             make_manifest("lambda", args, opt.seed, outputs, secs));
  return 0;
}

// ------------------------------------------------------------- simulate ---

int cmd_simulate(const std::string& scenario, const std::string& config_path,
                 const std::string& out_dir, const std::vector<std::string>& args) {
  auto t0 = std::chrono::steady_clock::now();
  json cfg = load_json(config_path);

  SimReport report;
  std::uint64_t seed = 0;
  if (scenario == "orthogonal") {
    SimConfig c = parse_sim_config(cfg, Scenario::orthogonal);
    seed = c.seed;
    report = run_orthogonal_fdr(c);
  } else if (scenario == "gaussian") {
    SimConfig c = parse_sim_config(cfg, Scenario::gaussian_design);
    seed = c.seed;
    report = run_gaussian_design(c);
  } else if (scenario == "gwas") {
    SimConfig c = parse_sim_config(cfg, Scenario::gwas);
    seed = c.seed;
    report = run_gwas_sim(c);
  } else if (scenario == "anova") {
    AnovaConfig a;
    a.p = require_field<std::int64_t>(cfg, "p");
    a.labs = static_cast<int>(optional_field<std::int64_t>(cfg, "labs", 5));
    a.sigma_tau2 = optional_field<double>(cfg, "sigma_tau2", 2.5);
    a.sigma_z2 = optional_field<double>(cfg, "sigma_z2", 2.5);
    a.k = require_field<std::int64_t>(cfg, "k");
    std::string vm = optional_field<std::string>(cfg, "variance_mode", "known");
    if (vm == "known")
      a.variance_mode = VarianceMode::known;
    else if (vm == "estimated")
      a.variance_mode = VarianceMode::estimated;
    else
      throw IoError("config.variance_mode: unknown value '" + vm + "' (known|estimated)");
    double q = require_field<double>(cfg, "q");
    int replicates = static_cast<int>(require_field<std::int64_t>(cfg, "replicates"));
    seed = static_cast<std::uint64_t>(require_field<std::int64_t>(cfg, "seed"));
    int threads = static_cast<int>(optional_field<std::int64_t>(cfg, "threads", 0));
    report = run_anova_testing(a, q, replicates, seed, threads);
  } else {
    throw IoError("unknown --scenario '" + scenario + "' (orthogonal|gaussian|anova|gwas)");
  }

  std::filesystem::create_directories(out_dir);
  std::string report_path = out_dir + "/report.csv";
  std::string summary_path = out_dir + "/summary.json";
  write_sim_report_csv(report_path, report);
  json summary;
  summary["scenario"] = scenario;
  summary["config"] = cfg;
  summary["aggregates"] = aggregates_json(report);
  write_json(summary_path, summary);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(out_dir + "/manifest.json",
             make_manifest("simulate", args, seed, {report_path, summary_path}, secs));
  return 0;
}

// ----------------------------------------------------------------- prox ---

int cmd_prox(const std::string& y_path, const std::string& lambda_path, const std::string& bench,
             const std::string& out_path, const std::vector<std::string>& args) {
  auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd y = read_vector_csv(y_path);
  LambdaSequence lam = read_lambda_csv(lambda_path);
  if (y.size() != lam.size())
    throw IoError("dimension mismatch: y has length " + std::to_string(y.size()) +
                  ", lambda has length " + std::to_string(lam.size()));

  Eigen::VectorXd x = prox_sorted_l1(y, lam);
  write_vector_csv(out_path, x, "x");

  if (bench != "none") {
    int repeats = 0;
    try {
      repeats = std::stoi(bench);
    } catch (const std::exception&) {
      throw IoError("--bench must be 'none' or a repeat count");
    }
    if (repeats < 1) throw IoError("--bench repeat count must be >= 1");

    auto median_time = [repeats](auto&& fn) {
      std::vector<double> times(repeats);
      for (int r = 0; r < repeats; ++r) {
        auto a = std::chrono::steady_clock::now();
        fn();
        auto b = std::chrono::steady_clock::now();
        times[r] = std::chrono::duration<double>(b - a).count();
      }
      std::sort(times.begin(), times.end());
      return times[repeats / 2];
    };

    double total = median_time([&] {
      volatile double sink = prox_sorted_l1(y, lam)[0];
      (void)sink;
    });

    Eigen::VectorXd sorted_abs = y.cwiseAbs();
    std::sort(sorted_abs.data(), sorted_abs.data() + sorted_abs.size(), std::greater<double>());
    double core = median_time([&] {
      volatile double sink = prox_sorted_l1_sorted_nonneg(sorted_abs, lam, false)[0];
      (void)sink;
    });

    std::cout << "p=" << y.size() << '\n'
              << "total_prox_seconds_median=" << format_double(total) << '\n'
              << "core_prox_seconds_median=" << format_double(core) << '\n';
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(out_path + ".manifest.json", make_manifest("prox", args, 0, {out_path}, secs));
  return 0;
}

// ---------------------------------------------------------------- rerun ---

int cmd_rerun(const std::string& manifest_path) {
  json m = load_json(manifest_path);
  if (!m.contains("argv") || !m.at("argv").is_array())
    throw IoError(manifest_path + ": manifest has no argv array");
  std::vector<std::string> args;
  for (const auto& a : m.at("argv")) args.push_back(a.get<std::string>());
  return run_args(args);
}

// ------------------------------------------------------------ dispatcher ---

int run_args(const std::vector<std::string>& args) {
  CLI::App app{"SLOPE: sorted-l1 penalized estimation"};
  app.require_subcommand(1);

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "fit SLOPE to a CSV dataset");
  solve->add_option("--x", so.x_path, "design matrix CSV")->required();
  solve->add_option("--y", so.y_path, "response CSV (one column)")->required();
  solve->add_option("--lambda", so.lambda_spec, "bh|gstar|mc|file:PATH|const:V")->required();
  solve->add_option("--q", so.q, "FDR level for bh/gstar/mc");
  solve->add_option("--sigma", so.sigma, "noise level, or 'scaled' to estimate it");
  solve->add_option("--tol", so.tol, "relative duality-gap tolerance");
  solve->add_option("--max-iters", so.max_iters, "solver iteration cap");
  solve->add_option("--out", so.out_path, "output JSON path")->required();
  solve->add_option("--standardize", so.standardize, "on|off (default on)");
  solve->add_option("--seed", so.seed, "seed for the mc sequence");
  solve->add_option("--draws", so.draws, "Monte Carlo draws for mc");
  solve->add_option("--grid", so.grid_points, "grid points for mc");

  LambdaOpts lo;
  auto* lambda = app.add_subcommand("lambda", "generate a regularization sequence");
  lambda->add_option("--kind", lo.kind, "bh|gstar|oscar|mc")->required();
  lambda->add_option("--p", lo.p, "sequence length");
  lambda->add_option("--n", lo.n, "sample count (gstar)");
  lambda->add_option("--q", lo.q, "FDR level");
  lambda->add_option("--l1", lo.l1, "OSCAR l1 weight");
  lambda->add_option("--l2", lo.l2, "OSCAR l2 weight");
  lambda->add_option("--draws", lo.draws, "Monte Carlo draws (mc)");
  lambda->add_option("--grid", lo.grid_points, "grid points (mc)");
  lambda->add_option("--x", lo.x_path, "design CSV (mc)");
  lambda->add_option("--seed", lo.seed, "seed (mc)");
  lambda->add_option("--out", lo.out_path, "output CSV path")->required();

  std::string scenario, config_path, out_dir;
  auto* simulate = app.add_subcommand("simulate", "run a simulation scenario");
  simulate->add_option("--scenario", scenario, "orthogonal|gaussian|anova|gwas")->required();
  simulate->add_option("--config", config_path, "JSON config file")->required();
  simulate->add_option("--out", out_dir, "output directory")->required();

  std::string prox_y, prox_lambda, prox_bench = "none", prox_out;
  auto* prox = app.add_subcommand("prox", "sorted-l1 prox of a vector");
  prox->add_option("--y", prox_y, "input vector CSV")->required();
  prox->add_option("--lambda", prox_lambda, "lambda CSV")->required();
  prox->add_option("--bench", prox_bench, "none or a repeat count for timing");
  prox->add_option("--out", prox_out, "output CSV path")->required();

  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest");
  rerun->add_option("--manifest", manifest_path, "manifest JSON path")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (solve->parsed()) return cmd_solve(so, args);
  if (lambda->parsed()) return cmd_lambda(lo, args);
  if (simulate->parsed()) return cmd_simulate(scenario, config_path, out_dir, args);
  if (prox->parsed()) return cmd_prox(prox_y, prox_lambda, prox_bench, prox_out, args);
  if (rerun->parsed()) return cmd_rerun(manifest_path);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run_args(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
