#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "slope/lambda_gen.hpp"
#include "slope/rng.hpp"
#include "slope/solver.hpp"
#include "slope/sorted_l1.hpp"

using namespace slope;

namespace {

struct Instance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd lambda;
};

Instance random_instance(CounterRng& rng, Eigen::Index n, Eigen::Index p, Eigen::Index k) {
  Instance inst;
  inst.X.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) inst.X(i, j) = rng.normal() / std::sqrt(double(n));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (Eigen::Index s = 0; s < k; ++s)
    beta[rng.uniform_index(p)] = 3.0 * std::sqrt(2.0 * std::log(double(p)));
  inst.y = inst.X * beta;
  for (Eigen::Index i = 0; i < n; ++i) inst.y[i] += rng.normal();
  inst.lambda = lambda_bh(p, 0.1).values();
  return inst;
}

}  // namespace

TEST_CASE("operator_norm_sq") {
  CHECK(operator_norm_sq(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-9));
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  CHECK(operator_norm_sq(D) == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(operator_norm_sq(Eigen::MatrixXd::Zero(4, 7)) == 0.0);

  CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd X(20, 10);
    for (Eigen::Index j = 0; j < 10; ++j)
      for (Eigen::Index i = 0; i < 20; ++i) X(i, j) = rng.normal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    double want = svd.singularValues()[0] * svd.singularValues()[0];
    CHECK(operator_norm_sq(X) == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("orthogonal design with constant lambda soft-thresholds X'y") {
  CounterRng rng(7);
  Eigen::Index p = 12;
  Eigen::VectorXd y(p);
  for (Eigen::Index i = 0; i < p; ++i) y[i] = 3.0 * rng.normal();
  double c = 1.3;
  SlopeProblem prob(Eigen::MatrixXd::Identity(p, p), y,
                    LambdaSequence(Eigen::VectorXd::Constant(p, c)));
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  for (auto solver : {solve_proximal_gradient, solve_fista}) {
    SlopeSolution sol = solver(prob, cfg);
    CHECK(sol.converged);
    for (Eigen::Index i = 0; i < p; ++i) {
      double soft = y[i] > 0 ? std::max(y[i] - c, 0.0) : -std::max(-y[i] - c, 0.0);
      CHECK(sol.beta[i] == doctest::Approx(soft).epsilon(1e-8));
    }
  }
}

TEST_CASE("zero response gives the zero solution") {
  Eigen::VectorXd lam(3);
  lam << 1.0, 0.0, 0.0;
  SlopeProblem prob(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3),
                    LambdaSequence(lam));
  SlopeSolution sol = solve_fista(prob, SolverConfig{});
  CHECK(sol.converged);
  CHECK(sol.beta.isZero(0.0));
  CHECK(sol.support.empty());
  CHECK(sol.objective == 0.0);
}

TEST_CASE("one fixed-step iteration from zero reproduces the prox") {
  CounterRng rng(11);
  Eigen::Index p = 9;
  Eigen::VectorXd y(p);
  for (Eigen::Index i = 0; i < p; ++i) y[i] = 2.5 * rng.normal();
  LambdaSequence lam = lambda_bh(p, 0.2);
  SlopeProblem prob(Eigen::MatrixXd::Identity(p, p), y, lam);
  SolverConfig cfg;
  cfg.step_rule = StepRule::fixed;
  cfg.fixed_step = 1.0;
  cfg.max_iters = 1;
  cfg.tolerance = 0.0;
  SlopeSolution sol = solve_fista(prob, cfg);
  Eigen::VectorXd want = prox_sorted_l1(y, lam);
  CHECK((sol.beta - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("objective is nonincreasing for plain proximal gradient with a fixed step") {
  CounterRng rng(13);
  Instance inst = random_instance(rng, 25, 40, 4);
  SlopeProblem prob(inst.X, inst.y, LambdaSequence(inst.lambda));
  double prev = std::numeric_limits<double>::infinity();
  for (int iters = 1; iters <= 40; ++iters) {
    SolverConfig cfg;
    cfg.step_rule = StepRule::fixed;
    cfg.max_iters = iters;
    cfg.tolerance = 0.0;  // never stop early, so run k is a prefix of run k+1
    SlopeSolution sol = solve_proximal_gradient(prob, cfg);
    CHECK(sol.objective <= prev * (1.0 + 1e-12));
    prev = sol.objective;
  }
}

TEST_CASE("duality gap properties") {
  // at an orthogonal optimum the gap closes
  CounterRng rng(17);
  Eigen::Index p = 20;
  Eigen::VectorXd y(p);
  for (Eigen::Index i = 0; i < p; ++i) y[i] = 4.0 * rng.normal();
  LambdaSequence lam = lambda_bh(p, 0.1);
  SlopeProblem prob(Eigen::MatrixXd::Identity(p, p), y, lam);
  Eigen::VectorXd opt = prox_sorted_l1(y, lam);
  CHECK(duality_gap(prob, opt) <= 1e-10);

  // zero data, zero beta
  Eigen::VectorXd lam0(2);
  lam0 << 1.0, 0.5;
  SlopeProblem zero(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                    LambdaSequence(lam0));
  CHECK(duality_gap(zero, Eigen::VectorXd::Zero(2)) == 0.0);

  // certified bound: gap(beta) >= objective(beta) - objective(optimum)
  Instance inst = random_instance(rng, 20, 30, 3);
  SlopeProblem rprob(inst.X, inst.y, LambdaSequence(inst.lambda));
  SolverConfig tight;
  tight.tolerance = 1e-12;
  tight.max_iters = 200000;
  SlopeSolution best = solve_fista(rprob, tight);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd beta(30);
    for (Eigen::Index i = 0; i < 30; ++i) beta[i] = rng.normal();
    double diff = slope_objective(rprob, beta) - best.objective;
    CHECK(duality_gap(rprob, beta) >= diff - 1e-9 * std::abs(best.objective));
  }
  CHECK_THROWS_AS(duality_gap(rprob, Eigen::VectorXd::Zero(7)), std::invalid_argument);
}

TEST_CASE("solvers agree with each other and with a long-run oracle") {
  CounterRng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_instance(rng, 10 + trial, 5 + 3 * trial, 2);
    SlopeProblem prob(inst.X, inst.y, LambdaSequence(inst.lambda));

    SolverConfig tight;
    tight.tolerance = 1e-13;
    tight.max_iters = 500000;
    SlopeSolution oracle_run = solve_fista(prob, tight);

    SolverConfig cfg;  // defaults: backtracking fista at 1e-7
    SlopeSolution fista = solve_fista(prob, cfg);
    SlopeSolution plain = solve_proximal_gradient(prob, tight);

    CHECK(fista.converged);
    CHECK(std::abs(fista.objective - oracle_run.objective) <=
          1e-6 * std::max(1.0, std::abs(oracle_run.objective)));
    CHECK((plain.beta - oracle_run.beta).cwiseAbs().maxCoeff() <= 1e-6);

    // fixed-point characterization at the tight solution
    double L = operator_norm_sq(inst.X);
    double t = 1.0 / L;
    Eigen::VectorXd grad = inst.X.transpose() * (inst.X * oracle_run.beta - inst.y);
    Eigen::VectorXd fp =
        prox_sorted_l1(oracle_run.beta - t * grad, LambdaSequence(inst.lambda * t));
    CHECK((fp - oracle_run.beta).norm() <= 1e-6);

    // rescaled dual certificate is feasible for the sorted-l1 dual ball
    Eigen::VectorXd corr = inst.X.transpose() * (inst.y - inst.X * oracle_run.beta);
    Eigen::VectorXd a = corr.cwiseAbs();
    std::sort(a.data(), a.data() + a.size(), std::greater<double>());
    double scale = 1.0, cum_a = 0.0, cum_l = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      cum_a += a[i];
      cum_l += inst.lambda[i];
      if (cum_a > cum_l) scale = std::min(scale, cum_l / cum_a);
    }
    CHECK(scale >= 1.0 - 1e-3);  // certificate nearly tight at convergence
    cum_a = cum_l = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      cum_a += scale * a[i];
      cum_l += inst.lambda[i];
      CHECK(cum_a <= cum_l * (1.0 + 1e-12) + 1e-12);
    }

    // objective field is the objective recomputed from beta
    CHECK(std::abs(slope_objective(prob, fista.beta) - fista.objective) <=
          1e-10 * std::max(1.0, std::abs(fista.objective)));

    // support is the exact nonzero set
    for (Eigen::Index i = 0; i < fista.beta.size(); ++i) {
      bool in = std::find(fista.support.begin(), fista.support.end(), i) != fista.support.end();
      CHECK(in == (fista.beta[i] != 0.0));
    }
  }
}

TEST_CASE("warm start converges immediately at the optimum") {
  CounterRng rng(23);
  Instance inst = random_instance(rng, 15, 10, 1);
  SlopeProblem prob(inst.X, inst.y, LambdaSequence(inst.lambda));
  SolverConfig tight;
  tight.tolerance = 1e-12;
  tight.max_iters = 200000;
  SlopeSolution first = solve_fista(prob, tight);
  SolverConfig warm;
  warm.b0 = first.beta;
  warm.tolerance = 1e-10;
  SlopeSolution again = solve_fista(prob, warm);
  CHECK(again.converged);
  CHECK(again.iterations <= 3);
  CHECK((again.beta - first.beta).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("validation and error paths") {
  Eigen::VectorXd lam2(2);
  lam2 << 1.0, 0.5;
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(2);

  CHECK_THROWS_AS(SlopeProblem(X, Eigen::VectorXd::Ones(3), LambdaSequence(lam2)),
                  std::invalid_argument);
  Eigen::VectorXd lam3(3);
  lam3 << 1.0, 0.5, 0.1;
  CHECK_THROWS_AS(SlopeProblem(X, y, LambdaSequence(lam3)), std::invalid_argument);
  Eigen::MatrixXd bad = X;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SlopeProblem(bad, y, LambdaSequence(lam2)), std::invalid_argument);

  SlopeProblem prob(X, y, LambdaSequence(lam2));
  SolverConfig cfg;
  cfg.max_iters = 0;
  CHECK_THROWS_AS(solve_fista(prob, cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.step_rule = StepRule::fixed;
  cfg.fixed_step = 3.0;  // ||X||^2 = 1, must be below 2
  CHECK_THROWS_AS(solve_fista(prob, cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.b0 = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(solve_fista(prob, cfg), std::invalid_argument);

  // hitting max_iters reports nonconvergence
  CounterRng rng(29);
  Instance inst = random_instance(rng, 20, 40, 3);
  SlopeProblem hard(inst.X, inst.y, LambdaSequence(inst.lambda));
  SolverConfig brief;
  brief.max_iters = 2;
  brief.tolerance = 1e-14;
  SlopeSolution sol = solve_fista(hard, brief);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 2);
}
