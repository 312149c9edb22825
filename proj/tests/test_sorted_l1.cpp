#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "oracles.hpp"
#include "slope/rng.hpp"
#include "slope/sorted_l1.hpp"

using namespace slope;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

LambdaSequence lam(std::initializer_list<double> v) { return LambdaSequence(vec(v)); }

// random nonincreasing nonnegative sequence, not all zero
Eigen::VectorXd random_lambda(Eigen::Index p, CounterRng& rng) {
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = std::abs(rng.normal());
  std::sort(v.data(), v.data() + p, std::greater<double>());
  if (v[0] == 0.0) v[0] = 1.0;
  return v;
}

Eigen::VectorXd random_vec(Eigen::Index p, CounterRng& rng, double scale = 2.0) {
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("sorted_l1_norm examples") {
  CHECK(sorted_l1_norm(vec({0, 0, 0}), lam({3, 2, 1})) == 0.0);
  CHECK(sorted_l1_norm(vec({1, -2, 3}), lam({1, 1, 1})) == doctest::Approx(6.0));
  CHECK(sorted_l1_norm(vec({1, -2, 3}), lam({2, 0, 0})) == doctest::Approx(6.0));
  CHECK(sorted_l1_norm(vec({3, 1}), lam({2, 0.5})) == doctest::Approx(6.5));
}

TEST_CASE("sorted_l1_norm equals the best permutation pairing") {
  // the sorted pairing maximizes sum lambda_i |b|_(pi(i)) over permutations
  CounterRng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(5));
    Eigen::VectorXd b = random_vec(p, rng);
    Eigen::VectorXd lv = random_lambda(p, rng);
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double s = 0.0;
      for (Eigen::Index i = 0; i < p; ++i) s += lv[i] * std::abs(b[perm[i]]);
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(sorted_l1_norm(b, LambdaSequence(lv)) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("sorted_l1_norm norm axioms") {
  CounterRng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(8));
    Eigen::VectorXd lv = random_lambda(p, rng);
    LambdaSequence L(lv);
    Eigen::VectorXd a = random_vec(p, rng), b = random_vec(p, rng);
    double ja = sorted_l1_norm(a, L), jb = sorted_l1_norm(b, L);
    CHECK(ja >= 0.0);
    if (a.cwiseAbs().maxCoeff() > 0.0) CHECK(ja > 0.0);
    double c = rng.normal();
    double scale = std::max({1.0, ja, jb});
    CHECK(sorted_l1_norm(c * a, L) == doctest::Approx(std::abs(c) * ja).epsilon(1e-12));
    CHECK(sorted_l1_norm(a + b, L) <= ja + jb + 1e-12 * scale);
  }
}

TEST_CASE("sorted_l1_norm rejects bad input") {
  CHECK_THROWS_AS(sorted_l1_norm(vec({1, 2}), lam({1, 0.5, 0.1})), std::invalid_argument);
  Eigen::VectorXd bad = vec({1, 2});
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sorted_l1_norm(bad, lam({1, 0.5})), std::invalid_argument);
}

TEST_CASE("prox examples") {
  CHECK((prox_sorted_l1(vec({3, 1}), lam({2, 0.5})) - vec({1, 0.5})).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK((prox_sorted_l1(vec({5, -2, 0.5}), lam({1, 1, 1})) - vec({4, -1, 0}))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK((prox_sorted_l1(vec({4, 4}), lam({3, 1})) - vec({2, 2})).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(prox_sorted_l1(vec({0, 0, 0, 0}), lam({2, 1, 0.5, 0})).isZero(0.0));
}

TEST_CASE("prox rejects bad input") {
  CHECK_THROWS_AS(prox_sorted_l1(vec({1, 2, 3}), lam({1, 0.5})), std::invalid_argument);
  Eigen::VectorXd bad = vec({1, 2});
  bad[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(prox_sorted_l1(bad, lam({1, 0.5})), std::invalid_argument);
}

TEST_CASE("sorted nonneg prox examples and input check") {
  CHECK((prox_sorted_l1_sorted_nonneg(vec({3, 1}), lam({2, 0.5})) - vec({1, 0.5}))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK((prox_sorted_l1_sorted_nonneg(vec({4, 4}), lam({3, 1})) - vec({2, 2}))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK(prox_sorted_l1_sorted_nonneg(vec({5, 4, 3}), lam({6, 6, 6})).isZero(0.0));
  CHECK_THROWS_AS(prox_sorted_l1_sorted_nonneg(vec({1, 3}), lam({1, 0.5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(prox_sorted_l1_sorted_nonneg(vec({3, -1}), lam({1, 0.5})),
                  std::invalid_argument);
  // the hot path skips the scan on valid input
  CHECK((prox_sorted_l1_sorted_nonneg(vec({3, 1}), lam({2, 0.5}), false) - vec({1, 0.5}))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
}

TEST_CASE("prox matches the exact QP oracle") {
  CounterRng rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(8));
    Eigen::VectorXd y = random_vec(p, rng);
    if (trial % 7 == 0)  // exercise exact zeros and ties
      for (Eigen::Index i = 0; i < p; ++i)
        if (rng.uniform() < 0.3) y[i] = 0.0;
    Eigen::VectorXd lv = random_lambda(p, rng);
    Eigen::VectorXd got = prox_sorted_l1(y, LambdaSequence(lv));
    Eigen::VectorXd want = oracle::prox_sorted_l1(y, lv);
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("prox properties") {
  CounterRng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.uniform_index(12));
    Eigen::VectorXd lv = random_lambda(p, rng);
    LambdaSequence L(lv);
    Eigen::VectorXd y1 = random_vec(p, rng), y2 = random_vec(p, rng);
    Eigen::VectorXd x1 = prox_sorted_l1(y1, L), x2 = prox_sorted_l1(y2, L);

    // nonexpansive
    CHECK((x1 - x2).norm() <= (y1 - y2).norm() * (1.0 + 1e-12) + 1e-14);

    // sign equivariance
    CHECK(((-prox_sorted_l1(-y1, L)) - x1).cwiseAbs().maxCoeff() <= 1e-15);

    // permutation equivariance
    std::vector<Eigen::Index> perm(p);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (Eigen::Index i = p - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    Eigen::VectorXd py(p), px(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      py[i] = y1[perm[i]];
      px[i] = x1[perm[i]];
    }
    CHECK((prox_sorted_l1(py, L) - px).cwiseAbs().maxCoeff() <= 1e-15);

    // componentwise shrinkage toward zero, signs from y
    for (Eigen::Index i = 0; i < p; ++i) {
      CHECK(std::abs(x1[i]) <= std::abs(y1[i]));
      if (x1[i] != 0.0) CHECK(x1[i] * y1[i] > 0.0);
    }
  }
}

TEST_CASE("constant lambda reduces to soft thresholding exactly") {
  CounterRng rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(20));
    double c = std::abs(rng.normal()) + 0.05;
    Eigen::VectorXd y = random_vec(p, rng);
    Eigen::VectorXd x = prox_sorted_l1(y, LambdaSequence(Eigen::VectorXd::Constant(p, c)));
    for (Eigen::Index i = 0; i < p; ++i) {
      double soft = y[i] > 0 ? std::max(y[i] - c, 0.0) : -std::max(-y[i] - c, 0.0);
      CHECK(x[i] == soft);
    }
  }
}

TEST_CASE("prox equals blockwise-clamped isotonic fit of y - lambda") {
  CounterRng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(15));
    Eigen::VectorXd y = random_vec(p, rng).cwiseAbs();
    std::sort(y.data(), y.data() + p, std::greater<double>());
    Eigen::VectorXd lv = random_lambda(p, rng);
    Eigen::VectorXd via_prox = prox_sorted_l1_sorted_nonneg(y, LambdaSequence(lv));
    Eigen::VectorXd via_isotonic = isotonic_regression(y - lv).cwiseMax(0.0);
    CHECK((via_prox - via_isotonic).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("isotonic regression examples and oracle") {
  CHECK((isotonic_regression(vec({3, 2, 1})) - vec({3, 2, 1})).cwiseAbs().maxCoeff() == 0.0);
  CHECK((isotonic_regression(vec({1, 3})) - vec({2, 2})).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((isotonic_regression(vec({1, 1, 1})) - vec({1, 1, 1})).cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXd bad = vec({1, 2});
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(isotonic_regression(bad), std::invalid_argument);

  CounterRng rng(29);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(8));
    Eigen::VectorXd y = random_vec(p, rng);
    CHECK((isotonic_regression(y) - oracle::isotonic(y)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("tuple merges stay below p") {
  CounterRng rng(31);
  ProxWorkspace ws;
  Eigen::VectorXd out;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(200));
    Eigen::VectorXd y = random_vec(p, rng);
    Eigen::VectorXd lv = random_lambda(p, rng);
    prox_sorted_l1(y, LambdaSequence(lv), ws, out);
    CHECK(ws.last_merge_count() < static_cast<std::size_t>(p));
  }
  // fully merging input: constant y with increasing cost pattern
  Eigen::VectorXd y = Eigen::VectorXd::Constant(50, 3.0);
  Eigen::VectorXd lv(50);
  for (int i = 0; i < 50; ++i) lv[i] = 2.0 - i * (1.0 / 50);
  prox_sorted_l1(y, LambdaSequence(lv), ws, out);
  CHECK(ws.last_merge_count() == 49);
}

TEST_CASE("LambdaSequence validation") {
  CHECK_THROWS_AS(LambdaSequence(vec({1, 2})), std::invalid_argument);      // increasing
  CHECK_THROWS_AS(LambdaSequence(vec({1, -0.5})), std::invalid_argument);   // negative
  CHECK_THROWS_AS(LambdaSequence(vec({0, 0, 0})), std::invalid_argument);   // all zero
  CHECK_THROWS_AS(LambdaSequence(Eigen::VectorXd(0)), std::invalid_argument);
  Eigen::VectorXd bad = vec({1, 0.5});
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LambdaSequence(bad), std::invalid_argument);
  CHECK_THROWS_AS(lam({1, 0.5}).scaled(-1.0), std::invalid_argument);
  CHECK(lam({1, 0.5}).scaled(2.0)[0] == 2.0);
}
