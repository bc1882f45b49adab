#include <doctest.h>

#include <cmath>

#include "structpen/bench.hpp"
#include "structpen/oracle.hpp"
#include "structpen/penalties.hpp"

using namespace structpen;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

ConeSpec orthant(int n) { return ConeSpec{Matrix::Zero(0, n)}; }

}  // namespace

TEST_CASE("cone penalty over the positive orthant is the l1 norm") {
  const Vector beta = vec({1, -2});
  const PenaltyResult res = cone_penalty_numeric(beta, orthant(2));
  CHECK(res.omega == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(res.lambda[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.lambda[1] == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("cone penalty on the wedge cone matches the closed form") {
  const Vector beta = vec({1, 2, 1});
  const PenaltyResult closed = wedge_penalty(beta);
  const PenaltyResult numeric = cone_penalty_numeric(beta, wedge_cone(3));
  CHECK(numeric.omega == doctest::Approx(closed.omega).epsilon(1e-6));

  bench::Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = rng.uniform_int(2, 8);
    Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = rng.normal();
    const double fast = wedge_penalty(b).omega;
    const double slow = cone_penalty_numeric(b, wedge_cone(n)).omega;
    CHECK(slow == doctest::Approx(fast).epsilon(1e-6));
  }
}

TEST_CASE("k-wedge penalty with zeros needs the floor continuation") {
  // |beta| = (0,0,1) lies in the closure of W^2, so the value is ||beta||_1
  const Vector beta = vec({0, 0, 1});
  const PenaltyResult res = cone_penalty_numeric(beta, k_wedge_matrix(3, 2));
  CHECK(res.omega >= l1_norm(beta) - 1e-9);
  CHECK(res.omega == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("exhausted Newton budget is reported") {
  ConeSolveConfig cfg;
  cfg.max_newton = 3;
  CHECK_THROWS_AS(cone_penalty_numeric(vec({1, 2, 1}), wedge_cone(3), cfg),
                  NonConvergenceError);
}

TEST_CASE("infeasible cone is reported") {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;  // forces lambda_1 = lambda_2: no strict interior
  CHECK_THROWS_AS(cone_penalty_numeric(vec({1, 1}), ConeSpec{A}),
                  InfeasibleConeError);
  CHECK_THROWS_AS(cone_strictly_feasible_point(ConeSpec{A}),
                  InfeasibleConeError);
}

TEST_CASE("strictly feasible points for difference cones") {
  for (int k = 1; k <= 4; ++k) {
    const ConeSpec cone = k_wedge_matrix(12, k);
    const Vector lam = cone_strictly_feasible_point(cone);
    CHECK(lam.minCoeff() > 0.0);
    CHECK((cone.A * lam).minCoeff() > 0.0);
  }
}

TEST_CASE("warm-started evaluator agrees with the cold evaluation") {
  bench::Rng rng(22);
  ConeEvaluator eval(k_wedge_matrix(6, 2));
  for (int rep = 0; rep < 5; ++rep) {
    Vector phi(6);
    for (int i = 0; i < 6; ++i) phi[i] = 0.1 + std::abs(rng.normal());
    const PenaltyResult warm = eval.minimize(phi);
    const PenaltyResult cold = cone_penalty_numeric(phi, k_wedge_matrix(6, 2));
    CHECK(warm.omega == doctest::Approx(cold.omega).epsilon(1e-6));
  }
}

TEST_CASE("projected-gradient reference agrees with the barrier") {
  // positive orthant: the reference recovers the l1 norm
  const Vector beta = vec({1, -2, 0.5});
  const PenaltyResult ref = oracle::numeric_reference(beta, orthant(3));
  CHECK(ref.omega == doctest::Approx(l1_norm(beta)).epsilon(1e-8));

  // wedge cone against the closed form
  bench::Rng rng(23);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = rng.uniform_int(2, 6);
    Vector b(n);
    for (int i = 0; i < n; ++i) {
      b[i] = rng.normal();
      if (std::abs(b[i]) < 0.1) b[i] = 0.1;
    }
    const double fast = wedge_penalty(b).omega;
    const double ref_value =
        oracle::numeric_reference(b, wedge_cone(n)).omega;
    CHECK(ref_value == doctest::Approx(fast).epsilon(1e-6));
    const double barrier = cone_penalty_numeric(b, wedge_cone(n)).omega;
    CHECK(ref_value == doctest::Approx(barrier).epsilon(1e-6));
  }

  // convex nonincreasing profile lies in W^2: value is the l1 norm
  const Vector profile = vec({4, 2, 1});
  CHECK(oracle::numeric_reference(profile, k_wedge_matrix(3, 2)).omega ==
        doctest::Approx(l1_norm(profile)).epsilon(1e-6));
}

TEST_CASE("dual norm via the barrier matches the wedge closed form") {
  bench::Rng rng(24);
  for (int rep = 0; rep < 8; ++rep) {
    const int n = rng.uniform_int(2, 7);
    Vector beta(n);
    for (int i = 0; i < n; ++i) beta[i] = rng.normal();
    const double closed = dual_norm_wedge(beta);
    const double numeric = dual_norm(beta, wedge_cone(n));
    CHECK(numeric == doctest::Approx(closed).epsilon(1e-6));
  }
  CHECK(dual_norm(vec({0, 0, 0}), wedge_cone(3)) == doctest::Approx(0.0));
  CHECK(dual_norm(vec({1, -3}), orthant(2)) == doctest::Approx(3.0));
}

TEST_CASE("dual norm of the orthant bounds the wedge dual norm") {
  // the wedge cone is a subset of the orthant, so its dual norm is smaller
  bench::Rng rng(25);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = rng.uniform_int(2, 9);
    Vector beta(n);
    for (int i = 0; i < n; ++i) beta[i] = rng.normal();
    CHECK(dual_norm_wedge(beta) <= dual_norm_orthant(beta) + 1e-12);
  }
}
