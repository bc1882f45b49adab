#include <doctest.h>

#include <cmath>

#include "structpen/bench.hpp"
#include "structpen/core.hpp"

using namespace structpen;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("gamma examples") {
  CHECK(gamma(vec({1}), vec({1})) == doctest::Approx(1.0));
  CHECK(gamma(vec({2, 0}), vec({2, 4})) == doctest::Approx(4.0));
  CHECK(gamma(vec({1, 1}), vec({1, 1})) == doctest::Approx(2.0));
}

TEST_CASE("gamma domain") {
  CHECK_THROWS_AS(gamma(vec({1, 2}), vec({1})), std::invalid_argument);
  CHECK_THROWS_AS(gamma(vec({1}), vec({0})), std::domain_error);
  CHECK_THROWS_AS(gamma(vec({1}), vec({-1})), std::domain_error);
  // lambda_i = 0 with beta_i = 0 contributes exactly 0
  CHECK(gamma(vec({0, 2}), vec({0, 2})) == doctest::Approx(2.0));
}

TEST_CASE("norms") {
  CHECK(l1_norm(vec({3, -4})) == doctest::Approx(7.0));
  CHECK(l2_norm(vec({3, -4})) == doctest::Approx(5.0));
  Vector empty(0);
  CHECK_THROWS_AS(l1_norm(empty), std::invalid_argument);
  Vector bad = vec({1, 2});
  bad[1] = std::nan("");
  CHECK_THROWS_AS(l2_norm(bad), std::invalid_argument);
}

TEST_CASE("group average map") {
  GroupPartition P{{{0, 1}, {2}}};
  CHECK(group_average_map(vec({1, -2, 3}), P) == vec({3, 3}));
  CHECK(group_average_map(vec({1, -2, 3}), GroupPartition::singletons(3)) ==
        vec({1, 2, 3}));
  CHECK(group_average_map(vec({0, 0, 0}), P) == vec({0, 0}));

  GroupPartition overlapping{{{0, 1}, {1, 2}}};
  CHECK_THROWS_AS(group_average_map(vec({1, 2, 3}), overlapping),
                  std::invalid_argument);
  GroupPartition incomplete{{{0, 1}}};
  CHECK_THROWS_AS(group_average_map(vec({1, 2, 3}), incomplete),
                  std::invalid_argument);
}

TEST_CASE("phi_eps") {
  CHECK(phi_eps(vec({0, 0}), 1.0) == vec({1, 1}));
  CHECK(phi_eps(vec({3}), 1e-16)[0] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(phi_eps(vec({-4}), 9.0)[0] == doctest::Approx(5.0));
  CHECK_THROWS_AS(phi_eps(vec({1}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(phi_eps(vec({1}), -1.0), std::invalid_argument);
}

TEST_CASE("gamma dominates the l1 norm") {
  bench::Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = rng.uniform_int(1, 8);
    Vector beta(n), lambda(n);
    for (int i = 0; i < n; ++i) {
      beta[i] = rng.normal();
      lambda[i] = std::abs(rng.normal()) + 0.05;
    }
    CHECK(gamma(beta, lambda) >= l1_norm(beta) - 1e-12);
    // equality exactly at lambda = |beta| (when no entry vanishes)
    Vector absb = beta.cwiseAbs();
    if (absb.minCoeff() > 1e-6)
      CHECK(gamma(beta, absb) == doctest::Approx(l1_norm(beta)).epsilon(1e-12));
  }
}

TEST_CASE("group average map is positively homogeneous") {
  bench::Rng rng(8);
  GroupPartition P{{{0, 2}, {1, 3, 4}}};
  for (int rep = 0; rep < 100; ++rep) {
    Vector beta(5);
    for (int i = 0; i < 5; ++i) beta[i] = rng.normal();
    const double t = 4.0 * rng.normal();
    const Vector lhs = group_average_map(t * beta, P);
    const Vector rhs = std::abs(t) * group_average_map(beta, P);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12 * (1 + rhs.norm()));
  }
}

TEST_CASE("phi_eps positive and monotone in eps") {
  bench::Rng rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    Vector beta(6);
    for (int i = 0; i < 6; ++i) beta[i] = rng.normal();
    const Vector lo = phi_eps(beta, 1e-6);
    const Vector hi = phi_eps(beta, 1e-2);
    CHECK(lo.minCoeff() > 0.0);
    for (int i = 0; i < 6; ++i) CHECK(lo[i] < hi[i]);
  }
}

TEST_CASE("contiguous partition blocks") {
  ContiguousPartition part;
  part.n = 5;
  part.cuts = {2, 3};
  REQUIRE(part.block_count() == 3);
  CHECK(part.block(0) == std::pair<int, int>{0, 2});
  CHECK(part.block(1) == std::pair<int, int>{2, 3});
  CHECK(part.block(2) == std::pair<int, int>{3, 5});
}
