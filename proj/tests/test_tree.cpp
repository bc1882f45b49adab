#include <doctest.h>

#include <cmath>

#include "structpen/bench.hpp"
#include "structpen/oracle.hpp"
#include "structpen/tree.hpp"

using namespace structpen;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Vector random_nonzero(int n, bench::Rng& rng) {
  Vector beta(n);
  for (int i = 0; i < n; ++i) {
    do {
      beta[i] = rng.normal();
    } while (std::abs(beta[i]) < 1e-3);
  }
  return beta;
}

RootedTree random_tree(int n, bench::Rng& rng) {
  std::vector<int> parent(n);
  parent[0] = -1;
  for (int v = 1; v < n; ++v) parent[v] = rng.uniform_int(0, v - 1);
  return RootedTree::from_parents(std::move(parent));
}

}  // namespace

TEST_CASE("tree structure validation") {
  CHECK_THROWS_AS(RootedTree::from_parents({0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(RootedTree::from_parents({-1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(RootedTree::from_parents({-1, 2, 1}), std::invalid_argument);
  const RootedTree star = RootedTree::star(4);
  CHECK(star.root() == 0);
  CHECK(star.children()[0].size() == 3);
  CHECK(star.edge_count() == 3);
}

TEST_CASE("incidence matrix of a path") {
  const RootedTree path = RootedTree::path(3);
  const Matrix A = path.incidence();
  REQUIRE(A.rows() == 2);
  CHECK(A.row(0) == Eigen::RowVector3d(1, -1, 0));
  CHECK(A.row(1) == Eigen::RowVector3d(0, 1, -1));
}

TEST_CASE("single vertex tree") {
  const PenaltyResult res = tree_penalty(vec({5}), RootedTree::path(1));
  CHECK(res.omega == doctest::Approx(5.0));
  CHECK(res.lambda[0] == doctest::Approx(5.0));
}

TEST_CASE("path tree reproduces the wedge bitwise") {
  bench::Rng rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = rng.uniform_int(1, 40);
    Vector beta(n);
    for (int i = 0; i < n; ++i) beta[i] = rng.normal();
    const PenaltyResult via_tree = tree_penalty(beta, RootedTree::path(n));
    const PenaltyResult via_wedge = wedge_penalty(beta);
    CHECK(via_tree.omega == via_wedge.omega);
    CHECK(via_tree.lambda == via_wedge.lambda);
  }
  // exact tie case merges identically
  const PenaltyResult tie_tree = tree_penalty(vec({1, 1}), RootedTree::path(2));
  const PenaltyResult tie_wedge = wedge_penalty(vec({1, 1}));
  CHECK(tie_tree.omega == tie_wedge.omega);
  CHECK(std::get<TreeCut>(tie_tree.witness).cut_edges.empty());
}

TEST_CASE("star example agrees with the enumeration") {
  const RootedTree star = RootedTree::star(3);
  const Vector beta = vec({1, 2, 2});
  const PenaltyResult fast = tree_penalty(beta, star);
  const auto enumerated = oracle::tree_enumerate(beta, star);
  CHECK(enumerated.feasible_count == 1);
  CHECK(fast.omega == doctest::Approx(enumerated.result.omega).epsilon(1e-12));
  // the empty cut is optimal here: one block with mean 3
  CHECK(std::get<TreeCut>(fast.witness).cut_edges.empty());
  CHECK(fast.omega == doctest::Approx(3.0 * std::sqrt(3.0)));

  // it is also the minimum of gamma over the cone-feasible cut candidates
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < 4; ++mask) {
    TreeCut cut;
    for (int e = 0; e < 2; ++e)
      if (mask & (1u << e)) cut.cut_edges.push_back(e);
    int count = 0;
    const auto block = tree_cut_blocks(star, cut, &count);
    std::vector<double> sumsq(count, 0.0);
    std::vector<int> size(count, 0);
    for (int v = 0; v < 3; ++v) {
      sumsq[block[v]] += beta[v] * beta[v];
      size[block[v]] += 1;
    }
    Vector delta(3);
    for (int v = 0; v < 3; ++v)
      delta[v] = std::sqrt(sumsq[block[v]] / size[block[v]]);
    bool in_cone = true;  // delta_parent >= delta_child along every edge
    for (int v = 1; v < 3; ++v)
      if (delta[0] < delta[v] - 1e-12) in_cone = false;
    if (in_cone) best = std::min(best, gamma(beta, delta));
  }
  CHECK(fast.omega == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("max-first merging picks the right branch") {
  // root 0 with children 1 (low mean) and 2 (high mean): only the high-mean
  // child joins the root block, the other edge stays cut
  const RootedTree star = RootedTree::star(3);
  const Vector beta =
      vec({std::sqrt(0.2), std::sqrt(0.4), std::sqrt(0.9)});
  const PenaltyResult fast = tree_penalty(beta, star);
  const auto enumerated = oracle::tree_enumerate(beta, star);
  CHECK(enumerated.feasible_count == 1);
  CHECK(fast.omega == doctest::Approx(enumerated.result.omega).epsilon(1e-12));
  const auto& cut = std::get<TreeCut>(fast.witness);
  REQUIRE(cut.cut_edges.size() == 1);
  CHECK(star.edge_child(cut.cut_edges[0]) == 1);
  CHECK(fast.lambda[0] == doctest::Approx(std::sqrt(0.55)));
  CHECK(fast.lambda[2] == doctest::Approx(std::sqrt(0.55)));
  CHECK(fast.lambda[1] == doctest::Approx(std::sqrt(0.4)));
}

TEST_CASE("tree penalty agrees with the enumeration on random trees") {
  bench::Rng rng(32);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = rng.uniform_int(2, 9);
    const RootedTree tree = random_tree(n, rng);
    const Vector beta = random_nonzero(n, rng);
    const PenaltyResult fast = tree_penalty(beta, tree);
    const auto enumerated = oracle::tree_enumerate(beta, tree);
    CHECK(enumerated.feasible_count == 1);
    CHECK(fast.omega ==
          doctest::Approx(enumerated.result.omega).epsilon(1e-12));
    CHECK((fast.lambda - enumerated.result.lambda).lpNorm<Eigen::Infinity>() <=
          1e-12);
  }
}

TEST_CASE("tree penalty agrees with the barrier on the incidence cone") {
  bench::Rng rng(33);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = rng.uniform_int(2, 7);
    const RootedTree tree = random_tree(n, rng);
    const Vector beta = random_nonzero(n, rng);
    const double fast = tree_penalty(beta, tree).omega;
    const double numeric =
        cone_penalty_numeric(beta, ConeSpec{tree.incidence()}).omega;
    CHECK(numeric == doctest::Approx(fast).epsilon(1e-6));
  }
}

TEST_CASE("tree certificates") {
  // path cut reproducing the wedge partition of (2, 1)
  const RootedTree path = RootedTree::path(2);
  TreeCut cut;
  cut.cut_edges = {0};
  const TreeCertificates feasible = tree_certificates(vec({2, 1}), path, cut);
  CHECK(feasible.feasible);
  CHECK(feasible.delta == vec({2, 1}));

  // non-decreasing means across a cut edge are infeasible
  const TreeCertificates infeasible =
      tree_certificates(vec({1, 2}), path, cut);
  CHECK_FALSE(infeasible.feasible);

  // star with the empty cut: all deltas equal sqrt(3)
  const RootedTree star = RootedTree::star(3);
  const TreeCertificates empty_cut =
      tree_certificates(vec({1, 2, 2}), star, TreeCut{});
  CHECK(empty_cut.feasible);
  for (int v = 0; v < 3; ++v)
    CHECK(empty_cut.delta[v] == doctest::Approx(std::sqrt(3.0)));

  CHECK_THROWS_AS(tree_certificates(vec({1, 0}), path, TreeCut{}),
                  std::domain_error);
  TreeCut bad;
  bad.cut_edges = {5};
  CHECK_THROWS_AS(tree_certificates(vec({1, 2}), path, bad),
                  std::invalid_argument);
}

TEST_CASE("fast tree cut passes its own certificates") {
  bench::Rng rng(34);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = rng.uniform_int(2, 10);
    const RootedTree tree = random_tree(n, rng);
    const Vector beta = random_nonzero(n, rng);
    const PenaltyResult fast = tree_penalty(beta, tree);
    const auto& cut = std::get<TreeCut>(fast.witness);
    CHECK(tree_certificates(beta, tree, cut).feasible);
  }
}
