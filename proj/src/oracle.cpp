#include "structpen/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace structpen {
namespace oracle {

namespace {

// Certificate check for one candidate partition, written against the same
// prefix sums and comparison predicates as the fast path.
bool wedge_mask_feasible(const std::vector<double>& prefix, int n,
                         unsigned mask) {
  const double slack = detail::zeta_slack(n);
  double prev_mean = 0.0;
  int begin = 0;
  bool first = true;
  for (int cut = 1; cut <= n; ++cut) {
    const bool is_cut = (cut == n) || (mask & (1u << (cut - 1)));
    if (!is_cut) continue;
    const int end = cut;
    const double len = static_cast<double>(end - begin);
    const double sumsq = prefix[end] - prefix[begin];
    const double mean = sumsq / len;
    if (!first && !strictly_greater(prev_mean, mean)) return false;
    for (int q = begin + 1; q < end; ++q) {
      const double head = prefix[q] - prefix[begin];
      if (static_cast<double>(q - begin) - len * head / sumsq < -slack)
        return false;
    }
    prev_mean = mean;
    first = false;
    begin = end;
  }
  return true;
}

PenaltyResult result_from_partition(const Vector& beta,
                                    const ContiguousPartition& part) {
  PenaltyResult res;
  res.lambda.resize(beta.size());
  double omega = 0.0;
  for (int l = 0; l < part.block_count(); ++l) {
    const auto [b, e] = part.block(l);
    const double s = detail::direct_sumsq(beta, b, e);
    const double len = static_cast<double>(e - b);
    omega += std::sqrt(len * s);
    const double mu = std::sqrt(s / len);
    for (int j = b; j < e; ++j) res.lambda[j] = mu;
  }
  res.omega = omega;
  res.witness = part;
  return res;
}

PenaltyResult result_from_cut(const Vector& beta, const RootedTree& tree,
                              const TreeCut& cut) {
  int block_count = 0;
  const std::vector<int> block = tree_cut_blocks(tree, cut, &block_count);
  const int n = tree.size();
  std::vector<std::vector<int>> members(block_count);
  for (int v = 0; v < n; ++v) members[block[v]].push_back(v);
  std::vector<int> order(block_count);
  for (int b = 0; b < block_count; ++b) order[b] = b;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return members[a][0] < members[b][0]; });

  PenaltyResult res;
  res.lambda.resize(n);
  double omega = 0.0;
  for (int b : order) {
    double sumsq = 0.0;
    for (int v : members[b]) sumsq += beta[v] * beta[v];
    const double len = static_cast<double>(members[b].size());
    omega += std::sqrt(len * sumsq);
    const double mu = std::sqrt(sumsq / len);
    for (int v : members[b]) res.lambda[v] = mu;
  }
  res.omega = omega;
  res.witness = cut;
  return res;
}

}  // namespace

WedgeEnumeration wedge_enumerate(const Vector& beta) {
  check_vector(beta, "beta");
  const int n = static_cast<int>(beta.size());
  require(n <= 20, "wedge_bruteforce: n too large");
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta[i] == 0.0)
      throw std::domain_error("wedge_bruteforce: beta must be nonzero");

  const auto prefix = detail::prefix_squares(beta);
  WedgeEnumeration out;
  bool found = false;
  const unsigned masks = (n >= 1) ? (1u << (n - 1)) : 1u;
  for (unsigned mask = 0; mask < masks; ++mask) {
    if (!wedge_mask_feasible(prefix, n, mask)) continue;
    ++out.feasible_count;
    if (!found) {
      found = true;
      out.partition.n = n;
      for (int c = 1; c < n; ++c)
        if (mask & (1u << (c - 1))) out.partition.cuts.push_back(c);
    }
  }
  if (!found)
    throw std::runtime_error(
        "wedge_bruteforce: no feasible partition (implementation bug)");
  out.result = result_from_partition(beta, out.partition);
  return out;
}

PenaltyResult wedge_bruteforce(const Vector& beta) {
  return wedge_enumerate(beta).result;
}

TreeEnumeration tree_enumerate(const Vector& beta, const RootedTree& tree) {
  check_vector(beta, "beta");
  require(static_cast<int>(beta.size()) == tree.size(),
          "tree_bruteforce: dimension mismatch");
  const int edges = tree.edge_count();
  require(edges <= 18, "tree_bruteforce: tree too large");
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta[i] == 0.0)
      throw std::domain_error("tree_bruteforce: beta must be nonzero");

  TreeEnumeration out;
  bool found = false;
  const unsigned masks = 1u << edges;
  for (unsigned mask = 0; mask < masks; ++mask) {
    TreeCut cut;
    for (int e = 0; e < edges; ++e)
      if (mask & (1u << e)) cut.cut_edges.push_back(e);
    const TreeCertificates cert = tree_certificates(beta, tree, cut);
    if (!cert.feasible) continue;
    ++out.feasible_count;
    if (!found) {
      found = true;
      out.cut = std::move(cut);
    }
  }
  if (!found)
    throw std::runtime_error(
        "tree_bruteforce: no feasible cut (implementation bug)");
  out.result = result_from_cut(beta, tree, out.cut);
  return out;
}

PenaltyResult tree_bruteforce(const Vector& beta, const RootedTree& tree) {
  return tree_enumerate(beta, tree).result;
}

// ---------------------------------------------------------------------------
// Projected gradient reference

namespace {

// Euclidean projection onto {A x >= 0} cap {x >= floor} by Dykstra's
// alternating projections over the halfspaces.
Vector dykstra_project(const Matrix& A, double floorv, Vector x) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(x.size());
  std::vector<Vector> corrections(m, Vector::Zero(n));
  Vector coord_correction = Vector::Zero(n);
  std::vector<double> row_norm2(m);
  for (int j = 0; j < m; ++j) row_norm2[j] = A.row(j).squaredNorm();

  for (int sweep = 0; sweep < 4000; ++sweep) {
    double moved = 0.0;
    for (int j = 0; j < m; ++j) {
      if (row_norm2[j] == 0.0) continue;
      Vector z = x + corrections[j];
      const double viol = A.row(j).dot(z);
      Vector proj = z;
      if (viol < 0.0) proj -= (viol / row_norm2[j]) * A.row(j).transpose();
      corrections[j] = z - proj;
      moved += (proj - x).lpNorm<Eigen::Infinity>();
      x = std::move(proj);
    }
    Vector z = x + coord_correction;
    Vector proj = z.cwiseMax(floorv);
    coord_correction = z - proj;
    moved += (proj - x).lpNorm<Eigen::Infinity>();
    x = std::move(proj);
    if (moved < 1e-14 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
  }
  return x;
}

double gamma_at(const Vector& beta2, const Vector& lam) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    v += 0.5 * (beta2[i] / lam[i] + lam[i]);
  return v;
}

}  // namespace

PenaltyResult numeric_reference(const Vector& beta, const ConeSpec& cone,
                                const ReferenceConfig& cfg) {
  check_vector(beta, "beta");
  check_matrix(cone.A, "cone.A");
  require(cone.cols() == static_cast<int>(beta.size()),
          "numeric_reference: dimension mismatch");

  const Vector beta2 = beta.cwiseProduct(beta);
  Vector lam = cone_strictly_feasible_point(cone);
  const double bmax = beta.lpNorm<Eigen::Infinity>();
  if (bmax > 0.0) lam *= std::max(bmax, 1.0) / lam.lpNorm<Eigen::Infinity>();
  lam = lam.cwiseMax(2.0 * cfg.floor);
  lam = dykstra_project(cone.A, cfg.floor, lam);

  double fval = gamma_at(beta2, lam);
  double step = 1.0;
  int stall = 0;
  bool converged = false;
  for (int it = 0; it < cfg.max_iter && !converged; ++it) {
    Vector g(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      g[i] = 0.5 * (1.0 - beta2[i] / (lam[i] * lam[i]));

    bool accepted = false;
    double last_move = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      Vector cand = dykstra_project(cone.A, cfg.floor, lam - step * g);
      const Vector diff = cand - lam;
      last_move = diff.lpNorm<Eigen::Infinity>();
      const double fc = gamma_at(beta2, cand);
      // standard sufficient-decrease test for projected gradient steps
      if (fc <= fval + g.dot(diff) + diff.squaredNorm() / (2.0 * step)) {
        const double rel_drop = (fval - fc) / std::max(1.0, std::abs(fval));
        lam = std::move(cand);
        fval = fc;
        accepted = true;
        stall = (rel_drop < cfg.tol) ? stall + 1 : 0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // the projected step no longer moves: stationary up to rounding
      if (last_move <= 1e-10 * (1.0 + lam.lpNorm<Eigen::Infinity>()))
        converged = true;
      else
        throw NonConvergenceError("numeric_reference: line search failed");
    } else if (stall >= 8) {
      converged = true;
    } else {
      step = std::min(step * 1.5, 1e6);
    }
  }
  if (!converged)
    throw NonConvergenceError("numeric_reference: iteration budget exhausted");

  PenaltyResult res;
  res.omega = gamma_at(beta2, lam);
  res.lambda = std::move(lam);
  return res;
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& omega,
                            const Vector& beta, double h) {
  check_vector(beta, "beta");
  require(h > 0.0, "finite_diff: h must be positive");
  require(beta.cwiseAbs().minCoeff() >= 10.0 * h,
          "finite_diff: beta too close to a nondifferentiable point");
  Vector grad(beta.size());
  Vector probe = beta;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    probe[i] = beta[i] + h;
    const double up = omega(probe);
    probe[i] = beta[i] - h;
    const double down = omega(probe);
    probe[i] = beta[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace oracle
}  // namespace structpen
