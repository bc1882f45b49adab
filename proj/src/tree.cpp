#include "structpen/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace structpen {

RootedTree RootedTree::from_parents(std::vector<int> parent) {
  RootedTree t;
  const int n = static_cast<int>(parent.size());
  require(n >= 1, "tree: must have at least one vertex");
  t.parent_ = std::move(parent);
  t.children_.assign(n, {});
  t.edge_of_.assign(n, -1);
  t.root_ = -1;
  for (int v = 0; v < n; ++v) {
    const int p = t.parent_[v];
    if (p == -1) {
      require(t.root_ == -1, "tree: more than one root");
      t.root_ = v;
    } else {
      require(p >= 0 && p < n && p != v, "tree: invalid parent link");
      t.children_[p].push_back(v);
    }
  }
  require(t.root_ != -1, "tree: no root");
  // edge ids by increasing child vertex
  for (int v = 0; v < n; ++v) {
    if (v == t.root_) continue;
    t.edge_of_[v] = static_cast<int>(t.edge_child_.size());
    t.edge_child_.push_back(v);
  }
  // topological order from the root; also detects cycles / disconnection
  std::vector<int> order;
  order.reserve(n);
  order.push_back(t.root_);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int c : t.children_[order[i]]) order.push_back(c);
  require(static_cast<int>(order.size()) == n,
          "tree: not connected or contains a cycle");
  t.rev_topo_.assign(order.rbegin(), order.rend());
  return t;
}

RootedTree RootedTree::path(int n) {
  require(n >= 1, "tree: n must be >= 1");
  std::vector<int> parent(n);
  parent[0] = -1;
  for (int v = 1; v < n; ++v) parent[v] = v - 1;
  return from_parents(std::move(parent));
}

RootedTree RootedTree::star(int n) {
  require(n >= 1, "tree: n must be >= 1");
  std::vector<int> parent(n, 0);
  parent[0] = -1;
  return from_parents(std::move(parent));
}

Matrix RootedTree::incidence() const {
  Matrix A = Matrix::Zero(edge_count(), size());
  for (int e = 0; e < edge_count(); ++e) {
    const int child = edge_child_[e];
    A(e, parent_[child]) = 1.0;
    A(e, child) = -1.0;
  }
  return A;
}

std::vector<int> tree_cut_blocks(const RootedTree& tree, const TreeCut& cut,
                                 int* block_count) {
  const int n = tree.size();
  std::vector<char> is_cut(std::max(0, tree.edge_count()), 0);
  for (int e : cut.cut_edges) {
    require(e >= 0 && e < tree.edge_count(), "cut: invalid edge id");
    require(!is_cut[e], "cut: duplicate edge");
    is_cut[e] = 1;
  }
  std::vector<int> block(n, -1);
  int count = 0;
  // vertices in topological order: a vertex joins its parent's block unless
  // the connecting edge is cut
  for (auto it = tree.reverse_topological().rbegin();
       it != tree.reverse_topological().rend(); ++it) {
    const int v = *it;
    const int e = tree.edge_of(v);
    if (e == -1 || is_cut[e]) {
      block[v] = count++;
    } else {
      block[v] = block[tree.parent(v)];
    }
  }
  if (block_count) *block_count = count;
  return block;
}

namespace {

struct MergeBlock {
  double sumsq = 0.0;
  int count = 0;
  std::vector<int> child_blocks;  // representative vertices
  double mean() const { return sumsq / static_cast<double>(count); }
};

int find_rep(std::vector<int>& merged_into, int v) {
  int r = v;
  while (merged_into[r] != r) r = merged_into[r];
  while (merged_into[v] != r) {
    const int next = merged_into[v];
    merged_into[v] = r;
    v = next;
  }
  return r;
}

}  // namespace

PenaltyResult tree_penalty(const Vector& beta, const RootedTree& tree) {
  check_vector(beta, "beta");
  const int n = tree.size();
  require(static_cast<int>(beta.size()) == n, "tree: dimension mismatch");

  std::vector<MergeBlock> blk(n);
  std::vector<int> merged_into(n);
  std::iota(merged_into.begin(), merged_into.end(), 0);

  for (int v : tree.reverse_topological()) {
    MergeBlock& b = blk[v];
    b.sumsq = beta[v] * beta[v];
    b.count = 1;
    for (int c : tree.children()[v]) b.child_blocks.push_back(c);
    // absorb violating children, largest mean first; absorbing raises the
    // block mean, so previously settled children stay strictly below
    while (true) {
      int best = -1;
      double best_mean = 0.0;
      for (std::size_t i = 0; i < b.child_blocks.size(); ++i) {
        const double m = blk[b.child_blocks[i]].mean();
        if (best == -1 || m > best_mean) {
          best = static_cast<int>(i);
          best_mean = m;
        }
      }
      if (best == -1 || strictly_greater(b.mean(), best_mean)) break;
      const int crep = b.child_blocks[best];
      MergeBlock& c = blk[crep];
      b.sumsq += c.sumsq;
      b.count += c.count;
      b.child_blocks.erase(b.child_blocks.begin() + best);
      b.child_blocks.insert(b.child_blocks.end(), c.child_blocks.begin(),
                            c.child_blocks.end());
      c.child_blocks.clear();
      merged_into[crep] = v;
    }
  }

  // gather final blocks; stats are recomputed by direct summation in vertex
  // order so path trees reproduce the wedge values bitwise
  std::vector<int> rep_of(n);
  std::vector<int> reps;
  for (int v = 0; v < n; ++v) {
    rep_of[v] = find_rep(merged_into, v);
    if (rep_of[v] == v) reps.push_back(v);
  }
  std::vector<std::vector<int>> members(n);
  for (int v = 0; v < n; ++v) members[rep_of[v]].push_back(v);
  std::sort(reps.begin(), reps.end(),
            [&](int a, int b) { return members[a][0] < members[b][0]; });

  PenaltyResult res;
  res.lambda.resize(n);
  double omega = 0.0;
  for (int r : reps) {
    double sumsq = 0.0;
    for (int v : members[r]) sumsq += beta[v] * beta[v];
    const double len = static_cast<double>(members[r].size());
    omega += std::sqrt(len * sumsq);
    const double mu = std::sqrt(sumsq / len);
    for (int v : members[r]) res.lambda[v] = mu;
  }
  res.omega = omega;

  TreeCut cut;
  for (int e = 0; e < tree.edge_count(); ++e) {
    const int child = tree.edge_child(e);
    if (rep_of[child] != rep_of[tree.parent(child)]) cut.cut_edges.push_back(e);
  }
  res.witness = std::move(cut);
  return res;
}

TreeCertificates tree_certificates(const Vector& beta, const RootedTree& tree,
                                   const TreeCut& cut) {
  check_vector(beta, "beta");
  const int n = tree.size();
  require(static_cast<int>(beta.size()) == n, "tree: dimension mismatch");
  for (int v = 0; v < n; ++v)
    if (beta[v] == 0.0)
      throw std::domain_error("certificates: beta must have no zero entries");

  int block_count = 0;
  const std::vector<int> block = tree_cut_blocks(tree, cut, &block_count);

  std::vector<double> blk_sumsq(block_count, 0.0);
  std::vector<int> blk_count(block_count, 0);
  for (int v = 0; v < n; ++v) {
    blk_sumsq[block[v]] += beta[v] * beta[v];
    blk_count[block[v]] += 1;
  }

  std::vector<char> is_cut(std::max(0, tree.edge_count()), 0);
  for (int e : cut.cut_edges) is_cut[e] = 1;

  // descendant sums within blocks
  std::vector<double> subsq(n, 0.0);
  std::vector<int> subcnt(n, 0);
  for (int v : tree.reverse_topological()) {
    subsq[v] = beta[v] * beta[v];
    subcnt[v] = 1;
    for (int c : tree.children()[v]) {
      if (!is_cut[tree.edge_of(c)]) {
        subsq[v] += subsq[c];
        subcnt[v] += subcnt[c];
      }
    }
  }

  TreeCertificates cert;
  cert.zeta = Vector::Zero(std::max(0, tree.edge_count()));
  cert.delta.resize(n);
  cert.feasible = true;
  const double slack = detail::zeta_slack(n);

  for (int v = 0; v < n; ++v)
    cert.delta[v] =
        std::sqrt(blk_sumsq[block[v]] / static_cast<double>(blk_count[block[v]]));

  for (int e = 0; e < tree.edge_count(); ++e) {
    const int child = tree.edge_child(e);
    const int par = tree.parent(child);
    if (is_cut[e]) {
      // strict decrease of the block means across every cut edge
      const double mp =
          blk_sumsq[block[par]] / static_cast<double>(blk_count[block[par]]);
      const double mc =
          blk_sumsq[block[child]] / static_cast<double>(blk_count[block[child]]);
      if (!strictly_greater(mp, mc)) cert.feasible = false;
      continue;
    }
    const int bl = block[child];
    const double z = static_cast<double>(blk_count[bl]) * subsq[child] /
                         blk_sumsq[bl] -
                     static_cast<double>(subcnt[child]);
    cert.zeta[e] = z;
    if (z < -slack) cert.feasible = false;
  }
  return cert;
}

}  // namespace structpen
