#pragma once

#include <vector>

#include "structpen/core.hpp"
#include "structpen/penalties.hpp"

namespace structpen {

/// Rooted tree on vertices 0..n-1 given by parent links (root has parent -1).
/// Edge e is the link entering its child vertex; edges are numbered by
/// increasing child id, which fixes the row order of the incidence matrix.
class RootedTree {
 public:
  static RootedTree from_parents(std::vector<int> parent);
  static RootedTree path(int n);  // 0 -> 1 -> ... -> n-1
  static RootedTree star(int n);  // 0 -> {1, .., n-1}

  int size() const { return static_cast<int>(parent_.size()); }
  int edge_count() const { return size() - 1; }
  int root() const { return root_; }
  int parent(int v) const { return parent_[v]; }
  const std::vector<int>& parents() const { return parent_; }
  const std::vector<std::vector<int>>& children() const { return children_; }

  /// Child vertex of edge e.
  int edge_child(int e) const { return edge_child_[e]; }
  /// Edge id entering v, or -1 for the root.
  int edge_of(int v) const { return edge_of_[v]; }

  /// Vertices ordered so every vertex appears before its parent.
  const std::vector<int>& reverse_topological() const { return rev_topo_; }

  /// (n-1) x n incidence matrix: +1 at the edge's source vertex, -1 at its
  /// target vertex.
  Matrix incidence() const;

 private:
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> edge_child_;
  std::vector<int> edge_of_;
  std::vector<int> rev_topo_;
  int root_ = -1;
};

/// Certificates for a candidate cut: zeta per edge (zero on cut edges),
/// delta per vertex (constant on blocks). feasible = (zeta >= 0 and the
/// block means of squares strictly decrease across every cut edge).
struct TreeCertificates {
  Vector zeta;
  Vector delta;
  bool feasible = false;
};

/// Penalty for the tree-ordered cone {lambda > 0 : lambda_v >= lambda_w for
/// every edge (v, w)}. Computed by merging, bottom-up, each child block into
/// its parent block while the parent's mean of squares does not strictly
/// exceed the child's; among violating children the largest mean merges
/// first, which keeps all intermediate blocks feasible. Witness is the cut.
PenaltyResult tree_penalty(const Vector& beta, const RootedTree& tree);

TreeCertificates tree_certificates(const Vector& beta, const RootedTree& tree,
                                   const TreeCut& cut);

/// Vertex -> block id for the components left after removing the cut edges.
std::vector<int> tree_cut_blocks(const RootedTree& tree, const TreeCut& cut,
                                 int* block_count = nullptr);

}  // namespace structpen
