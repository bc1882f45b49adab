#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace structpen {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative tie tolerance shared by every strict-decrease check: the fast
/// merge algorithms, the certificates and the brute-force enumerations all
/// use the same predicate so they agree on tied block means.
inline constexpr double kTieTol = 1e-12;

/// True when a exceeds b by more than the tie band (both nonnegative).
inline bool strictly_greater(double a, double b) {
  return a - b > kTieTol * std::max(a, b);
}

void require(bool cond, const std::string& msg);

/// Checks length >= 1 and all entries finite.
void check_vector(const Vector& v, const std::string& name);
void check_matrix(const Matrix& m, const std::string& name);

double l1_norm(const Vector& beta);
double l2_norm(const Vector& beta);

/// Joint objective 0.5 * sum(beta_i^2 / lambda_i + lambda_i). A pair
/// (beta_i, lambda_i) = (0, 0) contributes 0 (continuous extension);
/// lambda_i = 0 with beta_i != 0 is a domain error.
double gamma(const Vector& beta, const Vector& lambda);

/// Componentwise sqrt(beta_i^2 + eps), eps > 0.
Vector phi_eps(const Vector& beta, double eps);

/// Disjoint index blocks covering {0..n-1}.
struct GroupPartition {
  std::vector<std::vector<int>> blocks;

  void validate(int n) const;
  static GroupPartition contiguous(int n, int block_size);
  static GroupPartition singletons(int n);
};

/// Blockwise l1 norms (|| beta|P_1 ||_1, ..., || beta|P_k ||_1).
Vector group_average_map(const Vector& beta, const GroupPartition& partition);

/// Ordered blocks of consecutive indices. `cuts` holds the strictly
/// increasing cut points in [1, n-1]; block l is the half-open index range
/// [cuts[l-1], cuts[l]) with implicit sentinels 0 and n.
struct ContiguousPartition {
  int n = 0;
  std::vector<int> cuts;

  int block_count() const { return static_cast<int>(cuts.size()) + 1; }
  std::pair<int, int> block(int l) const;
  std::vector<std::pair<int, int>> blocks() const;
};

/// Edge subset of a rooted tree; removing the edges splits the vertex set
/// into connected blocks. Edges are identified by their child vertex.
struct TreeCut {
  std::vector<int> cut_edges;
};

using Witness = std::variant<std::monostate, ContiguousPartition, TreeCut>;

/// Penalty value, the minimizing auxiliary vector and, when the evaluator
/// identifies one, the optimal block structure.
struct PenaltyResult {
  double omega = 0.0;
  Vector lambda;
  Witness witness;
};

}  // namespace structpen
