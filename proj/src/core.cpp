#include "structpen/core.hpp"

#include <cmath>
#include <stdexcept>

namespace structpen {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_vector(const Vector& v, const std::string& name) {
  require(v.size() >= 1, name + ": length must be >= 1");
  require(v.allFinite(), name + ": entries must be finite");
}

void check_matrix(const Matrix& m, const std::string& name) {
  require(m.allFinite(), name + ": entries must be finite");
}

double l1_norm(const Vector& beta) {
  check_vector(beta, "beta");
  return beta.lpNorm<1>();
}

double l2_norm(const Vector& beta) {
  check_vector(beta, "beta");
  return beta.norm();
}

double gamma(const Vector& beta, const Vector& lambda) {
  check_vector(beta, "beta");
  check_vector(lambda, "lambda");
  require(beta.size() == lambda.size(), "gamma: length mismatch");
  double value = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    const double b = beta[i];
    const double l = lambda[i];
    if (l < 0.0) throw std::domain_error("gamma: lambda must be nonnegative");
    if (l == 0.0) {
      if (b != 0.0)
        throw std::domain_error("gamma: lambda_i = 0 with beta_i != 0");
      continue;  // limit contribution is 0
    }
    value += 0.5 * (b * b / l + l);
  }
  return value;
}

Vector phi_eps(const Vector& beta, double eps) {
  check_vector(beta, "beta");
  require(eps > 0.0, "phi_eps: eps must be positive");
  return (beta.array().square() + eps).sqrt().matrix();
}

void GroupPartition::validate(int n) const {
  require(n >= 1, "partition: n must be >= 1");
  std::vector<char> seen(n, 0);
  require(!blocks.empty(), "partition: no blocks");
  for (const auto& block : blocks) {
    require(!block.empty(), "partition: empty block");
    for (int j : block) {
      require(j >= 0 && j < n, "partition: index out of range");
      require(!seen[j], "partition: overlapping blocks");
      seen[j] = 1;
    }
  }
  for (int j = 0; j < n; ++j)
    require(seen[j], "partition: blocks do not cover the index set");
}

GroupPartition GroupPartition::contiguous(int n, int block_size) {
  require(n >= 1 && block_size >= 1, "partition: bad sizes");
  GroupPartition p;
  for (int start = 0; start < n; start += block_size) {
    std::vector<int> block;
    for (int j = start; j < std::min(n, start + block_size); ++j)
      block.push_back(j);
    p.blocks.push_back(std::move(block));
  }
  return p;
}

GroupPartition GroupPartition::singletons(int n) {
  return contiguous(n, 1);
}

Vector group_average_map(const Vector& beta, const GroupPartition& partition) {
  check_vector(beta, "beta");
  partition.validate(static_cast<int>(beta.size()));
  Vector out(static_cast<Eigen::Index>(partition.blocks.size()));
  for (std::size_t l = 0; l < partition.blocks.size(); ++l) {
    double sum = 0.0;
    for (int j : partition.blocks[l]) sum += std::abs(beta[j]);
    out[static_cast<Eigen::Index>(l)] = sum;
  }
  return out;
}

std::pair<int, int> ContiguousPartition::block(int l) const {
  const int begin = (l == 0) ? 0 : cuts[l - 1];
  const int end = (l == block_count() - 1) ? n : cuts[l];
  return {begin, end};
}

std::vector<std::pair<int, int>> ContiguousPartition::blocks() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(block_count());
  for (int l = 0; l < block_count(); ++l) out.push_back(block(l));
  return out;
}

}  // namespace structpen
