#include "structpen/penalties.hpp"

#include <cmath>
#include <limits>

namespace structpen {

namespace detail {

std::vector<double> prefix_squares(const Vector& beta) {
  std::vector<double> prefix(beta.size() + 1, 0.0);
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    prefix[i + 1] = prefix[i] + beta[i] * beta[i];
  return prefix;
}

double direct_sumsq(const Vector& beta, int begin, int end) {
  double s = 0.0;
  for (int j = begin; j < end; ++j) s += beta[j] * beta[j];
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Box

void Box::validate() const {
  check_vector(a, "box.a");
  check_vector(b, "box.b");
  require(a.size() == b.size(), "box: a and b must have equal length");
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    require(a[i] >= 0.0, "box: a must be nonnegative");
    require(a[i] <= b[i], "box: a_i > b_i");
  }
}

PenaltyResult box_penalty(const Vector& beta, const Box& box) {
  check_vector(beta, "beta");
  box.validate();
  require(beta.size() == box.a.size(), "box: dimension mismatch");

  PenaltyResult res;
  res.lambda.resize(beta.size());
  double omega = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    const double x = std::abs(beta[i]);
    const double a = box.a[i];
    const double b = box.b[i];
    res.lambda[i] = std::clamp(x, a, b);
    omega += x;
    const double below = std::max(0.0, a - x);
    if (a > 0.0) omega += below * below / (2.0 * a);
    // a = 0: (a - x)_+ = 0 whenever x >= 0, so the term vanishes.
    const double above = std::max(0.0, x - b);
    if (b > 0.0) {
      omega += above * above / (2.0 * b);
    } else if (x > 0.0) {
      // interval [0, 0] pins lambda_i = 0: infinite value for beta_i != 0
      omega = std::numeric_limits<double>::infinity();
    }
  }
  res.omega = omega;
  return res;
}

// ---------------------------------------------------------------------------
// Wedge

namespace {

struct WedgeBlock {
  int begin;
  int end;
  double sumsq;
  double mean() const { return sumsq / static_cast<double>(end - begin); }
};

// Stack-based merge of adjacent blocks. Merged sums accumulate by adding the
// two nonnegative block sums (never by differencing running prefixes, which
// loses all precision on a tiny block that follows large entries).
std::vector<WedgeBlock> wedge_merge(const Vector& beta) {
  const int n = static_cast<int>(beta.size());
  std::vector<WedgeBlock> stack;
  stack.reserve(16);
  for (int t = 0; t < n; ++t) {
    stack.push_back({t, t + 1, beta[t] * beta[t]});
    while (stack.size() >= 2 &&
           !strictly_greater(stack[stack.size() - 2].mean(),
                             stack.back().mean())) {
      WedgeBlock top = stack.back();
      stack.pop_back();
      WedgeBlock& prev = stack.back();
      prev.end = top.end;
      prev.sumsq += top.sumsq;
    }
  }
  return stack;
}

}  // namespace

PenaltyResult wedge_penalty(const Vector& beta) {
  check_vector(beta, "beta");
  const int n = static_cast<int>(beta.size());
  const auto blocks = wedge_merge(beta);

  PenaltyResult res;
  res.lambda.resize(n);
  ContiguousPartition part;
  part.n = n;
  double omega = 0.0;
  for (const auto& blk : blocks) {
    if (blk.end < n) part.cuts.push_back(blk.end);
    const double s = detail::direct_sumsq(beta, blk.begin, blk.end);
    const double len = static_cast<double>(blk.end - blk.begin);
    omega += std::sqrt(len * s);
    const double mu = std::sqrt(s / len);
    for (int j = blk.begin; j < blk.end; ++j) res.lambda[j] = mu;
  }
  res.omega = omega;
  res.witness = std::move(part);
  return res;
}

WedgeCertificates wedge_certificates(const Vector& beta,
                                     const ContiguousPartition& partition) {
  check_vector(beta, "beta");
  const int n = static_cast<int>(beta.size());
  require(partition.n == n, "certificates: partition size mismatch");
  int prev = 0;
  for (int c : partition.cuts) {
    require(c > prev && c < n, "certificates: invalid cut points");
    prev = c;
  }
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta[i] == 0.0)
      throw std::domain_error("certificates: beta must have no zero entries");

  const auto prefix = detail::prefix_squares(beta);
  WedgeCertificates cert;
  cert.zeta = Vector::Zero(n + 1);
  cert.delta.resize(n);
  cert.feasible = true;

  const double slack = detail::zeta_slack(n);
  double prev_mean = 0.0;
  for (int l = 0; l < partition.block_count(); ++l) {
    const auto [b, e] = partition.block(l);
    const double len = static_cast<double>(e - b);
    const double sumsq = prefix[e] - prefix[b];
    const double mean = sumsq / len;
    const double mu = std::sqrt(mean);
    for (int j = b; j < e; ++j) cert.delta[j] = mu;
    // zeta_q for interior boundaries q of the block (1-based q = b+1 .. e-1)
    for (int q = b + 1; q < e; ++q) {
      const double head = prefix[q] - prefix[b];
      const double z = static_cast<double>(q - b) - len * head / sumsq;
      cert.zeta[q] = z;
      if (z < -slack) cert.feasible = false;
    }
    if (l > 0 && !strictly_greater(prev_mean, mean)) cert.feasible = false;
    prev_mean = mean;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Cone matrices

ConeSpec k_wedge_matrix(int n, int k) {
  require(k >= 1, "k_wedge_matrix: k must be >= 1");
  require(k < n, "k_wedge_matrix: k must be < n");
  // binomial row C(k, 0..k)
  std::vector<double> binom(k + 1, 1.0);
  for (int i = 1; i <= k; ++i)
    binom[i] = binom[i - 1] * static_cast<double>(k - i + 1) /
               static_cast<double>(i);
  ConeSpec cone;
  cone.A = Matrix::Zero(n - k, n);
  for (int j = 0; j < n - k; ++j)
    for (int i = 0; i <= k; ++i) {
      const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
      cone.A(j, j + i) = sign * binom[i];
    }
  return cone;
}

ConeSpec wedge_cone(int n) {
  require(n >= 1, "wedge_cone: n must be >= 1");
  ConeSpec cone;
  cone.A = Matrix::Zero(std::max(0, n - 1), n);
  for (int j = 0; j + 1 < n; ++j) {
    cone.A(j, j) = 1.0;
    cone.A(j, j + 1) = -1.0;
  }
  return cone;
}

// ---------------------------------------------------------------------------
// Group lasso and composition

double group_lasso_penalty(const Vector& beta,
                           const GroupPartition& partition) {
  check_vector(beta, "beta");
  partition.validate(static_cast<int>(beta.size()));
  double omega = 0.0;
  for (const auto& block : partition.blocks) {
    double sumsq = 0.0;
    for (int j : block) sumsq += beta[j] * beta[j];
    omega += std::sqrt(static_cast<double>(block.size()) * sumsq);
  }
  return omega;
}

PenaltyResult group_lasso_result(const Vector& beta,
                                 const GroupPartition& partition) {
  check_vector(beta, "beta");
  partition.validate(static_cast<int>(beta.size()));
  PenaltyResult res;
  res.lambda.resize(beta.size());
  double omega = 0.0;
  for (const auto& block : partition.blocks) {
    double sumsq = 0.0;
    for (int j : block) sumsq += beta[j] * beta[j];
    const double len = static_cast<double>(block.size());
    omega += std::sqrt(len * sumsq);
    const double theta = std::sqrt(sumsq / len);
    for (int j : block) res.lambda[j] = theta;
  }
  res.omega = omega;
  return res;
}

PenaltyResult composite_penalty(const Vector& beta,
                                const GroupPartition& partition,
                                const PenaltyEvaluator& inner) {
  const Vector theta_arg = group_average_map(beta, partition);
  const PenaltyResult inner_res = inner(theta_arg);
  require(inner_res.lambda.size() == theta_arg.size(),
          "composite: inner lambda has wrong length");

  PenaltyResult res;
  res.omega = inner_res.omega;
  res.lambda.resize(beta.size());
  for (std::size_t l = 0; l < partition.blocks.size(); ++l) {
    const auto& block = partition.blocks[l];
    const double theta = inner_res.lambda[static_cast<Eigen::Index>(l)];
    const double sum = theta_arg[static_cast<Eigen::Index>(l)];
    if (sum > 0.0) {
      for (int j : block) res.lambda[j] = theta * std::abs(beta[j]) / sum;
    } else {
      // all-zero block: any split attains the same value; use the uniform one
      for (int j : block)
        res.lambda[j] = theta / static_cast<double>(block.size());
    }
  }
  res.witness = inner_res.witness;  // structure in group indices
  return res;
}

// ---------------------------------------------------------------------------
// Gradient and dual norm closed forms

Vector penalty_gradient(const Vector& beta, const PenaltyResult& result) {
  check_vector(beta, "beta");
  require(result.lambda.size() == beta.size(),
          "gradient: lambda length mismatch");
  Vector grad(beta.size());
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (result.lambda[i] <= 0.0)
      throw std::domain_error("gradient: lambda_i = 0, not differentiable");
    grad[i] = beta[i] / result.lambda[i];
  }
  return grad;
}

double dual_norm_orthant(const Vector& beta) {
  check_vector(beta, "beta");
  return beta.lpNorm<Eigen::Infinity>();
}

double dual_norm_wedge(const Vector& beta) {
  check_vector(beta, "beta");
  const auto prefix = detail::prefix_squares(beta);
  double best = 0.0;
  for (int q = 1; q <= static_cast<int>(beta.size()); ++q)
    best = std::max(best, prefix[q] / static_cast<double>(q));
  return std::sqrt(best);
}

}  // namespace structpen
