#pragma once

#include <functional>
#include <stdexcept>

#include "structpen/core.hpp"

namespace structpen {

/// Thrown when an iterative routine exhausts its iteration budget.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a cone has no strictly feasible point.
struct InfeasibleConeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Box

/// Per-coordinate interval constraints 0 <= a_i <= b_i on the auxiliary
/// vector. a_i = 0 is handled by continuous extension.
struct Box {
  Vector a;
  Vector b;

  void validate() const;
};

/// Closed-form box penalty:
///   omega  = ||beta||_1 + sum_i [ (a_i-|b_i|)_+^2/(2a_i) + (|b_i|-b_i)_+^2/(2b_i) ]
///   lambda = clamp(|beta|, a, b)
/// Terms with a_i = 0 vanish. If b_i = 0 and beta_i != 0 the value is +inf.
PenaltyResult box_penalty(const Vector& beta, const Box& box);

// ---------------------------------------------------------------------------
// Wedge

/// KKT multipliers and the candidate minimizer for a contiguous partition.
/// zeta has n+1 entries indexed 0..n, zero at 0, n and at the cut points;
/// delta is constant on each block.
struct WedgeCertificates {
  Vector zeta;
  Vector delta;
  bool feasible = false;
};

/// Penalty for the cone of positive nonincreasing vectors. Returns the
/// value sum_l sqrt(|J_l|)*||beta|J_l||_2 over the optimal contiguous
/// partition (the witness), with lambda constant on each block. Runs in
/// O(n) time via the stack-based merge of adjacent blocks.
PenaltyResult wedge_penalty(const Vector& beta);

/// Certificates for a candidate partition. beta must have no zero entries.
/// feasible = (zeta >= 0 and the block means of squares strictly decrease).
WedgeCertificates wedge_certificates(const Vector& beta,
                                     const ContiguousPartition& partition);

// ---------------------------------------------------------------------------
// Polyhedral cones

/// Constraint matrix A defining the cone {lambda > 0 : A lambda >= 0}.
/// A may have zero rows, in which case the cone is the positive orthant.
struct ConeSpec {
  Matrix A;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }
};

/// Difference matrix of the k-th order wedge W^k: row j encodes
/// lambda_{j+k} + sum_{l=1..k} (-1)^l C(k,l) lambda_{j+k-l} >= 0.
/// Requires 1 <= k < n.
ConeSpec k_wedge_matrix(int n, int k);

/// First-difference cone lambda_j - lambda_{j+1} >= 0 (the wedge itself,
/// as a ConeSpec for the numeric paths).
ConeSpec wedge_cone(int n);

struct ConeSolveConfig {
  double tol = 1e-8;           // target accuracy of omega
  int max_newton = 200000;     // total Newton step budget
  double barrier_t0 = 1.0;     // initial barrier weight
  double barrier_tmin = 1e-10; // final barrier weight
  double floor_start = 1e-2;   // floor continuation start
  double floor_min = 1e-10;    // final floor
  bool floor_continuation = true;
};

/// Numeric evaluation of the penalty over an arbitrary polyhedral cone by a
/// log-barrier interior-point method on A*lambda >= 0 and lambda >= floor,
/// with the floor lowered geometrically to approach closure minimizers.
PenaltyResult cone_penalty_numeric(const Vector& beta, const ConeSpec& cone,
                                   const ConeSolveConfig& cfg = {});

/// Phase-I: a point with lambda > 0 and A*lambda > 0, found from a handful
/// of canonical profiles or, failing那, by maximizing the slack margin.
/// Throws InfeasibleConeError when the maximal margin is <= 0.
Vector cone_strictly_feasible_point(const ConeSpec& cone);

/// Warm-startable barrier minimizer of Gamma(phi, .) over the cone; keeps
/// per-instance workspace so repeated calls (as in the alternating solver)
/// reuse the previous solution. Not safe to share across threads.
class ConeEvaluator {
 public:
  ConeEvaluator(ConeSpec cone, ConeSolveConfig cfg = {});

  /// phi must be strictly positive.
  PenaltyResult minimize(const Vector& phi);

  const ConeSpec& cone() const { return cone_; }

 private:
  ConeSpec cone_;
  ConeSolveConfig cfg_;
  Vector warm_;
  bool has_warm_ = false;
};

// ---------------------------------------------------------------------------
// Group lasso and composition

/// Normalized group lasso sum_l sqrt(|J_l|) * ||beta|J_l||_2.
double group_lasso_penalty(const Vector& beta, const GroupPartition& partition);

/// Minimizer of the group-constant constraint set: lambda_j = ||beta|J_l||_2
/// / sqrt(|J_l|) on block l. Paired with group_lasso_penalty as a full
/// PenaltyResult.
PenaltyResult group_lasso_result(const Vector& beta,
                                 const GroupPartition& partition);

using PenaltyEvaluator = std::function<PenaltyResult(const Vector&)>;

/// Composition through the group average map: the value is the inner penalty
/// at the vector of blockwise l1 norms, and lambda splits each theta_l across
/// its block proportionally to |beta_j| (uniformly on all-zero blocks).
/// The witness is the inner witness, expressed in group indices.
PenaltyResult composite_penalty(const Vector& beta,
                                const GroupPartition& partition,
                                const PenaltyEvaluator& inner);

// ---------------------------------------------------------------------------
// Gradient and dual norm

/// Componentwise beta_i / lambda_i(beta). All lambda_i must be positive.
Vector penalty_gradient(const Vector& beta, const PenaltyResult& result);

/// Dual norm over the positive orthant: ||beta||_inf.
double dual_norm_orthant(const Vector& beta);

/// Dual norm over the wedge: max_q ||beta|{1..q}||_2 / sqrt(q).
double dual_norm_wedge(const Vector& beta);

/// Dual norm over an arbitrary cone: sup of sum lambda_i beta_i^2 over the
/// sum-one slice of the cone, solved by the barrier method, then sqrt.
double dual_norm(const Vector& beta, const ConeSpec& cone,
                 const ConeSolveConfig& cfg = {});

// ---------------------------------------------------------------------------
// Shared block statistics (also used by the brute-force oracles so the fast
// and enumerated paths agree bitwise on tied means)

namespace detail {

/// prefix[i] = sum of beta_j^2 for j < i.
std::vector<double> prefix_squares(const Vector& beta);

/// Direct left-to-right sum of beta_j^2 over [begin, end).
double direct_sumsq(const Vector& beta, int begin, int end);

/// Absolute slack on the sign check of the zeta multipliers.
inline double zeta_slack(int n) { return kTieTol * static_cast<double>(n); }

}  // namespace detail

}  // namespace structpen
