#pragma once

#include <functional>

#include "structpen/core.hpp"
#include "structpen/penalties.hpp"
#include "structpen/tree.hpp"

namespace structpen {
namespace oracle {

/// Outcome of a full enumeration: the unique feasible structure, the value
/// computed from its blocks, and how many candidate structures passed the
/// certificate check (exactly one, when the implementations agree).
struct WedgeEnumeration {
  PenaltyResult result;
  ContiguousPartition partition;
  int feasible_count = 0;
};

struct TreeEnumeration {
  PenaltyResult result;
  TreeCut cut;
  int feasible_count = 0;
};

/// Enumerates all 2^(n-1) contiguous partitions and selects the feasible one
/// by the certificate check. beta must have no zero entries; n <= 20.
WedgeEnumeration wedge_enumerate(const Vector& beta);
PenaltyResult wedge_bruteforce(const Vector& beta);

/// Enumerates all 2^|E| cuts of the tree. beta nonzero; |E| <= 18.
TreeEnumeration tree_enumerate(const Vector& beta, const RootedTree& tree);
PenaltyResult tree_bruteforce(const Vector& beta, const RootedTree& tree);

struct ReferenceConfig {
  double tol = 1e-10;    // relative objective-change stopping test
  int max_iter = 200000;
  double floor = 1e-9;   // lower bound on lambda during the descent
};

/// Independent minimization path for the cone penalty: projected gradient
/// descent on Gamma(beta, .), with the Euclidean projection onto
/// {A lambda >= 0, lambda >= floor} computed by Dykstra's alternating
/// projections and the step size controlled by backtracking.
PenaltyResult numeric_reference(const Vector& beta, const ConeSpec& cone,
                                const ReferenceConfig& cfg = {});

/// Central differences (omega(b + h e_i) - omega(b - h e_i)) / (2h).
/// Requires min |beta_i| >= 10 h.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& omega,
                            const Vector& beta, double h);

}  // namespace oracle
}  // namespace structpen
