#pragma once

#include <memory>
#include <string>
#include <vector>

#include "structpen/core.hpp"
#include "structpen/penalties.hpp"
#include "structpen/tree.hpp"

namespace structpen {

/// Penalized least-squares instance: min ||X b - y||^2 + 2 rho Omega(b).
struct Problem {
  Matrix X;
  Vector y;
  double rho = 1.0;

  void validate() const;
  int rows() const { return static_cast<int>(X.rows()); }
  int cols() const { return static_cast<int>(X.cols()); }
};

std::vector<double> default_eps_schedule();  // 1e-2 .. 1e-12, factor 10

struct SolverConfig {
  std::vector<double> eps_schedule = default_eps_schedule();
  double tol = 1e-10;  // relative objective-change convergence test
  int max_iter = 5000; // per epsilon stage

  void validate() const;
};

struct TraceRecord {
  int iter;          // global iteration counter
  double eps;
  double objective;  // smoothed objective after the full iteration
  double l1;         // ||beta||_1
  double omega;      // penalty value at the smoothed iterate
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  /// Smoothed objective after the beta half-step, before the lambda update;
  /// aligned with records. Entry is +inf when the previous lambda had zeros.
  std::vector<double> half_objectives;
};

/// Result of one exact minimization of the joint surrogate over the penalty
/// structure at a strictly positive point phi. linear_term is the value L
/// such that the surrogate at any other positive phi' under this state is
/// 0.5 * (sum phi'_i^2 / lambda_i + L); for the Omega(.|Lambda) family it is
/// simply sum lambda_i.
struct LambdaStep {
  Vector lambda;
  double penalty_value;
  double linear_term;
};

class PenaltyModel {
 public:
  virtual ~PenaltyModel() = default;
  virtual std::string name() const = 0;
  /// phi must be strictly positive.
  virtual LambdaStep lambda_step(const Vector& phi) = 0;
  /// Exact penalty value at beta (zeros allowed).
  virtual double omega(const Vector& beta) = 0;
};

struct SolveResult {
  Vector beta;
  Vector lambda;
  double objective = 0.0;  // ||X b - y||^2 + 2 rho Omega(b) at the result
  bool converged = false;
  int iterations = 0;
  SolverTrace trace;
};

/// Ridge step b(lambda) = diag(lambda) X^T (X diag(lambda) X^T + rho I)^-1 y,
/// solved on the smaller of the m x m / n x n systems. lambda_i = 0 forces
/// b_i = 0 exactly.
Vector tikhonov_step(const Problem& prob, const Vector& lambda);

/// H(lambda) = rho y^T (X diag(lambda) X^T + rho I)^-1 y + rho sum lambda_i.
double dual_objective(const Problem& prob, const Vector& lambda);

double objective(const Problem& prob, const Vector& beta, double omega_value);
double objective(const Problem& prob, const Vector& beta, PenaltyModel& penalty);

/// Alternating minimization with epsilon continuation: within each stage,
/// iterate the Tikhonov step against the exact lambda map of the smoothed
/// iterate until the relative objective change drops below tol; each stage
/// warm-starts the next. The returned beta is the Tikhonov step at the final
/// lambda, so zero lambda entries transfer to beta exactly.
SolveResult alternating_solve(const Problem& prob, PenaltyModel& penalty,
                              const SolverConfig& cfg = {});

enum class OrthogonalKind { lasso, wedge };

struct OrthogonalSolution {
  Vector beta;
  Vector lambda;
};

/// Closed-form solution of min ||b - y||^2 + 2 rho Omega(b): soft
/// thresholding for the lasso, shrink-the-wedge-minimizer for the wedge.
/// For a design with X^T X = I, pass X^T y in place of y.
OrthogonalSolution orthogonal_solve(const Vector& y, double rho,
                                    OrthogonalKind kind);

// Penalty models for the supported constraint families.
std::unique_ptr<PenaltyModel> make_lasso_model();
std::unique_ptr<PenaltyModel> make_box_model(Box box);
std::unique_ptr<PenaltyModel> make_wedge_model();
std::unique_ptr<PenaltyModel> make_tree_model(RootedTree tree);
std::unique_ptr<PenaltyModel> make_group_lasso_model(GroupPartition partition);
/// Wedge applied to blockwise l1 sums through the group average map.
std::unique_ptr<PenaltyModel> make_composite_wedge_model(GroupPartition partition);
/// Numeric barrier model for an arbitrary polyhedral cone (owns warm-start
/// state; one instance per concurrent solve).
std::unique_ptr<PenaltyModel> make_cone_model(ConeSpec cone,
                                              ConeSolveConfig cfg = {});
std::unique_ptr<PenaltyModel> make_kwedge_model(int n, int k,
                                                ConeSolveConfig cfg = {});

}  // namespace structpen
