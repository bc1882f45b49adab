#include "structpen/solver.hpp"

#include <cmath>
#include <limits>

namespace structpen {

void Problem::validate() const {
  check_matrix(X, "X");
  check_vector(y, "y");
  require(X.rows() == y.size(), "problem: X rows must match y length");
  require(X.cols() >= 1 && X.rows() >= 1, "problem: empty design");
  require(rho > 0.0, "problem: rho must be positive");
}

std::vector<double> default_eps_schedule() {
  std::vector<double> s;
  for (double eps = 1e-2; eps >= 0.99e-12; eps *= 0.1) s.push_back(eps);
  return s;
}

void SolverConfig::validate() const {
  require(!eps_schedule.empty(), "solver: empty eps schedule");
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : eps_schedule) {
    require(eps > 0.0, "solver: eps must be positive");
    require(eps < prev, "solver: eps schedule must decrease");
    prev = eps;
  }
  require(tol > 0.0, "solver: tol must be positive");
  require(max_iter >= 2, "solver: max_iter must be >= 2");
}

Vector tikhonov_step(const Problem& prob, const Vector& lambda) {
  prob.validate();
  require(lambda.size() == prob.X.cols(), "tikhonov: dimension mismatch");
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    require(lambda[i] >= 0.0, "tikhonov: lambda must be nonnegative");

  const int m = prob.rows();
  const int n = prob.cols();
  if (m <= n) {
    const Matrix XD = prob.X * lambda.asDiagonal();
    Matrix K = XD * prob.X.transpose();
    K.diagonal().array() += prob.rho;
    const Vector z = K.llt().solve(prob.y);
    return lambda.asDiagonal() * (prob.X.transpose() * z);
  }
  const Vector s = lambda.cwiseSqrt();
  const Matrix B = prob.X * s.asDiagonal();
  Matrix K = B.transpose() * B;
  K.diagonal().array() += prob.rho;
  const Vector rhs = s.cwiseProduct(prob.X.transpose() * prob.y);
  return s.cwiseProduct(K.llt().solve(rhs));
}

double dual_objective(const Problem& prob, const Vector& lambda) {
  prob.validate();
  require(lambda.size() == prob.X.cols(), "dual: dimension mismatch");
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    require(lambda[i] >= 0.0, "dual: lambda must be nonnegative");
  const Matrix XD = prob.X * lambda.asDiagonal();
  Matrix K = XD * prob.X.transpose();
  K.diagonal().array() += prob.rho;
  const Vector z = K.llt().solve(prob.y);
  return prob.rho * (prob.y.dot(z) + lambda.sum());
}

double objective(const Problem& prob, const Vector& beta, double omega_value) {
  require(beta.size() == prob.X.cols(), "objective: dimension mismatch");
  return (prob.X * beta - prob.y).squaredNorm() + 2.0 * prob.rho * omega_value;
}

double objective(const Problem& prob, const Vector& beta,
                 PenaltyModel& penalty) {
  return objective(prob, beta, penalty.omega(beta));
}

SolveResult alternating_solve(const Problem& prob, PenaltyModel& penalty,
                              const SolverConfig& cfg) {
  prob.validate();
  cfg.validate();

  const int n = prob.cols();
  const double scale = (prob.X.transpose() * prob.y).lpNorm<Eigen::Infinity>();
  Vector lambda = Vector::Constant(n, scale > 0.0 ? scale : 1.0);
  double linear_prev = lambda.sum();

  SolveResult out;
  out.converged = true;
  int iter = 0;
  Vector beta;

  for (double eps : cfg.eps_schedule) {
    double prev_obj = std::numeric_limits<double>::infinity();
    bool stage_done = false;
    for (int it = 0; it < cfg.max_iter; ++it) {
      beta = tikhonov_step(prob, lambda);
      const Vector phi = phi_eps(beta, eps);
      const double fit = (prob.X * beta - prob.y).squaredNorm();

      double half = 0.0;  // surrogate against the previous state
      for (Eigen::Index i = 0; i < phi.size(); ++i) {
        if (lambda[i] > 0.0)
          half += phi[i] * phi[i] / lambda[i];
        else
          half = std::numeric_limits<double>::infinity();
      }
      half = fit + prob.rho * (half + linear_prev);

      LambdaStep step = penalty.lambda_step(phi);
      lambda = std::move(step.lambda);
      linear_prev = step.linear_term;
      const double obj = fit + 2.0 * prob.rho * step.penalty_value;

      ++iter;
      out.trace.records.push_back(
          {iter, eps, obj, beta.lpNorm<1>(), step.penalty_value});
      out.trace.half_objectives.push_back(half);

      if (it >= 1 &&
          std::abs(prev_obj - obj) <= cfg.tol * std::max(1.0, std::abs(prev_obj))) {
        stage_done = true;
        break;
      }
      prev_obj = obj;
    }
    if (!stage_done) out.converged = false;
  }

  out.beta = tikhonov_step(prob, lambda);  // transfers lambda zeros exactly
  out.lambda = std::move(lambda);
  out.iterations = iter;
  out.objective = objective(prob, out.beta, penalty.omega(out.beta));
  return out;
}

OrthogonalSolution orthogonal_solve(const Vector& y, double rho,
                                    OrthogonalKind kind) {
  check_vector(y, "y");
  require(rho > 0.0, "orthogonal_solve: rho must be positive");
  OrthogonalSolution sol;
  sol.lambda.resize(y.size());
  sol.beta.resize(y.size());
  if (kind == OrthogonalKind::lasso) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double l = std::max(0.0, std::abs(y[i]) - rho);
      sol.lambda[i] = l;
      sol.beta[i] = (y[i] > 0 ? 1.0 : -1.0) * l;
    }
    return sol;
  }
  const PenaltyResult wedge = wedge_penalty(y);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double l = std::max(0.0, wedge.lambda[i] - rho);
    sol.lambda[i] = l;
    sol.beta[i] = l * y[i] / (l + rho);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Penalty models

namespace {

class LassoModel final : public PenaltyModel {
 public:
  std::string name() const override { return "lasso"; }
  LambdaStep lambda_step(const Vector& phi) override {
    return {phi, phi.sum(), phi.sum()};
  }
  double omega(const Vector& beta) override { return l1_norm(beta); }
};

class BoxModel final : public PenaltyModel {
 public:
  explicit BoxModel(Box box) : box_(std::move(box)) { box_.validate(); }
  std::string name() const override { return "box"; }
  LambdaStep lambda_step(const Vector& phi) override {
    PenaltyResult res = box_penalty(phi, box_);
    const double linear = res.lambda.sum();
    return {std::move(res.lambda), res.omega, linear};
  }
  double omega(const Vector& beta) override {
    return box_penalty(beta, box_).omega;
  }

 private:
  Box box_;
};

class WedgeModel final : public PenaltyModel {
 public:
  std::string name() const override { return "wedge"; }
  LambdaStep lambda_step(const Vector& phi) override {
    PenaltyResult res = wedge_penalty(phi);
    const double linear = res.lambda.sum();
    return {std::move(res.lambda), res.omega, linear};
  }
  double omega(const Vector& beta) override {
    return wedge_penalty(beta).omega;
  }
};

class TreeModel final : public PenaltyModel {
 public:
  explicit TreeModel(RootedTree tree) : tree_(std::move(tree)) {}
  std::string name() const override { return "tree"; }
  LambdaStep lambda_step(const Vector& phi) override {
    PenaltyResult res = tree_penalty(phi, tree_);
    const double linear = res.lambda.sum();
    return {std::move(res.lambda), res.omega, linear};
  }
  double omega(const Vector& beta) override {
    return tree_penalty(beta, tree_).omega;
  }

 private:
  RootedTree tree_;
};

class GroupLassoModel final : public PenaltyModel {
 public:
  explicit GroupLassoModel(GroupPartition partition)
      : partition_(std::move(partition)) {}
  std::string name() const override { return "group-lasso"; }
  LambdaStep lambda_step(const Vector& phi) override {
    PenaltyResult res = group_lasso_result(phi, partition_);
    const double linear = res.lambda.sum();
    return {std::move(res.lambda), res.omega, linear};
  }
  double omega(const Vector& beta) override {
    return group_lasso_penalty(beta, partition_);
  }

 private:
  GroupPartition partition_;
};

class CompositeWedgeModel final : public PenaltyModel {
 public:
  explicit CompositeWedgeModel(GroupPartition partition)
      : partition_(std::move(partition)) {}
  std::string name() const override { return "composite-wedge"; }
  LambdaStep lambda_step(const Vector& phi) override {
    PenaltyResult res = composite_penalty(phi, partition_, wedge_penalty);
    const double linear = res.lambda.sum();
    return {std::move(res.lambda), res.omega, linear};
  }
  double omega(const Vector& beta) override {
    return composite_penalty(beta, partition_, wedge_penalty).omega;
  }

 private:
  GroupPartition partition_;
};

class ConeModel final : public PenaltyModel {
 public:
  ConeModel(ConeSpec cone, ConeSolveConfig cfg)
      : cfg_(cfg), evaluator_(std::move(cone), cfg) {}
  std::string name() const override { return "cone"; }
  LambdaStep lambda_step(const Vector& phi) override {
    PenaltyResult res = evaluator_.minimize(phi);
    const double linear = res.lambda.sum();
    return {std::move(res.lambda), res.omega, linear};
  }
  double omega(const Vector& beta) override {
    return cone_penalty_numeric(beta, evaluator_.cone(), cfg_).omega;
  }

 private:
  ConeSolveConfig cfg_;
  ConeEvaluator evaluator_;
};

}  // namespace

std::unique_ptr<PenaltyModel> make_lasso_model() {
  return std::make_unique<LassoModel>();
}
std::unique_ptr<PenaltyModel> make_box_model(Box box) {
  return std::make_unique<BoxModel>(std::move(box));
}
std::unique_ptr<PenaltyModel> make_wedge_model() {
  return std::make_unique<WedgeModel>();
}
std::unique_ptr<PenaltyModel> make_tree_model(RootedTree tree) {
  return std::make_unique<TreeModel>(std::move(tree));
}
std::unique_ptr<PenaltyModel> make_group_lasso_model(GroupPartition partition) {
  return std::make_unique<GroupLassoModel>(std::move(partition));
}
std::unique_ptr<PenaltyModel> make_composite_wedge_model(
    GroupPartition partition) {
  return std::make_unique<CompositeWedgeModel>(std::move(partition));
}
std::unique_ptr<PenaltyModel> make_cone_model(ConeSpec cone,
                                              ConeSolveConfig cfg) {
  return std::make_unique<ConeModel>(std::move(cone), cfg);
}
std::unique_ptr<PenaltyModel> make_kwedge_model(int n, int k,
                                                ConeSolveConfig cfg) {
  return std::make_unique<ConeModel>(k_wedge_matrix(n, k), cfg);
}

}  // namespace structpen
