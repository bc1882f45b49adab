#include "structpen/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace structpen {
namespace bench {

int Rng::uniform_int(int lo, int hi) {
  require(lo <= hi, "uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * f;
  has_cached_ = true;
  return u * f;
}

Matrix generate_design(int m, int n, Rng& rng) {
  require(m >= 1 && n >= 1, "generate_design: sizes must be >= 1");
  Matrix X(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) X(i, j) = rng.normal();
  for (int j = 0; j < n; ++j) {
    const double norm = X.col(j).norm();
    if (norm > 0.0) X.col(j) /= norm;
  }
  return X;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "box10") return ModelKind::box10;
  if (name == "wedge10") return ModelKind::wedge10;
  if (name == "wedge10-perturbed") return ModelKind::wedge10_perturbed;
  if (name == "composite6") return ModelKind::composite6;
  if (name == "poly1") return ModelKind::poly1;
  if (name == "poly2") return ModelKind::poly2;
  if (name == "poly3") return ModelKind::poly3;
  if (name == "poly4") return ModelKind::poly4;
  if (name == "poly-random1") return ModelKind::poly_random1;
  if (name == "poly-random2") return ModelKind::poly_random2;
  if (name == "poly-random3") return ModelKind::poly_random3;
  if (name == "poly-random4") return ModelKind::poly_random4;
  throw std::invalid_argument("unknown model kind: " + name);
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::box10: return "box10";
    case ModelKind::wedge10: return "wedge10";
    case ModelKind::wedge10_perturbed: return "wedge10-perturbed";
    case ModelKind::composite6: return "composite6";
    case ModelKind::poly1: return "poly1";
    case ModelKind::poly2: return "poly2";
    case ModelKind::poly3: return "poly3";
    case ModelKind::poly4: return "poly4";
    case ModelKind::poly_random1: return "poly-random1";
    case ModelKind::poly_random2: return "poly-random2";
    case ModelKind::poly_random3: return "poly-random3";
    case ModelKind::poly_random4: return "poly-random4";
  }
  throw std::invalid_argument("unknown model kind");
}

namespace {

std::vector<int> sample_distinct(int count, int lo, int hi, Rng& rng) {
  std::vector<int> pool(hi - lo + 1);
  std::iota(pool.begin(), pool.end(), lo);
  require(count <= static_cast<int>(pool.size()),
          "sample_distinct: range too small");
  for (int i = 0; i < count; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

double poly_value(int degree, double t) {
  switch (degree) {
    case 1: return -(t + 5.0);
    case 2: return (t + 6.0) * (t - 2.0);
    case 3: return -(t + 6.5) * t * (t - 1.5);
    case 4: return (t + 6.5) * (t - 2.5) * (t + 1.0) * t;
  }
  throw std::invalid_argument("poly degree out of range");
}

Vector poly_model(int degree, int n, bool randomized, Rng& rng) {
  // the protocol grid: 100 points spaced 0.1 starting at -7; other lengths
  // keep the range [-7, 2.9] and rescale the spacing. Components are stored
  // with t descending, which orients the magnitude profile inside the
  // matched difference cone (the degree-1 silhouette must be nondecreasing
  // to lie in W^1).
  Vector beta(n);
  const double span = 9.9;
  for (int j = 0; j < n; ++j) {
    const double t =
        -7.0 + span * static_cast<double>(n - 1 - j) / static_cast<double>(n - 1);
    beta[j] = std::max(0.0, poly_value(degree, t));
  }
  const double peak = beta.maxCoeff();
  if (peak > 0.0) beta *= 10.0 / peak;
  if (randomized) {
    for (int j = 0; j < n; ++j)
      if (beta[j] > 0.0) beta[j] = rng.uniform(1.0, 2.0);
  }
  return beta;
}

}  // namespace

Vector generate_model(ModelKind kind, int n, Rng& rng) {
  require(n >= 2, "generate_model: n too small");
  Vector beta = Vector::Zero(n);
  switch (kind) {
    case ModelKind::box10: {
      require(n >= 10, "box10 needs n >= 10");
      const auto pos = sample_distinct(10, 0, n - 1, rng);
      for (int p : pos) {
        const int magnitude = rng.uniform_int(1, 10);
        const int sign = (rng.uniform() < 0.5) ? -1 : 1;
        beta[p] = static_cast<double>(sign * magnitude);
      }
      return beta;
    }
    case ModelKind::wedge10: {
      require(n >= 10, "wedge10 needs n >= 10");
      for (int j = 0; j < 10; ++j) beta[j] = static_cast<double>(10 - j);
      return beta;
    }
    case ModelKind::wedge10_perturbed: {
      require(n > 22, "wedge10-perturbed needs n > 22");
      for (int j = 0; j < 10; ++j) beta[j] = static_cast<double>(10 - j);
      for (int p : sample_distinct(2, 20, n - 1, rng)) beta[p] = 10.0;
      return beta;
    }
    case ModelKind::composite6: {
      require(n >= 10 && n % 10 == 0, "composite6 needs n divisible by 10");
      const int blocks = n / 10;
      const int sparsity = std::min(6, blocks);
      for (int i = 0; i < sparsity; ++i) {
        const int p = rng.uniform_int(10 * i, 10 * i + 9);
        beta[p] = static_cast<double>(30 - i);
      }
      return beta;
    }
    case ModelKind::poly1: return poly_model(1, n, false, rng);
    case ModelKind::poly2: return poly_model(2, n, false, rng);
    case ModelKind::poly3: return poly_model(3, n, false, rng);
    case ModelKind::poly4: return poly_model(4, n, false, rng);
    case ModelKind::poly_random1: return poly_model(1, n, true, rng);
    case ModelKind::poly_random2: return poly_model(2, n, true, rng);
    case ModelKind::poly_random3: return poly_model(3, n, true, rng);
    case ModelKind::poly_random4: return poly_model(4, n, true, rng);
  }
  throw std::invalid_argument("unknown model kind");
}

Box box_from_oracle(const Vector& beta_star, double r, BoxBoundsMode mode) {
  check_vector(beta_star, "beta_star");
  require(r >= 0.0, "box_from_oracle: r must be nonnegative");
  Box box;
  box.a.resize(beta_star.size());
  box.b.resize(beta_star.size());
  for (Eigen::Index i = 0; i < beta_star.size(); ++i) {
    const double mag = std::abs(beta_star[i]);
    if (mode == BoxBoundsMode::repaired) {
      box.a[i] = std::max(0.0, mag - r);
      box.b[i] = mag + r;
    } else {
      box.a[i] = std::max(0.0, r - mag);
      box.b[i] = std::max(0.0, mag - r);
    }
  }
  return box;
}

double model_error(const Vector& beta_hat, const Vector& beta_star) {
  check_vector(beta_hat, "beta_hat");
  check_vector(beta_star, "beta_star");
  require(beta_hat.size() == beta_star.size(), "model_error: length mismatch");
  const double denom = beta_star.squaredNorm();
  require(denom > 0.0, "model_error: beta_star must be nonzero");
  return (beta_hat - beta_star).squaredNorm() / denom;
}

// ---------------------------------------------------------------------------
// Experiment runner

void ExperimentSpec::validate() const {
  require(trials >= 1, "experiment: trials must be >= 1");
  require(!sample_sizes.empty(), "experiment: no sample sizes");
  int prev = 0;
  for (int m : sample_sizes) {
    require(m > prev, "experiment: sample sizes must increase");
    prev = m;
  }
  require(rho > 0.0, "experiment: rho must be positive");
  require(!methods.empty(), "experiment: no methods");
  require(threads >= 1, "experiment: threads must be >= 1");
  solver.validate();
}

namespace {

SolverConfig bench_solver_defaults() {
  SolverConfig cfg;
  cfg.eps_schedule.clear();
  for (double eps = 1e-2; eps >= 0.99e-8; eps *= 0.1)
    cfg.eps_schedule.push_back(eps);
  cfg.tol = 1e-8;
  cfg.max_iter = 2000;
  return cfg;
}

ExperimentSpec scale_defaults(ModelKind kind, int n, int trials, int m_step,
                              int m_max) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.n = n;
  spec.trials = trials;
  for (int m = 10; m <= m_max; m += m_step) spec.sample_sizes.push_back(m);
  spec.methods = default_methods(kind);
  spec.solver = bench_solver_defaults();
  return spec;
}

}  // namespace

ExperimentSpec ExperimentSpec::desk_scale(ModelKind kind) {
  return scale_defaults(kind, 50, 20, 5, 60);
}

ExperimentSpec ExperimentSpec::full_scale(ModelKind kind) {
  return scale_defaults(kind, 100, 50, 10, 100);
}

std::vector<std::string> default_methods(ModelKind kind) {
  switch (kind) {
    case ModelKind::box10:
      return {"lasso", "box:5", "box:1", "box:0.001"};
    case ModelKind::wedge10:
    case ModelKind::wedge10_perturbed:
      return {"lasso", "wedge", "gl-lin"};
    case ModelKind::composite6:
      return {"lasso", "cwedge", "gl-ind", "gl-hie", "gl-con"};
    case ModelKind::poly1:
    case ModelKind::poly_random1:
      return {"lasso", "wk:1"};
    case ModelKind::poly2:
    case ModelKind::poly_random2:
      return {"lasso", "wk:2"};
    case ModelKind::poly3:
    case ModelKind::poly_random3:
      return {"lasso", "wk:3"};
    case ModelKind::poly4:
    case ModelKind::poly_random4:
      return {"lasso", "wk:4"};
  }
  throw std::invalid_argument("unknown model kind");
}

namespace {

class OverlappingGroupModel final : public PenaltyModel {
 public:
  OverlappingGroupModel(std::vector<std::vector<int>> groups, int n,
                        std::string name)
      : groups_(std::move(groups)), n_(n), name_(std::move(name)) {
    std::vector<char> covered(n_, 0);
    for (const auto& g : groups_) {
      require(!g.empty(), name_ + ": empty group");
      for (int j : g) {
        require(j >= 0 && j < n_, name_ + ": index out of range");
        covered[j] = 1;
      }
    }
    for (int j = 0; j < n_; ++j)
      require(covered[j], name_ + ": uncovered index");
  }

  std::string name() const override { return name_; }

  // eta_g = ||phi_g||_2 minimizes sum_g(||phi_g||^2/eta_g + eta_g)/2; the
  // implied per-coordinate weights 1/lambda_i = sum_{g : i in g} 1/eta_g
  // drive the Tikhonov step, and the linear term is sum_g eta_g.
  LambdaStep lambda_step(const Vector& phi) override {
    Vector inv = Vector::Zero(n_);
    double linear = 0.0;
    double value = 0.0;
    for (const auto& g : groups_) {
      double sumsq = 0.0;
      for (int j : g) sumsq += phi[j] * phi[j];
      const double eta = std::sqrt(sumsq);
      linear += eta;
      value += eta;
      for (int j : g) inv[j] += 1.0 / eta;
    }
    LambdaStep step;
    step.lambda = inv.cwiseInverse();
    step.penalty_value = value;
    step.linear_term = linear;
    return step;
  }

  double omega(const Vector& beta) override {
    double value = 0.0;
    for (const auto& g : groups_) {
      double sumsq = 0.0;
      for (int j : g) sumsq += beta[j] * beta[j];
      value += std::sqrt(sumsq);
    }
    return value;
  }

 private:
  std::vector<std::vector<int>> groups_;
  int n_;
  std::string name_;
};

std::vector<std::vector<int>> hierarchical_tail_groups(int n) {
  std::vector<std::vector<int>> groups;
  for (int l = 0; l < n; ++l) {
    std::vector<int> g;
    for (int j = l; j < n; ++j) g.push_back(j);
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<std::vector<int>> block_tail_groups(int n, int block) {
  std::vector<std::vector<int>> groups;
  for (int start = 0; start < n; start += block) {
    std::vector<int> g;
    for (int j = start; j < n; ++j) g.push_back(j);
    groups.push_back(std::move(g));
  }
  return groups;
}

// all runs of q in 1..block-1 consecutive indices at the start or the end of
// each block (the contiguous-pattern baseline; 180 groups at n = 100)
std::vector<std::vector<int>> contiguous_edge_groups(int n, int block) {
  std::vector<std::vector<int>> groups;
  for (int start = 0; start < n; start += block) {
    const int end = std::min(n, start + block);
    for (int q = 1; q < block; ++q) {
      if (start + q <= end) {
        std::vector<int> g;
        for (int j = start; j < start + q; ++j) g.push_back(j);
        groups.push_back(std::move(g));
      }
      if (end - q >= start) {
        std::vector<int> g;
        for (int j = end - q; j < end; ++j) g.push_back(j);
        groups.push_back(std::move(g));
      }
    }
  }
  return groups;
}

}  // namespace

std::unique_ptr<PenaltyModel> make_overlapping_group_model(
    std::vector<std::vector<int>> groups, int n, std::string name) {
  return std::make_unique<OverlappingGroupModel>(std::move(groups), n,
                                                 std::move(name));
}

std::unique_ptr<PenaltyModel> make_method_model(const std::string& descriptor,
                                                const Vector& beta_star,
                                                const ExperimentSpec& spec) {
  const int n = spec.n;
  if (descriptor == "lasso") return make_lasso_model();
  if (descriptor == "wedge") return make_wedge_model();
  if (descriptor == "cwedge")
    return make_composite_wedge_model(GroupPartition::contiguous(n, 10));
  if (descriptor == "gl-ind")
    return make_group_lasso_model(GroupPartition::contiguous(n, 10));
  if (descriptor == "gl-lin")
    return make_overlapping_group_model(hierarchical_tail_groups(n), n,
                                        descriptor);
  if (descriptor == "gl-hie")
    return make_overlapping_group_model(block_tail_groups(n, 10), n,
                                        descriptor);
  if (descriptor == "gl-con")
    return make_overlapping_group_model(contiguous_edge_groups(n, 10), n,
                                        descriptor);
  if (descriptor.rfind("box:", 0) == 0) {
    const double r = std::stod(descriptor.substr(4));
    return make_box_model(box_from_oracle(beta_star, r, spec.box_mode));
  }
  if (descriptor.rfind("wk:", 0) == 0) {
    const int k = std::stoi(descriptor.substr(3));
    ConeSolveConfig cone_cfg;
    cone_cfg.tol = std::min(1e-8, spec.solver.tol);
    return make_kwedge_model(n, k, cone_cfg);
  }
  throw std::invalid_argument("unknown method descriptor: " + descriptor);
}

namespace {

void run_trial(const ExperimentSpec& spec, int trial,
               ExperimentResult& result) {
  Rng rng(spec.seed ^ static_cast<std::uint64_t>(trial));
  const Vector beta_star = generate_model(spec.kind, spec.n, rng);
  for (std::size_t mi = 0; mi < spec.sample_sizes.size(); ++mi) {
    const int m = spec.sample_sizes[mi];
    const Matrix X = generate_design(m, spec.n, rng);
    Problem prob{X, X * beta_star, spec.rho};
    for (std::size_t me = 0; me < spec.methods.size(); ++me) {
      double err = std::numeric_limits<double>::quiet_NaN();
      char ok = 0;
      try {
        auto model = make_method_model(spec.methods[me], beta_star, spec);
        const SolveResult sol = alternating_solve(prob, *model, spec.solver);
        err = model_error(sol.beta, beta_star);
        ok = sol.converged ? 1 : 0;
      } catch (const std::exception&) {
        // recorded as NaN; non-fatal per cell
      }
      result.model_errors[me][mi][trial] = err;
      result.converged[me][mi][trial] = ok;
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.methods = spec.methods;
  result.sample_sizes = spec.sample_sizes;
  result.model_errors.assign(
      spec.methods.size(),
      std::vector<std::vector<double>>(
          spec.sample_sizes.size(),
          std::vector<double>(spec.trials,
                              std::numeric_limits<double>::quiet_NaN())));
  result.converged.assign(
      spec.methods.size(),
      std::vector<std::vector<char>>(spec.sample_sizes.size(),
                                     std::vector<char>(spec.trials, 0)));

  const int workers = std::min(spec.threads, spec.trials);
  if (workers <= 1) {
    for (int t = 0; t < spec.trials; ++t) run_trial(spec, t, result);
    return result;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int t = w; t < spec.trials; t += workers)
        run_trial(spec, t, result);
    });
  }
  for (auto& th : pool) th.join();
  return result;
}

std::vector<Cell> ExperimentResult::cells() const {
  std::vector<Cell> out;
  for (std::size_t me = 0; me < methods.size(); ++me) {
    for (std::size_t mi = 0; mi < sample_sizes.size(); ++mi) {
      Cell cell;
      cell.method = methods[me];
      cell.m = sample_sizes[mi];
      double sum = 0.0;
      int count = 0;
      for (double v : model_errors[me][mi]) {
        if (std::isfinite(v)) {
          sum += v;
          ++count;
        }
      }
      cell.trials = count;
      cell.mean = (count > 0) ? sum / count : std::numeric_limits<double>::quiet_NaN();
      double var = 0.0;
      for (double v : model_errors[me][mi])
        if (std::isfinite(v)) var += (v - cell.mean) * (v - cell.mean);
      cell.stderr_mean =
          (count > 1) ? std::sqrt(var / (count - 1) / count) : 0.0;
      for (char c : converged[me][mi])
        if (!c) ++cell.nonconverged;
      out.push_back(std::move(cell));
    }
  }
  return out;
}

double ExperimentResult::mean_error(const std::string& method, int m) const {
  for (const Cell& cell : cells())
    if (cell.method == method && cell.m == m) return cell.mean;
  throw std::invalid_argument("mean_error: no such cell");
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// JSON has no NaN literal
std::string json_number(double v) {
  return std::isfinite(v) ? format_double(v) : std::string("null");
}

}  // namespace

std::string results_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "method,m,trial,model_error\n";
  for (std::size_t me = 0; me < result.methods.size(); ++me)
    for (std::size_t mi = 0; mi < result.sample_sizes.size(); ++mi)
      for (std::size_t t = 0; t < result.model_errors[me][mi].size(); ++t)
        os << result.methods[me] << ',' << result.sample_sizes[mi] << ',' << t
           << ',' << format_double(result.model_errors[me][mi][t]) << '\n';
  return os.str();
}

std::string summary_json(const ExperimentSpec& spec,
                         const ExperimentResult& result) {
  std::ostringstream os;
  os << "{\n  \"kind\": \"" << to_string(spec.kind) << "\",\n"
     << "  \"n\": " << spec.n << ",\n  \"trials\": " << spec.trials
     << ",\n  \"seed\": " << spec.seed << ",\n  \"rho\": "
     << format_double(spec.rho) << ",\n  \"cells\": [\n";
  const auto cells = result.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    os << "    {\"method\": \"" << c.method << "\", \"m\": " << c.m
       << ", \"mean\": " << json_number(c.mean)
       << ", \"stderr\": " << json_number(c.stderr_mean)
       << ", \"trials\": " << c.trials
       << ", \"nonconverged\": " << c.nonconverged << "}"
       << (i + 1 < cells.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

}  // namespace bench
}  // namespace structpen
