#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "structpen/solver.hpp"

namespace structpen {
namespace bench {

/// Deterministic stream with explicit double extraction, so runs reproduce
/// bitwise for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi);  // inclusive range
  double normal();                  // polar method, second value cached

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// iid standard normal entries with every column scaled to unit l2 norm.
Matrix generate_design(int m, int n, Rng& rng);

enum class ModelKind {
  box10,
  wedge10,
  wedge10_perturbed,
  composite6,
  poly1,
  poly2,
  poly3,
  poly4,
  poly_random1,
  poly_random2,
  poly_random3,
  poly_random4,
};

ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

/// Ground-truth regression vectors of the simulation protocol, generated at
/// length n (polynomial grids keep their range, so lengths other than 100
/// rescale the spacing).
Vector generate_model(ModelKind kind, int n, Rng& rng);

enum class BoxBoundsMode {
  repaired,  // a = (|b*| - r)_+, b = |b*| + r  (intervals around the model)
  printed,   // a = (r - |b*|)_+, b = (|b*| - r)_+ (kept for fidelity runs;
             // inconsistent for large |b*|, see README)
};

Box box_from_oracle(const Vector& beta_star, double r,
                    BoxBoundsMode mode = BoxBoundsMode::repaired);

/// ||beta_hat - beta_star||_2^2 / ||beta_star||_2^2 for one trial.
double model_error(const Vector& beta_hat, const Vector& beta_star);

struct ExperimentSpec {
  ModelKind kind = ModelKind::wedge10;
  int n = 50;
  std::vector<int> sample_sizes;  // increasing
  int trials = 20;
  std::uint64_t seed = 1;
  std::vector<std::string> methods;  // descriptors; defaults depend on kind
  double rho = 1e-8;
  SolverConfig solver;  // bench default: eps 1e-2..1e-8, tol 1e-8
  int threads = 1;
  BoxBoundsMode box_mode = BoxBoundsMode::repaired;

  void validate() const;
  /// Desk-scale defaults: n=50, trials=20, m in {10,15,..,60}.
  static ExperimentSpec desk_scale(ModelKind kind);
  /// Protocol scale: n=100, trials=50, m in {10,20,..,100}.
  static ExperimentSpec full_scale(ModelKind kind);
};

std::vector<std::string> default_methods(ModelKind kind);

struct Cell {
  std::string method;
  int m = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  int trials = 0;
  int nonconverged = 0;
};

struct ExperimentResult {
  std::vector<std::string> methods;
  std::vector<int> sample_sizes;
  /// model_errors[method][sample_size][trial]; NaN marks a failed cell.
  std::vector<std::vector<std::vector<double>>> model_errors;
  std::vector<std::vector<std::vector<char>>> converged;

  std::vector<Cell> cells() const;
  double mean_error(const std::string& method, int m) const;
};

/// Runs the protocol: per trial, draw the model, then for each sample size a
/// fresh design, solve the problem with every method at rho, and record the
/// model error. Trials run on independent RNG streams (seed xor trial index)
/// so threaded and serial runs produce identical results.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string results_csv(const ExperimentResult& result);
std::string summary_json(const ExperimentSpec& spec,
                         const ExperimentResult& result);

/// Model for sums of unweighted group l2 norms with arbitrary (overlapping)
/// groups, used by the group-lasso baselines of the experiment protocol.
/// Every index must be covered by at least one group.
std::unique_ptr<PenaltyModel> make_overlapping_group_model(
    std::vector<std::vector<int>> groups, int n, std::string name);

/// Builds the solver model for a method descriptor: lasso, wedge, box:<r>,
/// wk:<k>, cwedge, gl-ind, gl-hie, gl-lin, gl-con.
std::unique_ptr<PenaltyModel> make_method_model(const std::string& descriptor,
                                                const Vector& beta_star,
                                                const ExperimentSpec& spec);

}  // namespace bench
}  // namespace structpen
