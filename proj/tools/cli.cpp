#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "structpen/bench.hpp"
#include "structpen/io.hpp"
#include "structpen/oracle.hpp"
#include "structpen/solver.hpp"

namespace structpen {
namespace cli {

namespace {

using nlohmann::json;

Vector load_vector(const std::string& arg) {
  if (std::filesystem::exists(arg)) return io::read_vector_csv(arg);
  return io::parse_vector(arg);
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json witness_to_json(const Witness& witness, const RootedTree* tree) {
  json out = json::object();
  if (const auto* part = std::get_if<ContiguousPartition>(&witness)) {
    json blocks = json::array();
    for (const auto& [b, e] : part->blocks()) {
      json blk = json::array();
      for (int j = b; j < e; ++j) blk.push_back(j + 1);
      blocks.push_back(std::move(blk));
    }
    out["partition"] = std::move(blocks);
  } else if (const auto* cut = std::get_if<TreeCut>(&witness)) {
    json edges = json::array();
    if (tree) {
      for (int e : cut->cut_edges) {
        const int child = tree->edge_child(e);
        edges.push_back(json::array({tree->parent(child) + 1, child + 1}));
      }
      int count = 0;
      const auto block = tree_cut_blocks(*tree, *cut, &count);
      std::vector<std::vector<int>> members(count);
      for (int v = 0; v < tree->size(); ++v)
        members[block[v]].push_back(v + 1);
      json blocks = json::array();
      for (const auto& m : members) blocks.push_back(m);
      out["blocks"] = std::move(blocks);
    } else {
      for (int e : cut->cut_edges) edges.push_back(e + 1);
    }
    out["cut_edges"] = std::move(edges);
  }
  return out;
}

struct PenaltyArgs {
  std::string kind;
  std::string beta;
  std::string a, b;
  int k = 0;
  std::string tree_path, cone_path, groups_path;
};

GroupPartition partition_from_file(const std::string& path, int n) {
  GroupPartition partition;
  partition.blocks = io::read_groups(path);
  partition.validate(n);
  return partition;
}

int run_penalty(const PenaltyArgs& args, std::ostream& out) {
  const Vector beta = load_vector(args.beta);
  const int n = static_cast<int>(beta.size());
  PenaltyResult res;
  const RootedTree* tree_ptr = nullptr;
  RootedTree tree;

  if (args.kind == "box") {
    require(!args.a.empty() && !args.b.empty(),
            "penalty --kind box requires --a and --b");
    res = box_penalty(beta, Box{load_vector(args.a), load_vector(args.b)});
  } else if (args.kind == "wedge") {
    res = wedge_penalty(beta);
  } else if (args.kind == "kwedge") {
    require(args.k >= 1, "penalty --kind kwedge requires --k");
    res = cone_penalty_numeric(beta, k_wedge_matrix(n, args.k));
  } else if (args.kind == "tree") {
    require(!args.tree_path.empty(), "penalty --kind tree requires --tree");
    tree = io::read_tree(args.tree_path);
    tree_ptr = &tree;
    res = tree_penalty(beta, tree);
  } else if (args.kind == "cone") {
    require(!args.cone_path.empty(), "penalty --kind cone requires --A");
    Matrix A = io::read_matrix_csv(args.cone_path);
    res = cone_penalty_numeric(beta, ConeSpec{std::move(A)});
  } else if (args.kind == "group") {
    require(!args.groups_path.empty(),
            "penalty --kind group requires --groups");
    res = group_lasso_result(beta, partition_from_file(args.groups_path, n));
  } else if (args.kind == "composite") {
    require(!args.groups_path.empty(),
            "penalty --kind composite requires --groups");
    res = composite_penalty(beta, partition_from_file(args.groups_path, n),
                            wedge_penalty);
  } else {
    throw std::invalid_argument("unknown penalty kind: " + args.kind);
  }

  json output;
  output["omega"] = res.omega;
  output["lambda"] = vector_to_json(res.lambda);
  output.update(witness_to_json(res.witness, tree_ptr));
  out << output.dump() << "\n";
  return 0;
}

struct SolveArgs {
  std::string x_path, y_path;
  double rho = 1.0;
  std::string penalty;
  std::string a, b;
  int k = 0;
  std::string tree_path, cone_path, groups_path;
  std::string trace_path;
  double tol = 1e-10;
  int max_iter = 5000;
  double eps_start = 1e-2, eps_min = 1e-12;
};

std::unique_ptr<PenaltyModel> build_model(const SolveArgs& args, int n) {
  if (args.penalty == "lasso") return make_lasso_model();
  if (args.penalty == "wedge") return make_wedge_model();
  if (args.penalty == "box") {
    require(!args.a.empty() && !args.b.empty(),
            "solve --penalty box requires --a and --b");
    return make_box_model(Box{load_vector(args.a), load_vector(args.b)});
  }
  if (args.penalty == "kwedge") {
    require(args.k >= 1, "solve --penalty kwedge requires --k");
    return make_kwedge_model(n, args.k);
  }
  if (args.penalty == "tree") {
    require(!args.tree_path.empty(), "solve --penalty tree requires --tree");
    return make_tree_model(io::read_tree(args.tree_path));
  }
  if (args.penalty == "cone") {
    require(!args.cone_path.empty(), "solve --penalty cone requires --A");
    return make_cone_model(ConeSpec{io::read_matrix_csv(args.cone_path)});
  }
  if (args.penalty == "group") {
    require(!args.groups_path.empty(),
            "solve --penalty group requires --groups");
    return make_group_lasso_model(partition_from_file(args.groups_path, n));
  }
  if (args.penalty == "composite") {
    require(!args.groups_path.empty(),
            "solve --penalty composite requires --groups");
    GroupPartition partition = partition_from_file(args.groups_path, n);
    return make_composite_wedge_model(std::move(partition));
  }
  throw std::invalid_argument("unknown penalty: " + args.penalty);
}

int run_solve(const SolveArgs& args, std::ostream& out) {
  Problem prob;
  prob.X = io::read_matrix_csv(args.x_path);
  prob.y = io::read_vector_csv(args.y_path);
  prob.rho = args.rho;

  SolverConfig cfg;
  cfg.eps_schedule.clear();
  for (double eps = args.eps_start; eps >= 0.99 * args.eps_min; eps *= 0.1)
    cfg.eps_schedule.push_back(eps);
  cfg.tol = args.tol;
  cfg.max_iter = args.max_iter;

  auto model = build_model(args, prob.cols());
  const SolveResult sol = alternating_solve(prob, *model, cfg);

  if (!args.trace_path.empty()) {
    std::ostringstream os;
    os << "iter,eps,objective,l1,omega\n";
    os.precision(17);
    for (const auto& rec : sol.trace.records)
      os << rec.iter << ',' << rec.eps << ',' << rec.objective << ','
         << rec.l1 << ',' << rec.omega << '\n';
    io::write_text(args.trace_path, os.str());
  }

  json output;
  output["beta"] = vector_to_json(sol.beta);
  output["lambda"] = vector_to_json(sol.lambda);
  output["objective"] = sol.objective;
  output["converged"] = sol.converged;
  output["iters"] = sol.iterations;
  out << output.dump() << "\n";
  return sol.converged ? 0 : 3;
}

struct ExperimentArgs {
  std::string spec_path;
  std::string out_dir;
  bool full_scale = false;
  int threads = 0;
  std::int64_t seed = -1;
};

bench::ExperimentSpec parse_spec(const ExperimentArgs& args) {
  std::ifstream in(args.spec_path);
  if (!in)
    throw std::invalid_argument("cannot open spec: " + args.spec_path);
  json doc = json::parse(in);
  require(doc.contains("kind"), "experiment spec: missing \"kind\"");
  const auto kind = bench::parse_model_kind(doc["kind"].get<std::string>());
  bench::ExperimentSpec spec = args.full_scale
                                   ? bench::ExperimentSpec::full_scale(kind)
                                   : bench::ExperimentSpec::desk_scale(kind);
  if (doc.contains("n")) spec.n = doc["n"].get<int>();
  if (doc.contains("sample_sizes"))
    spec.sample_sizes = doc["sample_sizes"].get<std::vector<int>>();
  if (doc.contains("trials")) spec.trials = doc["trials"].get<int>();
  if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("methods"))
    spec.methods = doc["methods"].get<std::vector<std::string>>();
  if (doc.contains("rho")) spec.rho = doc["rho"].get<double>();
  if (doc.contains("box_mode")) {
    const auto mode = doc["box_mode"].get<std::string>();
    if (mode == "printed")
      spec.box_mode = bench::BoxBoundsMode::printed;
    else if (mode == "repaired")
      spec.box_mode = bench::BoxBoundsMode::repaired;
    else
      throw std::invalid_argument("experiment spec: bad box_mode");
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (s.contains("tol")) spec.solver.tol = s["tol"].get<double>();
    if (s.contains("max_iter"))
      spec.solver.max_iter = s["max_iter"].get<int>();
    if (s.contains("eps_start") || s.contains("eps_min")) {
      const double start = s.value("eps_start", 1e-2);
      const double stop = s.value("eps_min", 1e-8);
      spec.solver.eps_schedule.clear();
      for (double eps = start; eps >= 0.99 * stop; eps *= 0.1)
        spec.solver.eps_schedule.push_back(eps);
    }
  }
  if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
  if (args.threads > 0) spec.threads = args.threads;
  return spec;
}

int run_experiment_cmd(const ExperimentArgs& args, std::ostream& out) {
  const bench::ExperimentSpec spec = parse_spec(args);
  std::filesystem::create_directories(args.out_dir);
  const bench::ExperimentResult result = bench::run_experiment(spec);
  const auto csv_path =
      (std::filesystem::path(args.out_dir) / "results.csv").string();
  const auto json_path =
      (std::filesystem::path(args.out_dir) / "summary.json").string();
  io::write_text(csv_path, bench::results_csv(result));
  io::write_text(json_path, bench::summary_json(spec, result));
  out << "wrote " << csv_path << " and " << json_path << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"structured-sparsity penalties, solver and experiments"};
  app.require_subcommand(1);

  PenaltyArgs pargs;
  auto* penalty = app.add_subcommand("penalty", "evaluate a penalty");
  penalty->add_option("--kind", pargs.kind,
                      "box|wedge|kwedge|tree|cone|group|composite")
      ->required();
  penalty->add_option("--beta", pargs.beta, "inline vector or CSV file")
      ->required();
  penalty->add_option("--a", pargs.a, "box lower bounds");
  penalty->add_option("--b", pargs.b, "box upper bounds");
  penalty->add_option("--k", pargs.k, "difference order for kwedge");
  penalty->add_option("--tree", pargs.tree_path, "tree file (v,parent lines)");
  penalty->add_option("--A", pargs.cone_path, "cone matrix CSV");
  penalty->add_option("--groups", pargs.groups_path, "groups file");

  SolveArgs sargs;
  auto* solve = app.add_subcommand("solve", "penalized least squares");
  solve->add_option("--X", sargs.x_path, "design matrix CSV")->required();
  solve->add_option("--y", sargs.y_path, "target vector CSV")->required();
  solve->add_option("--rho", sargs.rho, "regularization weight")->required();
  solve->add_option("--penalty", sargs.penalty,
                    "lasso|box|wedge|kwedge|tree|cone|group|composite")
      ->required();
  solve->add_option("--a", sargs.a, "box lower bounds");
  solve->add_option("--b", sargs.b, "box upper bounds");
  solve->add_option("--k", sargs.k, "difference order for kwedge");
  solve->add_option("--tree", sargs.tree_path, "tree file");
  solve->add_option("--A", sargs.cone_path, "cone matrix CSV");
  solve->add_option("--groups", sargs.groups_path, "groups file");
  solve->add_option("--trace", sargs.trace_path, "write per-iteration CSV");
  solve->add_option("--tol", sargs.tol, "convergence tolerance");
  solve->add_option("--max-iter", sargs.max_iter, "iterations per stage");
  solve->add_option("--eps-start", sargs.eps_start, "first smoothing level");
  solve->add_option("--eps-min", sargs.eps_min, "last smoothing level");

  ExperimentArgs eargs;
  auto* experiment =
      app.add_subcommand("experiment", "run a simulation protocol");
  experiment->add_option("--spec", eargs.spec_path, "experiment spec JSON")
      ->required();
  experiment->add_option("--out", eargs.out_dir, "output directory")
      ->required();
  experiment->add_flag("--full-scale", eargs.full_scale,
                       "n=100, 50 trials defaults");
  experiment->add_option("--threads", eargs.threads, "worker threads");
  experiment->add_option("--seed", eargs.seed, "seed override");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (penalty->parsed()) return run_penalty(pargs, out);
    if (solve->parsed()) return run_solve(sargs, out);
    if (experiment->parsed()) return run_experiment_cmd(eargs, out);
    err << app.help();
    return 2;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace cli
}  // namespace structpen
