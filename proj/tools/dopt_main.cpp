#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "dopt/barycentric.hpp"
#include "dopt/instances.hpp"
#include "dopt/io.hpp"
#include "dopt/standard.hpp"
#include "dopt/transforms.hpp"

namespace {

using namespace dopt;

long parse_deletion_interval(const std::string& text) {
  if (text == "none" || text == "inf") return kNoDeletion;
  const long value = std::stol(text);
  if (value < 1) throw CLI::ValidationError("--deletion-interval must be >= 1 or 'none'");
  return value;
}

int run_solve(const std::string& input, const std::string& mode, double target_eff,
              const std::string& deletion, long max_iters, double tol_one,
              double cost_bump, const std::string& output, const std::string& trace_path) {
  LoadedProblem problem = load_problem(input);

  SolverOptions opts;
  opts.target_eff = target_eff;
  opts.deletion_interval = parse_deletion_interval(deletion);
  opts.max_iters = max_iters;
  opts.tol_one = tol_one;
  opts.cost_bump = cost_bump;

  SolverReport report;
  if (mode == "auto") {
    report = solve_inequality(problem.instance, opts);
  } else if (mode == "equality") {
    report = solve_equality(problem.instance, opts);
  } else if (mode == "size") {
    StandardOptions sopts;
    sopts.target_eff = target_eff;
    sopts.max_iters = max_iters;
    StandardResult res = solve_standard_multiplicative(problem.instance, sopts);
    report.design = res.design;
    report.phi = info_matrix(problem.instance, res.design).phi;
    report.eff_lb = res.eff_lb;
    report.iterations = res.iterations;
    report.status = SolveStatus::ShortcutSize;
  } else {  // cost
    auto [standard, back] = cost_only_to_standard(problem.instance);
    StandardOptions sopts;
    sopts.target_eff = target_eff;
    sopts.max_iters = max_iters;
    StandardResult res = solve_standard_multiplicative(standard, sopts);
    report.design = back.apply(res.design);
    report.phi = info_matrix(problem.instance, report.design).phi;
    report.eff_lb = res.eff_lb;
    report.iterations = res.iterations;
    report.status = SolveStatus::ShortcutCost;
  }

  // Weights reported in the file's original statement.
  report.design = problem.back_map.apply(report.design);

  const std::string text = serialize_report(problem.instance, report);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) throw IoError("cannot write '" + output + "'");
    out << text;
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw IoError("cannot write '" + trace_path + "'");
    write_trace_csv(out, report);
  }
  std::cerr << "status=" << to_string(report.status) << " phi=" << report.phi
            << " eff_lb=" << report.eff_lb << " iterations=" << report.iterations << "\n";
  return report.status == SolveStatus::MaxIters ? 2 : 0;
}

void write_problem(const DesignInstance& instance, const std::string& output) {
  const std::string text = serialize_problem(instance);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) throw IoError("cannot write '" + output + "'");
    out << text;
  }
}

int run_check(const std::string& input, const std::string& design_path, double tol) {
  LoadedProblem problem = load_problem(input);
  const DesignInstance& instance = problem.instance;
  Design design = parse_design_file(instance, design_path);

  auto [size_res, cost_res] = feasibility_residuals(design, instance);
  std::cout << "size_residual=" << size_res << " cost_residual=" << cost_res << "\n";

  InformationState state = info_matrix(instance, design);
  if (!state.regular) {
    std::cout << "information matrix singular\n";
    return 1;
  }
  Eigen::VectorXd d = variance_function(instance, state);
  CostPartition part = partition(instance);
  EquivalenceResult eq = equivalence_check(part, d, instance.m(), tol);

  double eps;
  if (!part.plus.empty() && !part.minus.empty()) {
    Eigen::MatrixXd Delta = weighted_variances(part, d);
    Eigen::VectorXd d_zero(part.n_zero());
    for (int k = 0; k < part.n_zero(); ++k)
      d_zero(k) = d(part.zero[static_cast<size_t>(k)]);
    eps = epsilon_and_bounds(part, Delta, d_zero, instance.m()).first;
  } else {
    eps = std::max(d.maxCoeff() - instance.m(), 0.0);
  }
  const double eff_lb = instance.m() / (instance.m() + eps);

  std::cout << "slack_zero=" << eq.slack_zero << " slack_pm=" << eq.slack_pm
            << " epsilon=" << eps << " eff_lb=" << eff_lb << "\n";

  const bool feasible = size_res <= 1e-6 && cost_res <= 1e-6;
  return (feasible && eq.optimal) ? 0 : 1;
}

struct BenchRow {
  std::string param;
  int rep = 0;
  std::uint64_t seed = 0;
  long iterations = 0;
  double elapsed_s = 0.0;
  double phi = 0.0;
  SolveStatus status = SolveStatus::Converged;
};

int run_bench(int reps, const std::string& vary, int n, int m, double p0, double ppm,
              const std::string& l_text, double target_eff, std::uint64_t seed, int jobs,
              const std::string& output) {
  struct Level {
    std::string label;
    double p0, ppm;
    long l;
  };
  const long l_fixed = parse_deletion_interval(l_text);
  std::vector<Level> levels;
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  if (vary == "p0") {
    for (double v : {0.0, 0.25, 0.5, 0.75, 0.99}) levels.push_back({fmt(v), v, ppm, l_fixed});
  } else if (vary == "ppm") {
    for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) levels.push_back({fmt(v), p0, v, l_fixed});
  } else if (vary == "l") {
    for (long v : {1L, 4L, 16L, 64L}) levels.push_back({std::to_string(v), p0, ppm, v});
    levels.push_back({"none", p0, ppm, kNoDeletion});
  } else {
    throw CLI::ValidationError("--vary must be one of p0, ppm, l");
  }

  std::vector<BenchRow> rows(levels.size() * static_cast<size_t>(reps));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t task = next.fetch_add(1);
      if (task >= rows.size()) return;
      const Level& level = levels[task / static_cast<size_t>(reps)];
      const int rep = static_cast<int>(task % static_cast<size_t>(reps));

      RandomSpec spec;
      spec.n = n;
      spec.m = m;
      spec.p0 = level.p0;
      spec.ppm = level.ppm;
      spec.seed = seed + static_cast<std::uint64_t>(rep);
      DesignInstance instance = random_instance(spec);

      SolverOptions opts;
      opts.target_eff = target_eff;
      opts.deletion_interval = level.l;
      const auto t0 = std::chrono::steady_clock::now();
      SolverReport report = solve_equality(instance, opts);
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rows[task] = {level.label, rep,          spec.seed, report.iterations,
                    elapsed,     report.phi,   report.status};
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < std::max(1, jobs); ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw IoError("cannot write '" + output + "'");
    out = &file;
  }
  out->precision(17);
  *out << "param_value,rep,seed,iterations,elapsed_s,phi,status\n";
  bool all_converged = true;
  for (const BenchRow& row : rows) {
    *out << row.param << ',' << row.rep << ',' << row.seed << ',' << row.iterations << ','
         << row.elapsed_s << ',' << row.phi << ',' << to_string(row.status) << '\n';
    all_converged = all_converged && row.status == SolveStatus::Converged;
  }
  return all_converged ? 0 : 2;
}

int run_quad_demo(int grid_size, double target_eff, const std::string& deletion,
                  const std::string& output) {
  DesignInstance instance = quadratic_grid_instance(grid_size);
  SolverOptions opts;
  opts.target_eff = target_eff;
  opts.deletion_interval = parse_deletion_interval(deletion);
  SolverReport report = solve_equality(instance, opts);

  std::set<std::string> deleted;
  for (const auto& ev : report.deletions)
    deleted.insert(ev.removed_ids.begin(), ev.removed_ids.end());

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw IoError("cannot write '" + output + "'");
    out = &file;
  }
  out->precision(17);
  *out << "r1,r2,weight,deleted\n";
  const double scale = grid_size - 1.0;
  for (int x = 1; x <= grid_size * grid_size; ++x) {
    const double r1 = ((x - 1) / grid_size) / scale;
    const double r2 = ((x - 1) % grid_size) / scale;
    const std::string id = "x" + std::to_string(x);
    *out << r1 << ',' << r2 << ',' << report.design.w(x - 1) << ','
         << (deleted.count(id) ? 1 : 0) << '\n';
  }
  std::cerr << "status=" << to_string(report.status) << " eff_lb=" << report.eff_lb
            << " iterations=" << report.iterations << "\n";
  return report.status == SolveStatus::MaxIters ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D-optimal experimental design under simultaneous size and cost constraints"};
  app.require_subcommand(1);

  // solve
  std::string input, mode = "auto", deletion = "16", output, trace_path;
  double target_eff = 0.99999, tol_one = 0.0, cost_bump = 0.0;
  long max_iters = 200000;
  auto* solve = app.add_subcommand("solve", "solve a problem file");
  solve->add_option("--input", input, "problem JSON file")->required();
  solve->add_option("--mode", mode, "auto|equality|size|cost")
      ->check(CLI::IsMember({"auto", "equality", "size", "cost"}));
  solve->add_option("--target-eff", target_eff, "efficiency stopping bound");
  solve->add_option("--deletion-interval", deletion, "iterations between deletions, or 'none'");
  solve->add_option("--max-iters", max_iters, "iteration cap");
  solve->add_option("--tol-one", tol_one, "tolerance for classifying costs as 1");
  solve->add_option("--cost-bump", cost_bump, "additive bump applied to unit costs");
  solve->add_option("--output", output, "report JSON path (stdout when omitted)");
  solve->add_option("--trace", trace_path, "trace CSV path");

  // gen (random family) with nested quad
  int gen_n = 600, gen_m = 4, grid_size = 101;
  double gen_p0 = 0.5, gen_ppm = 0.5;
  std::uint64_t gen_seed = 0;
  std::string gen_output;
  auto* gen = app.add_subcommand("gen", "generate a problem file");
  gen->add_option("--n", gen_n, "number of design points");
  gen->add_option("--m", gen_m, "parameter dimension");
  gen->add_option("--p0", gen_p0, "fraction of unit-cost points");
  gen->add_option("--ppm", gen_ppm, "X+ share among non-unit-cost points");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--output", gen_output, "output path (stdout when omitted)");
  auto* quad = gen->add_subcommand("quad", "quadratic model on a square grid");
  quad->add_option("--grid-size", grid_size, "points per grid side");
  quad->add_option("--output", gen_output, "output path (stdout when omitted)");

  // check
  std::string check_input, check_design;
  double check_tol = 1e-4;
  auto* check = app.add_subcommand("check", "certify a design against a problem");
  check->add_option("--input", check_input, "problem JSON file")->required();
  check->add_option("--design", check_design, "report JSON or id,w CSV")->required();
  check->add_option("--tol", check_tol, "equivalence-theorem tolerance");

  // bench
  int reps = 5, jobs = 1;
  std::string vary = "l", bench_l = "16", bench_output;
  int bench_n = 600, bench_m = 4;
  double bench_p0 = 0.5, bench_ppm = 0.5, bench_target = 0.99999;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "timing study over random instances");
  bench->add_option("--reps", reps, "instances per parameter level");
  bench->add_option("--vary", vary, "p0|ppm|l");
  bench->add_option("--n", bench_n, "points per instance");
  bench->add_option("--m", bench_m, "parameter dimension");
  bench->add_option("--p0", bench_p0, "fixed p0 when not varied");
  bench->add_option("--ppm", bench_ppm, "fixed ppm when not varied");
  bench->add_option("--l", bench_l, "fixed deletion interval when not varied");
  bench->add_option("--target-eff", bench_target, "efficiency stopping bound");
  bench->add_option("--seed", bench_seed, "base RNG seed");
  bench->add_option("--jobs", jobs, "concurrent solves");
  bench->add_option("--output", bench_output, "CSV path (stdout when omitted)");

  // quad-demo: solve the grid study and emit plot-ready weights
  int demo_grid = 101;
  double demo_target = 0.99;
  std::string demo_deletion = "16", demo_output;
  auto* demo = app.add_subcommand("quad-demo", "grid study; emits r1,r2,weight,deleted CSV");
  demo->add_option("--grid-size", demo_grid, "points per grid side");
  demo->add_option("--target-eff", demo_target, "efficiency stopping bound");
  demo->add_option("--deletion-interval", demo_deletion, "deletion cadence or 'none'");
  demo->add_option("--output", demo_output, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve)
      return run_solve(input, mode, target_eff, deletion, max_iters, tol_one, cost_bump,
                       output, trace_path);
    if (*gen) {
      if (*quad) {
        write_problem(quadratic_grid_instance(grid_size), gen_output);
      } else {
        RandomSpec spec{gen_n, gen_m, gen_p0, gen_ppm, gen_seed};
        write_problem(random_instance(spec), gen_output);
      }
      return 0;
    }
    if (*check) return run_check(check_input, check_design, check_tol);
    if (*bench)
      return run_bench(reps, vary, bench_n, bench_m, bench_p0, bench_ppm, bench_l,
                       bench_target, bench_seed, jobs, bench_output);
    if (*demo) return run_quad_demo(demo_grid, demo_target, demo_deletion, demo_output);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
