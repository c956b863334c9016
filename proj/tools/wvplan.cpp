#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wvplan/domains.hpp"
#include "wvplan/experiment.hpp"

using namespace wvplan;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfigError = 2, kCapError = 3 };

struct Flags {
  std::string problem, problem_file, mode, variant, out_dir, config;
  double gamma = 0, gamma_p = 0, replanning = 0, refine = 0, coarsen = 0;
  std::vector<std::string> enable, weights;
  int sweeps = 0, value_only = 0;
  std::size_t max_wv = 0, phases = 0, per_step = 0, steps = 0;
  std::uint64_t seeds = 1, seed = 0, exact_cap = 0;
  unsigned jobs = 1;
  std::string simd = "auto";
  std::string eval_snapshot, write_config, print_problem;
};

double parse_weight(const std::string& item, std::string& name) {
  const auto eq = item.find('=');
  if (eq == std::string::npos) throw Error("--weight expects phase=value, got '" + item + "'");
  name = item.substr(0, eq);
  parse_phase(name);
  try {
    return std::stod(item.substr(eq + 1));
  } catch (const std::exception&) {
    throw Error("bad weight in '" + item + "'");
  }
}

ExperimentSpec build_spec(const CLI::App& app, const Flags& f) {
  ExperimentSpec spec = f.config.empty() ? ExperimentSpec{} : load_spec(f.config);
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--problem")) spec.problem = f.problem;
  if (given("--problem-file")) spec.problem_file = f.problem_file;
  if (given("--mode")) spec.mode = parse_run_mode(f.mode);
  if (given("--gamma")) spec.gamma = f.gamma;
  if (given("--gamma-p")) spec.gamma_p = f.gamma_p;
  if (given("--replanning")) spec.replanning_probability = f.replanning;
  if (given("--refine-threshold")) spec.refine_threshold = f.refine;
  if (given("--coarsen-threshold")) spec.coarsen_threshold = f.coarsen;
  if (given("--enable")) {
    spec.phase_weights = {{to_string(Phase::PolicyValue), 1.0}};
    for (const auto& name : f.enable) {
      if (name == "all") {
        for (std::size_t p = 0; p < kNumPhases; ++p) spec.phase_weights[to_string(static_cast<Phase>(p))] = 1.0;
      } else {
        spec.phase_weights[to_string(parse_phase(name))] = 1.0;
      }
    }
  }
  for (const auto& item : f.weights) {
    std::string name;
    const double w = parse_weight(item, name);
    spec.phase_weights[name] = w;
  }
  if (given("--variant")) spec.variant = f.variant;
  if (given("--no-reward-step")) spec.reward_step = false;
  if (given("--no-nexus-step")) spec.nexus_step = false;
  if (given("--sweeps")) spec.n_sweeps = f.sweeps;
  if (given("--value-only")) spec.value_only_iterations = f.value_only;
  if (given("--max-worldview")) spec.max_worldview_size = f.max_wv;
  if (given("--seeds") || given("--seed")) {
    const std::uint64_t count = given("--seeds") ? f.seeds : spec.seeds.size();
    const std::uint64_t first = given("--seed") ? f.seed : 0;
    if (count == 0) throw Error("--seeds must be positive");
    spec.seeds.clear();
    for (std::uint64_t i = 0; i < count; ++i) spec.seeds.push_back(first + i);
  }
  if (given("--phases")) spec.phase_budget = f.phases;
  if (given("--phases-per-step")) spec.phases_per_world_step = f.per_step;
  if (given("--steps")) spec.world_step_limit = f.steps;
  if (given("--stop-at-goal")) spec.stop_at_goal = true;
  if (given("--concurrent")) spec.concurrent = true;
  if (given("--no-eval")) spec.eval_exact = false;
  if (given("--exact-cap")) spec.exact_cap = f.exact_cap;
  if (given("--out-dir")) spec.out_dir = f.out_dir;
  if (given("--jobs")) spec.jobs = f.jobs;
  return spec;
}

int eval_exact(const ExperimentSpec& spec) {
  auto problem = resolve_problem(spec);
  const double gamma = spec.gamma.value_or(problem->gamma_default);
  const auto mdp = enumerate_mdp(*problem, spec.exact_cap);
  const auto sol = solve_exact(mdp, gamma);
  std::printf("%s gamma=%g |S|=%zu\nV*(s0) = %.6f\n", problem->name.c_str(), gamma, mdp.num_states,
              sol.value[mdp.initial_index]);
  std::printf("policy iterations %d, bellman residual %.3g\n", sol.iterations, sol.residual);
  return kOk;
}

int eval_snapshot(const ExperimentSpec& spec, const std::string& path) {
  auto problem = resolve_problem(spec);
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  const auto snap = load_snapshot(in, *problem);
  const double gamma = spec.gamma.value_or(problem->gamma_default);
  const double exact = evaluate_snapshot_exact(*problem, *snap, gamma, spec.exact_cap);
  std::printf("%s gamma=%g |W|=%zu\nV^(s0) = %.6f\nV*_pi(s0) = %.6f\n", problem->name.c_str(), gamma,
              snap->worldview_size(), snap->value_at(problem->initial_state), exact);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worldview planner: abstraction-refining MDP planning experiments"};
  Flags f;
  app.add_option("--problem", f.problem, "3doors|1key|3keys|shuttlebot|10x10|robot4:<k>|tireworld:<graph-file>");
  app.add_option("--problem-file", f.problem_file, "Problem in the text format (overrides --problem)");
  app.add_option("--mode", f.mode, "precursor|recurrent");
  app.add_option("--gamma", f.gamma, "Discount factor (default: the problem's)");
  app.add_option("--gamma-p", f.gamma_p, "Proximity discount");
  app.add_option("--replanning", f.replanning, "Replanning probability of the estimated future policy");
  app.add_option("--refine-threshold", f.refine, "Proximity refinement threshold (default 1e-7)");
  app.add_option("--coarsen-threshold", f.coarsen, "Proximity coarsening threshold (default 1e-7)");
  app.add_option("--enable", f.enable,
                 "Phases besides policy-value: policy-refine, proximity-calc, proximity-refine, coarsen, all")
      ->delimiter(',');
  app.add_option("--weight", f.weights, "Phase weight as phase=value (repeatable)");
  app.add_option("--variant", f.variant, "lua|simple");
  app.add_flag("--no-reward-step", "Skip the reward step of the initial abstraction");
  app.add_flag("--no-nexus-step", "Skip the nexus step of the initial abstraction");
  app.add_option("--sweeps", f.sweeps, "Sweeps per policy/value phase");
  app.add_option("--value-only", f.value_only, "Value-only iterations after proximity refinement");
  app.add_option("--max-worldview", f.max_wv, "Cap on |W|");
  app.add_option("--seeds", f.seeds, "Number of seeded runs");
  app.add_option("--seed", f.seed, "First seed");
  app.add_option("--phases", f.phases, "Phase budget (precursor)");
  app.add_option("--phases-per-step", f.per_step, "Phases per world step (recurrent)");
  app.add_option("--steps", f.steps, "World step limit (recurrent)");
  app.add_flag("--stop-at-goal", "End recurrent runs once a goal state is visited");
  app.add_flag("--concurrent", "Planner and executive on separate threads (not deterministic)");
  app.add_flag("--no-eval", "Skip exact evaluation of final policies");
  app.add_option("--exact-cap", f.exact_cap, "Largest |S| the exact oracle will enumerate");
  app.add_option("--out-dir", f.out_dir, "Output directory (default $WVPLAN_OUT_DIR or wvplan-out)");
  app.add_option("--config", f.config, "Experiment JSON file; flags override it");
  app.add_option("--jobs", f.jobs, "Seeds run in parallel");
  app.add_option("--simd", f.simd, "auto|scalar|avx2");
  app.add_flag("--eval-exact", "Print V*(s0) for the problem and exit");
  app.add_option("--eval-snapshot", f.eval_snapshot, "Evaluate a saved snapshot exactly and exit");
  app.add_option("--write-config", f.write_config, "Write the effective experiment JSON and exit");
  app.add_option("--print-problem", f.print_problem, "Write the problem in the text format ('-' for stdout) and exit");
  app.add_flag("--quiet", "No run header or per-seed lines");
  CLI11_PARSE(app, argc, argv);

  try {
    if (f.simd == "scalar") {
      kernels::force_isa(kernels::Isa::Scalar);
    } else if (f.simd == "avx2") {
      if (!kernels::isa_supported(kernels::Isa::Avx2)) throw Error("AVX2 is not available on this machine");
      kernels::force_isa(kernels::Isa::Avx2);
    } else if (f.simd != "auto") {
      throw Error("--simd expects auto, scalar or avx2");
    }
    const ExperimentSpec spec = build_spec(app, f);
    if (!f.write_config.empty()) {
      std::ofstream out(f.write_config);
      if (!out) throw Error("cannot write '" + f.write_config + "'");
      out << spec_to_json(spec);
      return kOk;
    }
    if (!f.print_problem.empty()) {
      auto problem = resolve_problem(spec);
      if (f.print_problem == "-") {
        write_problem(std::cout, *problem);
      } else {
        std::ofstream out(f.print_problem);
        if (!out) throw Error("cannot write '" + f.print_problem + "'");
        write_problem(out, *problem);
      }
      return kOk;
    }
    if (app.count("--eval-exact")) return eval_exact(spec);
    if (!f.eval_snapshot.empty()) return eval_snapshot(spec, f.eval_snapshot);

    const bool quiet = app.count("--quiet") > 0;
    auto problem = resolve_problem(spec);
    if (!quiet) std::cout << run_header(spec, *problem) << "out_dir               " << resolved_out_dir(spec) << "\n\n";
    std::ostringstream sink;
    run_experiment(spec, quiet ? static_cast<std::ostream&>(sink) : std::cout);
    return kOk;
  } catch (const WorldviewCapError& e) {
    std::cerr << "wvplan: " << e.what() << '\n';
    return kCapError;
  } catch (const Error& e) {
    std::cerr << "wvplan: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "wvplan: " << e.what() << '\n';
    return kFailure;
  }
}
