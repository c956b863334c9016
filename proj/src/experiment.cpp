#include "wvplan/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wvplan/domains.hpp"

namespace wvplan {

namespace {

using nlohmann::json;

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j[key].is_null()) {
    out.reset();
  } else {
    out = j[key].get<T>();
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string spec_to_json(const ExperimentSpec& s) {
  json j;
  j["problem"] = s.problem;
  j["problem_file"] = s.problem_file;
  j["mode"] = to_string(s.mode);
  j["gamma"] = optional_json(s.gamma);
  j["gamma_p"] = s.gamma_p;
  j["replanning_probability"] = s.replanning_probability;
  j["refine_threshold"] = optional_json(s.refine_threshold);
  j["coarsen_threshold"] = optional_json(s.coarsen_threshold);
  j["phase_weights"] = s.phase_weights;
  j["n_sweeps"] = s.n_sweeps;
  j["value_only_iterations"] = s.value_only_iterations;
  j["variant"] = s.variant;
  j["reward_step"] = s.reward_step;
  j["nexus_step"] = s.nexus_step;
  j["max_worldview_size"] = s.max_worldview_size;
  j["seeds"] = s.seeds;
  j["phase_budget"] = s.phase_budget;
  j["phases_per_world_step"] = s.phases_per_world_step;
  j["world_step_limit"] = s.world_step_limit;
  j["stop_at_goal"] = s.stop_at_goal;
  j["concurrent"] = s.concurrent;
  j["eval_exact"] = s.eval_exact;
  j["exact_cap"] = s.exact_cap;
  j["out_dir"] = s.out_dir;
  j["jobs"] = s.jobs;
  return j.dump(2) + "\n";
}

ExperimentSpec spec_from_json(const std::string& text, ExperimentSpec s) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object()) throw Error("experiment config: expected a JSON object");
  static const std::vector<std::string> known = {
      "problem",         "problem_file", "mode",          "gamma",          "gamma_p",
      "replanning_probability", "refine_threshold", "coarsen_threshold", "phase_weights", "n_sweeps",
      "value_only_iterations", "variant", "reward_step", "nexus_step", "max_worldview_size",
      "seeds",           "phase_budget", "phases_per_world_step", "world_step_limit", "stop_at_goal",
      "concurrent",      "eval_exact",   "exact_cap",     "out_dir",        "jobs"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error("experiment config: unknown key '" + key + "'");
    }
  }
  try {
    read(j, "problem", s.problem);
    read(j, "problem_file", s.problem_file);
    if (j.contains("mode")) s.mode = parse_run_mode(j["mode"].get<std::string>());
    read_optional(j, "gamma", s.gamma);
    read(j, "gamma_p", s.gamma_p);
    read(j, "replanning_probability", s.replanning_probability);
    read_optional(j, "refine_threshold", s.refine_threshold);
    read_optional(j, "coarsen_threshold", s.coarsen_threshold);
    read(j, "phase_weights", s.phase_weights);
    read(j, "n_sweeps", s.n_sweeps);
    read(j, "value_only_iterations", s.value_only_iterations);
    read(j, "variant", s.variant);
    read(j, "reward_step", s.reward_step);
    read(j, "nexus_step", s.nexus_step);
    read(j, "max_worldview_size", s.max_worldview_size);
    read(j, "seeds", s.seeds);
    read(j, "phase_budget", s.phase_budget);
    read(j, "phases_per_world_step", s.phases_per_world_step);
    read(j, "world_step_limit", s.world_step_limit);
    read(j, "stop_at_goal", s.stop_at_goal);
    read(j, "concurrent", s.concurrent);
    read(j, "eval_exact", s.eval_exact);
    read(j, "exact_cap", s.exact_cap);
    read(j, "out_dir", s.out_dir);
    read(j, "jobs", s.jobs);
  } catch (const json::exception& e) {
    throw Error(std::string("experiment config: ") + e.what());
  }
  return s;
}

ExperimentSpec load_spec(const std::string& path, ExperimentSpec base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return spec_from_json(buf.str(), std::move(base));
}

std::shared_ptr<const ProblemInstance> resolve_problem(const ExperimentSpec& spec) {
  if (!spec.problem_file.empty()) return std::make_shared<const ProblemInstance>(load_problem(spec.problem_file));
  return std::make_shared<const ProblemInstance>(build_problem(spec.problem));
}

RunConfig run_config_for(const ExperimentSpec& spec, const ProblemInstance& problem, std::uint64_t seed) {
  RunConfig rc;
  rc.mode = spec.mode;
  rc.phase_budget = spec.phase_budget;
  rc.phases_per_world_step = spec.phases_per_world_step;
  rc.world_step_limit = spec.world_step_limit;
  rc.seed = seed;
  rc.stop_at_goal = spec.stop_at_goal;
  rc.concurrent = spec.concurrent;
  rc.evaluate_exact = spec.eval_exact;
  rc.exact_cap = spec.exact_cap;
  PlannerConfig& c = rc.planner;
  c.gamma = spec.gamma.value_or(problem.gamma_default);
  c.gamma_p = spec.gamma_p;
  c.replanning_probability = spec.replanning_probability;
  c.n_sweeps = spec.n_sweeps;
  c.value_only_iterations = spec.value_only_iterations;
  if (spec.refine_threshold) c.refine_threshold = *spec.refine_threshold;
  if (spec.coarsen_threshold) c.coarsen_threshold = *spec.coarsen_threshold;
  c.variant = parse_policy_variant(spec.variant);
  c.phase_weights.fill(0.0);
  for (const auto& [name, weight] : spec.phase_weights) {
    c.phase_weights[static_cast<std::size_t>(parse_phase(name))] = weight;
  }
  c.reward_step = spec.reward_step;
  c.nexus_step = spec.nexus_step;
  c.max_worldview_size = spec.max_worldview_size;
  rc.validate();
  return rc;
}

std::string resolved_out_dir(const ExperimentSpec& spec) {
  if (!spec.out_dir.empty()) return spec.out_dir;
  if (const char* env = std::getenv("WVPLAN_OUT_DIR"); env && *env) return env;
  return "wvplan-out";
}

std::string run_header(const ExperimentSpec& spec, const ProblemInstance& problem) {
  const RunConfig rc = run_config_for(spec, problem, spec.seeds.empty() ? 0 : spec.seeds.front());
  const PlannerConfig& c = rc.planner;
  std::ostringstream out;
  out << "problem               " << problem.name << " (|S| = " << to_string(problem.space().size()) << ", "
      << problem.space().num_dims() << " dimensions, " << problem.model.num_actions() << " actions)\n";
  out << "mode                  " << to_string(rc.mode) << '\n';
  out << "gamma                 " << c.gamma << (spec.gamma ? "" : " (problem default)") << '\n';
  out << "gamma_p               " << c.gamma_p << '\n';
  out << "replanning            " << c.replanning_probability << '\n';
  out << "n_sweeps              " << c.n_sweeps << '\n';
  out << "value_only_iterations " << c.value_only_iterations << '\n';
  out << "refine_threshold      " << format_real(c.refine_threshold) << '\n';
  out << "coarsen_threshold     " << format_real(c.coarsen_threshold) << '\n';
  out << "variant               " << to_string(c.variant) << '\n';
  out << "initial abstraction   reward step " << (c.reward_step ? "on" : "off") << ", nexus step "
      << (c.nexus_step ? "on" : "off") << '\n';
  out << "phase weights        ";
  for (std::size_t p = 0; p < kNumPhases; ++p) {
    out << ' ' << to_string(static_cast<Phase>(p)) << '=' << c.phase_weights[p];
  }
  out << '\n';
  out << "max_worldview_size    " << c.max_worldview_size << '\n';
  if (rc.mode == RunMode::Precursor) {
    out << "phase_budget          " << rc.phase_budget << '\n';
  } else {
    out << "phases_per_step       " << rc.phases_per_world_step << '\n';
    out << "world_step_limit      " << rc.world_step_limit << '\n';
    out << "stop_at_goal          " << (rc.stop_at_goal ? "yes" : "no") << '\n';
    out << "concurrent            " << (rc.concurrent ? "yes" : "no") << '\n';
  }
  out << "seeds                ";
  for (auto s : spec.seeds) out << ' ' << s;
  out << '\n';
  out << "simd                  " << kernels::to_string(kernels::active_isa()) << '\n';
  return out.str();
}

std::string summary_row(const SeedSummary& s) {
  std::ostringstream out;
  out << s.seed << ',' << s.final_worldview_size << ',' << s.peak_worldview_size << ',' << format_real(s.self_estimate)
      << ',' << format_optional(s.exact_value) << ',' << (s.goal_reached ? 1 : 0) << ','
      << (s.goal_step ? std::to_string(*s.goal_step) : std::string()) << ',' << s.world_steps << ','
      << format_real(s.discounted_return) << ',' << s.phases_total;
  for (auto n : s.stats.phase_counts) out << ',' << n;
  out << ',' << s.stats.splits << ',' << s.stats.merges;
  return out.str();
}

SeedSummary run_seed(const ExperimentSpec& spec, std::shared_ptr<const ProblemInstance> problem, std::uint64_t seed,
                     const std::string& dir) {
  const RunConfig rc = run_config_for(spec, *problem, seed);
  const std::string stem = dir + "/seed-" + std::to_string(seed);
  SeedSummary out;
  out.seed = seed;
  std::shared_ptr<const PolicySnapshot> snapshot;

  std::ostringstream phases;
  phases << "phase_index,phase,worldview_size,value_at_initial\n";
  auto observe = [&](Planner& planner) {
    planner.set_phase_observer([&phases](const PhaseLog& log) {
      phases << log.index << ',' << to_string(log.phase) << ',' << log.worldview_size << ','
             << format_real(log.value_at_initial) << '\n';
    });
  };

  if (rc.mode == RunMode::Precursor) {
    Planner planner(problem, rc.planner, seed);
    observe(planner);
    planner.run_phases(rc.phase_budget);
    snapshot = planner.latest_snapshot();
    out.stats = planner.stats();
    out.phases_total = planner.phases_total();
    out.peak_worldview_size = out.stats.peak_worldview_size;
  } else {
    // The per-phase log is only recorded for the deterministic interleave.
    RunTrace trace = run_recurrent(problem, rc);
    snapshot = trace.final_snapshot;
    out.stats = trace.stats;
    out.phases_total = snapshot->phases_total;
    out.peak_worldview_size = trace.peak_worldview_size;
    out.goal_reached = trace.goal_reached;
    out.goal_step = trace.goal_step;
    out.world_steps = trace.rows.size();
    out.discounted_return = discounted_return(trace, rc.planner.gamma);
    auto csv = open_output(stem + "-trace.csv");
    write_trace_csv(csv, *problem, trace);
    phases.str("");
  }
  out.final_worldview_size = snapshot->worldview_size();
  out.self_estimate = snapshot->value_at(problem->initial_state);
  if (rc.evaluate_exact && problem->space().size() <= static_cast<StateCount>(rc.exact_cap)) {
    out.exact_value = evaluate_snapshot_exact(*problem, *snapshot, rc.planner.gamma, rc.exact_cap);
  }
  if (rc.mode == RunMode::Precursor) {
    auto csv = open_output(stem + "-phases.csv");
    csv << phases.str();
  }
  auto snap = open_output(stem + ".snapshot");
  save_snapshot(snap, *problem, *snapshot);
  return out;
}

std::vector<SeedSummary> run_experiment(const ExperimentSpec& spec, std::ostream& log) {
  if (spec.seeds.empty()) throw Error("no seeds given");
  auto problem = resolve_problem(spec);
  run_config_for(spec, *problem, spec.seeds.front());
  const std::string dir = resolved_out_dir(spec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir + "': " + ec.message());
  {
    auto out = open_output(dir + "/experiment.json");
    out << spec_to_json(spec);
  }

  std::vector<SeedSummary> results(spec.seeds.size());
  std::vector<std::exception_ptr> failures(spec.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < spec.seeds.size();) {
      try {
        results[i] = run_seed(spec, problem, spec.seeds[i], dir);
        std::lock_guard lock(log_mutex);
        const auto& r = results[i];
        log << "seed " << r.seed << ": |W| " << r.final_worldview_size << ", V^(s0) " << format_real(r.self_estimate);
        if (r.exact_value) log << ", exact " << format_real(*r.exact_value);
        if (spec.mode == RunMode::Recurrent) log << ", goal " << (r.goal_reached ? "reached" : "not reached");
        log << '\n';
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(spec.seeds.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  auto summary = open_output(dir + "/summary.csv");
  summary << kSummaryHeader << '\n';
  for (const auto& r : results) summary << summary_row(r) << '\n';
  return results;
}

}  // namespace wvplan
