#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wvplan/simulator.hpp"

namespace wvplan {

/// Everything needed to reproduce a batch of seeded runs.
struct ExperimentSpec {
  /// Built-in selector (see build_problem); ignored when problem_file is set.
  std::string problem = "3doors";
  std::string problem_file;
  RunMode mode = RunMode::Precursor;
  /// Unset means the problem's own default.
  std::optional<double> gamma;
  double gamma_p = 0.95;
  double replanning_probability = 0.1;
  std::optional<double> refine_threshold;
  std::optional<double> coarsen_threshold;
  /// Phase name to weight; phases absent from the map are disabled.
  std::map<std::string, double> phase_weights = {{"policy-value", 1.0}};
  int n_sweeps = 10;
  int value_only_iterations = 2;
  std::string variant = "lua";
  bool reward_step = true;
  bool nexus_step = true;
  std::size_t max_worldview_size = 1'000'000;
  std::vector<std::uint64_t> seeds = {0};
  std::size_t phase_budget = 1000;
  std::size_t phases_per_world_step = 20;
  std::size_t world_step_limit = 500;
  bool stop_at_goal = false;
  bool concurrent = false;
  bool eval_exact = true;
  std::uint64_t exact_cap = kDefaultEnumerationCap;
  /// Empty means $WVPLAN_OUT_DIR, else `wvplan-out`.
  std::string out_dir;
  /// Seeds run in parallel on this many threads.
  unsigned jobs = 1;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

std::string spec_to_json(const ExperimentSpec& spec);
/// Keys absent from the document keep the values already in `base`.
ExperimentSpec spec_from_json(const std::string& text, ExperimentSpec base = {});
ExperimentSpec load_spec(const std::string& path, ExperimentSpec base = {});

std::shared_ptr<const ProblemInstance> resolve_problem(const ExperimentSpec& spec);
RunConfig run_config_for(const ExperimentSpec& spec, const ProblemInstance& problem, std::uint64_t seed);
std::string resolved_out_dir(const ExperimentSpec& spec);

/// Human-readable listing of every effective setting.
std::string run_header(const ExperimentSpec& spec, const ProblemInstance& problem);

struct SeedSummary {
  std::uint64_t seed = 0;
  std::size_t final_worldview_size = 0;
  std::size_t peak_worldview_size = 0;
  double self_estimate = 0.0;
  std::optional<double> exact_value;
  bool goal_reached = false;
  std::optional<std::size_t> goal_step;
  std::size_t world_steps = 0;
  double discounted_return = 0.0;
  std::uint64_t phases_total = 0;
  PlannerStats stats;
};

inline constexpr const char* kSummaryHeader =
    "seed,final_worldview_size,peak_worldview_size,self_estimate,exact_value,goal_reached,goal_step,world_steps,"
    "discounted_return,phases_total,n_policy_value,n_policy_refine,n_proximity_calc,n_proximity_refine,n_coarsen,"
    "splits,merges";

std::string summary_row(const SeedSummary& s);

/// Runs one seed and writes its files (`seed-<n>-phases.csv`, for recurrent
/// runs `seed-<n>-trace.csv`, and `seed-<n>.snapshot`) into `dir`.
SeedSummary run_seed(const ExperimentSpec& spec, std::shared_ptr<const ProblemInstance> problem, std::uint64_t seed,
                     const std::string& dir);

/// Runs every seed, writes `summary.csv` and `experiment.json`, and returns
/// the summaries in seed order. Progress lines go to `log`.
std::vector<SeedSummary> run_experiment(const ExperimentSpec& spec, std::ostream& log);

}  // namespace wvplan
