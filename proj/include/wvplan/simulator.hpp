#pragma once

#include <iosfwd>
#include <optional>
#include <utility>

#include "wvplan/exact_oracle.hpp"
#include "wvplan/planner_loop.hpp"

namespace wvplan {

enum class RunMode { Precursor, Recurrent };

std::string to_string(RunMode m);
RunMode parse_run_mode(std::string_view text);

struct RunConfig {
  RunMode mode = RunMode::Precursor;
  std::size_t phase_budget = 1000;
  std::size_t phases_per_world_step = 20;
  std::size_t world_step_limit = 500;
  std::uint64_t seed = 0;
  /// Recurrent runs end early once a goal state is visited.
  bool stop_at_goal = false;
  /// Planner and executive on separate threads (not deterministic).
  bool concurrent = false;
  /// Precursor runs evaluate the final policy exactly when |S| is within the cap.
  bool evaluate_exact = true;
  std::uint64_t exact_cap = kDefaultEnumerationCap;
  PlannerConfig planner;

  void validate() const;
};

/// Samples the next state; the reward is that of the pre-step state.
std::pair<SpecificState, double> step_world(const ActionModel& model, std::span<const Value> s, ActionId a, Rng& rng);

struct TraceRow {
  std::size_t step = 0;
  SpecificState state;
  ActionId action = 0;
  double reward = 0.0;
  std::size_t worldview_size = 0;
  std::uint64_t snapshot_seq = 0;
  std::uint64_t phases_total = 0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  SpecificState final_state;
  bool goal_reached = false;
  std::optional<std::size_t> goal_step;
  std::size_t peak_worldview_size = 0;
  PlannerStats stats;
  std::shared_ptr<const PolicySnapshot> final_snapshot;
};

struct PrecursorResult {
  std::shared_ptr<const PolicySnapshot> snapshot;
  double self_estimate = 0.0;
  std::optional<double> exact_value;
  PlannerStats stats;
};

bool satisfies(const std::optional<PartialAssignment>& goal, std::span<const Value> s);

PrecursorResult run_precursor(std::shared_ptr<const ProblemInstance> problem, const RunConfig& config);
RunTrace run_recurrent(std::shared_ptr<const ProblemInstance> problem, const RunConfig& config);

/// Exact value at s0 of a snapshot's policy (|S| within the cap).
double evaluate_snapshot_exact(const ProblemInstance& problem, const PolicySnapshot& snapshot, double gamma,
                               std::uint64_t cap = kDefaultEnumerationCap);

/// Σ_t γ^t r_t over the trace.
double discounted_return(const RunTrace& trace, double gamma);

/// `step,x_state,action,reward,worldview_size,snapshot_seq,phases_total`.
void write_trace_csv(std::ostream& out, const ProblemInstance& problem, const RunTrace& trace);

/// Snapshot file: a `# wvplan snapshot <problem>` header, then one line per
/// worldview state: `x=3 y=* ...<TAB>action<TAB>value`.
void save_snapshot(std::ostream& out, const ProblemInstance& problem, const PolicySnapshot& snapshot);
std::shared_ptr<const PolicySnapshot> load_snapshot(std::istream& in, const ProblemInstance& problem);

}  // namespace wvplan
