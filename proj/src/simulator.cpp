#include "wvplan/simulator.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace wvplan {

std::string to_string(RunMode m) { return m == RunMode::Precursor ? "precursor" : "recurrent"; }

RunMode parse_run_mode(std::string_view text) {
  if (text == "precursor") return RunMode::Precursor;
  if (text == "recurrent") return RunMode::Recurrent;
  throw Error("unknown run mode '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  if (phase_budget == 0 && mode == RunMode::Precursor) throw Error("phase budget must be positive");
  if (phases_per_world_step == 0) throw Error("phases per world step must be positive");
  if (world_step_limit == 0) throw Error("world step limit must be positive");
  planner.validate();
}

std::pair<SpecificState, double> step_world(const ActionModel& model, std::span<const Value> s, ActionId a,
                                            Rng& rng) {
  const double reward = model.reward_of_state(s);
  const auto dist = model.transition_distribution(a, s);
  double u = rng.uniform();
  for (const auto& sp : dist) {
    if (u < sp.probability) return {sp.state, reward};
    u -= sp.probability;
  }
  // Rounding left u just above the cumulative total.
  for (auto it = dist.rbegin(); it != dist.rend(); ++it) {
    if (it->probability > 0.0) return {it->state, reward};
  }
  throw Error("empty transition distribution");
}

bool satisfies(const std::optional<PartialAssignment>& goal, std::span<const Value> s) {
  if (!goal) return false;
  for (const auto& lit : *goal) {
    if (s[lit.dim] != lit.value) return false;
  }
  return true;
}

double evaluate_snapshot_exact(const ProblemInstance& problem, const PolicySnapshot& snapshot, double gamma,
                               std::uint64_t cap) {
  const auto mdp = enumerate_mdp(problem, cap);
  const auto policy = tabulate_policy(
      problem, [&](std::span<const Value> s) { return snapshot.action(s); }, cap);
  return evaluate_policy_exact(mdp, policy, gamma)[mdp.initial_index];
}

PrecursorResult run_precursor(std::shared_ptr<const ProblemInstance> problem, const RunConfig& config) {
  config.validate();
  Planner planner(problem, config.planner, config.seed);
  planner.run_phases(config.phase_budget);
  PrecursorResult out;
  out.snapshot = planner.latest_snapshot();
  out.self_estimate = out.snapshot->value_at(problem->initial_state);
  out.stats = planner.stats();
  if (config.evaluate_exact && problem->space().size() <= static_cast<StateCount>(config.exact_cap)) {
    out.exact_value = evaluate_snapshot_exact(*problem, *out.snapshot, config.planner.gamma, config.exact_cap);
  }
  return out;
}

namespace {

void record_step(RunTrace& trace, const ProblemInstance& problem, std::size_t step, const SpecificState& s,
                 const PolicySnapshot& snap) {
  if (satisfies(problem.goal, s) && !trace.goal_reached) {
    trace.goal_reached = true;
    trace.goal_step = step;
  }
  TraceRow row;
  row.step = step;
  row.state = s;
  row.action = snap.action(s);
  row.worldview_size = snap.worldview_size();
  row.snapshot_seq = snap.sequence;
  row.phases_total = snap.phases_total;
  trace.peak_worldview_size = std::max(trace.peak_worldview_size, row.worldview_size);
  trace.rows.push_back(std::move(row));
}

RunTrace recurrent_interleaved(std::shared_ptr<const ProblemInstance> problem, const RunConfig& config) {
  Planner planner(problem, config.planner, config.seed);
  Rng world(config.seed, 2);
  RunTrace trace;
  SpecificState s = problem->initial_state;
  for (std::size_t step = 0; step < config.world_step_limit; ++step) {
    planner.run_phases(config.phases_per_world_step);
    const auto snap = planner.latest_snapshot();
    record_step(trace, *problem, step, s, *snap);
    auto [next, reward] = step_world(problem->model, s, trace.rows.back().action, world);
    trace.rows.back().reward = reward;
    s = std::move(next);
    planner.mailbox().put(s);
    if (config.stop_at_goal && trace.goal_reached) break;
  }
  if (satisfies(problem->goal, s) && !trace.goal_reached) {
    trace.goal_reached = true;
    trace.goal_step = trace.rows.size();
  }
  trace.final_state = std::move(s);
  trace.stats = planner.stats();
  trace.final_snapshot = planner.latest_snapshot();
  return trace;
}

// The planner thread iterates freely; the executive acts whenever at least
// phases_per_world_step further phases have completed.
RunTrace recurrent_concurrent(std::shared_ptr<const ProblemInstance> problem, const RunConfig& config) {
  Planner planner(problem, config.planner, config.seed);
  Rng world(config.seed, 2);
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> completed{0};
  std::exception_ptr failure;
  std::thread worker([&] {
    try {
      while (!stop.load(std::memory_order_relaxed)) {
        planner.iterate();
        completed.fetch_add(1, std::memory_order_release);
      }
    } catch (...) {
      failure = std::current_exception();
      stop = true;
    }
  });

  RunTrace trace;
  SpecificState s = problem->initial_state;
  std::uint64_t next_target = config.phases_per_world_step;
  for (std::size_t step = 0; step < config.world_step_limit && !stop; ++step) {
    while (completed.load(std::memory_order_acquire) < next_target && !stop) std::this_thread::yield();
    if (stop) break;
    next_target = completed.load(std::memory_order_acquire) + config.phases_per_world_step;
    const auto snap = planner.channel().latest();
    record_step(trace, *problem, step, s, *snap);
    auto [next, reward] = step_world(problem->model, s, trace.rows.back().action, world);
    trace.rows.back().reward = reward;
    s = std::move(next);
    planner.mailbox().put(s);
    if (config.stop_at_goal && trace.goal_reached) break;
  }
  stop = true;
  worker.join();
  if (failure) std::rethrow_exception(failure);
  if (satisfies(problem->goal, s) && !trace.goal_reached) {
    trace.goal_reached = true;
    trace.goal_step = trace.rows.size();
  }
  trace.final_state = std::move(s);
  trace.stats = planner.stats();
  trace.final_snapshot = planner.latest_snapshot();
  return trace;
}

}  // namespace

RunTrace run_recurrent(std::shared_ptr<const ProblemInstance> problem, const RunConfig& config) {
  config.validate();
  return config.concurrent ? recurrent_concurrent(std::move(problem), config)
                           : recurrent_interleaved(std::move(problem), config);
}

double discounted_return(const RunTrace& trace, double gamma) {
  double total = 0.0, discount = 1.0;
  for (const auto& row : trace.rows) {
    total += discount * row.reward;
    discount *= gamma;
  }
  return total;
}

void write_trace_csv(std::ostream& out, const ProblemInstance& problem, const RunTrace& trace) {
  out << "step,x_state,action,reward,worldview_size,snapshot_seq,phases_total\n";
  for (const auto& row : trace.rows) {
    out << row.step << ',' << problem.space().format(row.state) << ',' << problem.model.action_name(row.action)
        << ',' << format_real(row.reward) << ',' << row.worldview_size << ',' << row.snapshot_seq << ',' << row.phases_total << '\n';
  }
}

void save_snapshot(std::ostream& out, const ProblemInstance& problem, const PolicySnapshot& snapshot) {
  out << "# wvplan snapshot " << problem.name << '\n';
  for (auto id : snapshot.worldview->sorted_ids()) {
    out << snapshot.worldview->describe(id) << '\t' << problem.model.action_name(snapshot.policy[id]) << '\t'
        << format_real(snapshot.value[id]) << '\n';
  }
}

std::shared_ptr<const PolicySnapshot> load_snapshot(std::istream& in, const ProblemInstance& problem) {
  const FactoredSpace& space = problem.space();
  std::vector<Pattern> patterns;
  std::vector<ActionId> actions;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto where = [&] { return "snapshot line " + std::to_string(line_no) + ": "; };
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw Error(where() + "expected pattern, action and value");
    Pattern p(space.num_dims(), kAbstract);
    std::vector<bool> seen(space.num_dims(), false);
    std::istringstream items(line.substr(0, tab1));
    std::string item;
    while (items >> item) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(where() + "malformed item '" + item + "'");
      const DimIndex d = space.require_dim(item.substr(0, eq));
      const std::string v = item.substr(eq + 1);
      if (v != "*") p[d] = space.require_value(d, v);
      seen[d] = true;
    }
    for (DimIndex d = 0; d < space.num_dims(); ++d) {
      if (!seen[d]) throw Error(where() + "dimension '" + space.dim(d).name + "' missing");
    }
    patterns.push_back(std::move(p));
    actions.push_back(problem.model.require_action(line.substr(tab1 + 1, tab2 - tab1 - 1)));
    values.push_back(std::stod(line.substr(tab2 + 1)));
  }
  auto wv = std::make_shared<Worldview>(Worldview::from_patterns(space, patterns));
  if (auto problems = wv->check_partition(); !problems.empty()) throw Error("snapshot is not a partition: " + problems[0]);
  auto snap = std::make_shared<PolicySnapshot>();
  snap->policy.assign(wv->id_bound(), 0);
  snap->value.assign(wv->id_bound(), 0.0);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const StateId id = wv->find(patterns[i]);
    snap->policy[id] = actions[i];
    snap->value[id] = values[i];
  }
  snap->worldview = std::move(wv);
  return snap;
}

}  // namespace wvplan
