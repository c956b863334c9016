#pragma once

#include <array>
#include <functional>
#include <memory>
#include <mutex>

#include "wvplan/abstraction_control.hpp"
#include "wvplan/proximity.hpp"

namespace wvplan {

/// Immutable policy published after every loop iteration.
struct PolicySnapshot {
  std::uint64_t sequence = 0;
  std::uint64_t phases_total = 0;
  std::shared_ptr<const Worldview> worldview;
  std::vector<ActionId> policy;  // by StateId
  std::vector<double> value;     // by StateId

  ActionId action(std::span<const Value> s) const { return policy[worldview->locate(s)]; }
  double value_at(std::span<const Value> s) const { return value[worldview->locate(s)]; }
  std::size_t worldview_size() const { return worldview->size(); }
};

/// Single-value mailbox for the latest current state.
class CurrentStateMailbox {
 public:
  explicit CurrentStateMailbox(SpecificState initial) : state_(std::move(initial)) {}
  void put(SpecificState s);
  SpecificState get() const;

 private:
  mutable std::mutex mutex_;
  SpecificState state_;
};

/// Latest published snapshot; readers always see a complete snapshot.
class SnapshotChannel {
 public:
  void publish(std::shared_ptr<const PolicySnapshot> s);
  std::shared_ptr<const PolicySnapshot> latest() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const PolicySnapshot> latest_;
};

struct PhaseLog {
  std::uint64_t index = 0;
  Phase phase = Phase::PolicyValue;
  std::size_t worldview_size = 0;
  double seconds = 0.0;
  double value_at_initial = 0.0;
};

struct PlannerStats {
  std::array<std::uint64_t, kNumPhases> phase_counts{};
  std::uint64_t proximity_solves = 0;
  double max_proximity_mass_error = 0.0;
  std::size_t peak_worldview_size = 0;
  std::size_t splits = 0;
  std::size_t merges = 0;
};

/// The phase loop: initialisation followed by stochastically chosen phases,
/// each iteration ending with a current-state read and a published snapshot.
class Planner {
 public:
  Planner(std::shared_ptr<const ProblemInstance> problem, PlannerConfig config, std::uint64_t seed);
  Planner(const Planner&) = delete;
  Planner& operator=(const Planner&) = delete;

  const ProblemInstance& problem() const { return *problem_; }
  const PlannerConfig& config() const { return config_; }
  const Worldview& worldview() const { return worldview_; }
  const PlannerTables& tables() const { return tables_; }
  AbstractDynamics& dynamics() { return dynamics_; }
  const PlannerStats& stats() const { return stats_; }
  std::uint64_t phases_total() const { return phases_total_; }
  const SpecificState& current_state() const { return current_; }

  Phase draw_phase();
  void execute(Phase phase);
  /// One loop iteration; returns the snapshot it published.
  std::shared_ptr<const PolicySnapshot> iterate();
  std::vector<std::shared_ptr<const PolicySnapshot>> run_phases(std::size_t budget);

  CurrentStateMailbox& mailbox() { return mailbox_; }
  SnapshotChannel& channel() { return channel_; }
  std::shared_ptr<const PolicySnapshot> latest_snapshot() const { return channel_.latest(); }

  void set_phase_observer(std::function<void(const PhaseLog&)> fn) { observer_ = std::move(fn); }

  /// Solves for P now (also done implicitly before threshold phases when stale).
  ProximityReport refresh_proximity();

 private:
  void publish();
  void note_size();

  std::shared_ptr<const ProblemInstance> problem_;
  PlannerConfig config_;
  Rng rng_;
  Worldview worldview_;
  AbstractDynamics dynamics_;
  PlannerTables tables_;
  SpecificState current_;
  CurrentStateMailbox mailbox_;
  SnapshotChannel channel_;
  PlannerStats stats_;
  std::uint64_t phases_total_ = 0;
  std::uint64_t sequence_ = 0;
  bool proximity_stale_ = true;
  std::shared_ptr<const Worldview> snapshot_worldview_;
  std::uint64_t snapshot_version_ = 0;
  std::function<void(const PhaseLog&)> observer_;
};

/// Phase weights: uniform over the enabled phases.
std::array<double, kNumPhases> uniform_phase_weights(const std::vector<Phase>& enabled);

}  // namespace wvplan
