#include "wvplan/planner_loop.hpp"

#include <chrono>
#include <cmath>

namespace wvplan {

void CurrentStateMailbox::put(SpecificState s) {
  std::lock_guard lock(mutex_);
  state_ = std::move(s);
}

SpecificState CurrentStateMailbox::get() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void SnapshotChannel::publish(std::shared_ptr<const PolicySnapshot> s) {
  std::lock_guard lock(mutex_);
  latest_ = std::move(s);
}

std::shared_ptr<const PolicySnapshot> SnapshotChannel::latest() const {
  std::lock_guard lock(mutex_);
  return latest_;
}

std::array<double, kNumPhases> uniform_phase_weights(const std::vector<Phase>& enabled) {
  std::array<double, kNumPhases> w{};
  for (auto p : enabled) w[static_cast<std::size_t>(p)] = 1.0;
  return w;
}

Planner::Planner(std::shared_ptr<const ProblemInstance> problem, PlannerConfig config, std::uint64_t seed)
    : problem_(std::move(problem)),
      config_((config.validate(), std::move(config))),
      rng_(seed, 1),
      worldview_(select_initial_abstraction(*problem_, config_.reward_step, config_.nexus_step,
                                            config_.max_worldview_size)),
      dynamics_(problem_->model),
      current_(problem_->initial_state),
      mailbox_(problem_->initial_state) {
  tables_.ensure(worldview_.id_bound());
  for (auto w : worldview_.sorted_ids()) {
    tables_.policy[w] = 0;
    tables_.value[w] = 0.0;
    tables_.proximity[w] = worldview_.fraction(w);
  }
  policy_value_phase(worldview_, dynamics_, tables_, config_);
  note_size();
  publish();
}

void Planner::note_size() { stats_.peak_worldview_size = std::max(stats_.peak_worldview_size, worldview_.size()); }

Phase Planner::draw_phase() { return static_cast<Phase>(rng_.weighted(config_.phase_weights)); }

ProximityReport Planner::refresh_proximity() {
  auto report = compute_proximity(worldview_, dynamics_, tables_, current_, config_);
  ++stats_.proximity_solves;
  stats_.max_proximity_mass_error = std::max(stats_.max_proximity_mass_error, std::abs(report.total - 1.0));
  proximity_stale_ = false;
  return report;
}

void Planner::execute(Phase phase) {
  switch (phase) {
    case Phase::PolicyValue: {
      const auto before = tables_.policy;
      policy_value_phase(worldview_, dynamics_, tables_, config_);
      if (before != tables_.policy) proximity_stale_ = true;
      break;
    }
    case Phase::PolicyRefine: {
      const auto n = policy_based_refinement(worldview_, dynamics_, tables_, config_, rng_);
      stats_.splits += n;
      if (n > 0) proximity_stale_ = true;
      break;
    }
    case Phase::ProximityCalc:
      refresh_proximity();
      break;
    case Phase::ProximityRefine: {
      if (proximity_stale_) refresh_proximity();
      const auto n = proximity_based_refinement(worldview_, tables_, config_, rng_);
      stats_.splits += n;
      if (n > 0) proximity_stale_ = true;
      value_only_phase(worldview_, dynamics_, tables_, config_, config_.value_only_iterations);
      break;
    }
    case Phase::ProximityCoarsen: {
      if (proximity_stale_) refresh_proximity();
      const auto n = proximity_based_coarsening(worldview_, tables_, config_, rng_);
      stats_.merges += n;
      if (n > 0) proximity_stale_ = true;
      break;
    }
  }
  ++stats_.phase_counts[static_cast<std::size_t>(phase)];
  note_size();
}

std::shared_ptr<const PolicySnapshot> Planner::iterate() {
  const auto start = std::chrono::steady_clock::now();
  const Phase phase = draw_phase();
  execute(phase);
  ++phases_total_;
  SpecificState latest = mailbox_.get();
  if (latest != current_) {
    current_ = std::move(latest);
    proximity_stale_ = true;
  }
  publish();
  if (observer_) {
    PhaseLog log;
    log.index = phases_total_;
    log.phase = phase;
    log.worldview_size = worldview_.size();
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.value_at_initial = tables_.value[worldview_.locate(problem_->initial_state)];
    observer_(log);
  }
  return channel_.latest();
}

std::vector<std::shared_ptr<const PolicySnapshot>> Planner::run_phases(std::size_t budget) {
  std::vector<std::shared_ptr<const PolicySnapshot>> out;
  out.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) out.push_back(iterate());
  return out;
}

void Planner::publish() {
  if (!snapshot_worldview_ || snapshot_version_ != worldview_.version()) {
    snapshot_worldview_ = std::make_shared<const Worldview>(worldview_);
    snapshot_version_ = worldview_.version();
  }
  auto snap = std::make_shared<PolicySnapshot>();
  snap->sequence = sequence_++;
  snap->phases_total = phases_total_;
  snap->worldview = snapshot_worldview_;
  snap->policy.assign(tables_.policy.begin(), tables_.policy.begin() + worldview_.id_bound());
  snap->value.assign(tables_.value.begin(), tables_.value.begin() + worldview_.id_bound());
  channel_.publish(std::move(snap));
}

}  // namespace wvplan
