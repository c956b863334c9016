#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wvplan/abstract_dynamics.hpp"
#include "wvplan/worldview.hpp"

namespace wvplan {

enum class PolicyVariant { Simple, Lua };

enum class Phase : std::uint8_t { PolicyValue, PolicyRefine, ProximityCalc, ProximityRefine, ProximityCoarsen };
inline constexpr std::size_t kNumPhases = 5;

std::string to_string(PolicyVariant v);
std::string to_string(Phase p);
PolicyVariant parse_policy_variant(std::string_view text);
Phase parse_phase(std::string_view text);

/// Default proximity level for both refinement and coarsening.
inline constexpr double kDefaultProximityThreshold = 1e-7;

struct PlannerConfig {
  double gamma = 0.95;
  double gamma_p = 0.95;
  double replanning_probability = 0.1;
  int n_sweeps = 10;
  int value_only_iterations = 2;
  double refine_threshold = kDefaultProximityThreshold;
  double coarsen_threshold = kDefaultProximityThreshold;
  PolicyVariant variant = PolicyVariant::Lua;
  /// Indexed by Phase. A weight of zero disables the phase.
  std::array<double, kNumPhases> phase_weights = {1.0, 0.0, 0.0, 0.0, 0.0};
  bool reward_step = true;
  bool nexus_step = true;
  std::size_t max_worldview_size = 1'000'000;
  /// Relative tolerance under which two action values count as tied.
  double tie_tolerance = 1e-12;

  /// Throws wvplan::Error on out-of-range settings.
  void validate() const;
};

/// Policy, value and proximity per worldview state, indexed by StateId.
struct PlannerTables {
  std::vector<ActionId> policy;
  std::vector<double> value;
  std::vector<double> proximity;

  void ensure(std::size_t id_bound);
};

/// V̂(w) ← R(w)/(1−γ) when π̂(w) keeps w in place with probability one,
/// otherwise R(w) + γ Σ Pr(w, π̂(w), w') V̂(w').
void value_update(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c, StateId w);

/// Greedy action on the successor values, ties to the lowest action index.
void policy_update_simple(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                          StateId w);

/// Greedy action on successor values averaged over locally uniform regions.
void policy_update_lua(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                       StateId w);

/// n_sweeps iterations of: value update for every state, then policy
/// update followed by value update for every state (sorted pattern order).
void policy_value_phase(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c);

void value_only_phase(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                      int iterations);

/// max_w |V̂(w) − backup(w)| for the current policy and values.
double policy_bellman_residual(const Worldview& wv, AbstractDynamics& dyn, const PlannerTables& t,
                               const PlannerConfig& c);

/// Copies policy and value to the children of a split and divides the proximity by size.
void propagate_split(const Worldview& wv, PlannerTables& t, StateId parent, const std::vector<StateId>& children);

/// Table entries for a merged state: policy from member `chosen`, mean value, summed proximity.
void propagate_merge(PlannerTables& t, const std::vector<StateId>& members, std::size_t chosen, StateId merged);

}  // namespace wvplan
