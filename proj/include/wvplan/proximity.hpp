#pragma once

#include <vector>

#include "wvplan/abstract_planner.hpp"

namespace wvplan {

/// Action distribution per worldview state, indexed by StateId.
using StochasticPolicy = std::vector<std::vector<double>>;

/// The current action keeps 1 − ρ; the other actions share ρ equally.
StochasticPolicy build_future_policy(const Worldview& wv, const PlannerTables& t, const PlannerConfig& c,
                                     std::size_t num_actions);

/// 1 − γ_p at the state containing s_cur, zero elsewhere (indexed by StateId).
std::vector<double> cur_vector(const Worldview& wv, std::span<const Value> s_cur, const PlannerConfig& c);

struct ProximityReport {
  int iterations = 0;
  double residual = 0.0;
  double total = 0.0;
};

/// Solves (I − γ_p T_π̃ᵀ) P = cur by fixed-point iteration and stores P into
/// the tables. Starts from the stored P when it is a distribution, so the
/// total mass stays one throughout.
ProximityReport compute_proximity(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t,
                                  std::span<const Value> s_cur, const PlannerConfig& c);

}  // namespace wvplan
