#include "wvplan/abstract_planner.hpp"

#include <cmath>

namespace wvplan {

std::string to_string(PolicyVariant v) { return v == PolicyVariant::Simple ? "simple" : "lua"; }

std::string to_string(Phase p) {
  switch (p) {
    case Phase::PolicyValue: return "policy-value";
    case Phase::PolicyRefine: return "policy-refine";
    case Phase::ProximityCalc: return "proximity-calc";
    case Phase::ProximityRefine: return "proximity-refine";
    case Phase::ProximityCoarsen: return "coarsen";
  }
  return "?";
}

PolicyVariant parse_policy_variant(std::string_view text) {
  if (text == "simple") return PolicyVariant::Simple;
  if (text == "lua") return PolicyVariant::Lua;
  throw Error("unknown policy variant '" + std::string(text) + "'");
}

Phase parse_phase(std::string_view text) {
  for (std::size_t i = 0; i < kNumPhases; ++i) {
    if (to_string(static_cast<Phase>(i)) == text) return static_cast<Phase>(i);
  }
  throw Error("unknown phase '" + std::string(text) + "'");
}

void PlannerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("gamma must lie in [0,1)");
  if (!(gamma_p >= 0.0 && gamma_p < 1.0)) throw Error("gamma_p must lie in [0,1)");
  if (!(replanning_probability >= 0.0 && replanning_probability <= 1.0)) {
    throw Error("replanning probability must lie in [0,1]");
  }
  if (n_sweeps < 1) throw Error("n_sweeps must be positive");
  if (value_only_iterations < 0) throw Error("value-only iterations must be non-negative");
  if (!(refine_threshold >= 0.0)) throw Error("refine threshold must be non-negative");
  if (!(coarsen_threshold >= 0.0)) throw Error("coarsen threshold must be non-negative");
  double total = 0.0;
  for (double w : phase_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("phase weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw Error("at least one phase needs a positive weight");
  if (max_worldview_size < 1) throw Error("worldview size cap must be positive");
  if (!(tie_tolerance >= 0.0)) throw Error("tie tolerance must be non-negative");
}


void PlannerTables::ensure(std::size_t id_bound) {
  if (policy.size() < id_bound) {
    policy.resize(id_bound, 0);
    value.resize(id_bound, 0.0);
    proximity.resize(id_bound, 0.0);
  }
}

namespace {

double expectation(const std::vector<Successor>& succ, const std::vector<double>& value) {
  double acc = 0.0;
  for (const auto& s : succ) acc += s.probability * value[s.id];
  return acc;
}

double backup(const Worldview& wv, AbstractDynamics& dyn, const PlannerTables& t, const PlannerConfig& c, StateId w) {
  const auto& succ = dyn.transitions(wv, w, t.policy[w]);
  const double r = dyn.reward(wv, w);
  if (succ.size() == 1 && succ.front().id == w && std::abs(1.0 - succ.front().probability) <= 1e-12) {
    return r / (1.0 - c.gamma);
  }
  return r + c.gamma * expectation(succ, t.value);
}

template <class WeightsFn>
void greedy_update(const PlannerConfig& c, PlannerTables& t, StateId w, std::size_t num_actions, WeightsFn&& weights) {
  ActionId best_a = 0;
  double best = expectation(weights(ActionId{0}), t.value);
  for (ActionId a = 1; a < num_actions; ++a) {
    const double q = expectation(weights(a), t.value);
    if (q > best + c.tie_tolerance * std::max(1.0, std::abs(best))) {
      best = q;
      best_a = a;
    }
  }
  t.policy[w] = best_a;
}

}  // namespace

void value_update(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c, StateId w) {
  t.value[w] = backup(wv, dyn, t, c, w);
}

void policy_update_simple(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                          StateId w) {
  greedy_update(c, t, w, dyn.model().num_actions(),
                [&](ActionId a) -> const std::vector<Successor>& { return dyn.transitions(wv, w, a); });
}

void policy_update_lua(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                       StateId w) {
  greedy_update(c, t, w, dyn.model().num_actions(),
                [&](ActionId a) -> const std::vector<Successor>& { return dyn.lua_weights(wv, w, a); });
}

void policy_value_phase(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c) {
  t.ensure(wv.id_bound());
  const auto& order = wv.sorted_ids();
  for (int sweep = 0; sweep < c.n_sweeps; ++sweep) {
    for (auto w : order) value_update(wv, dyn, t, c, w);
    for (auto w : order) {
      if (c.variant == PolicyVariant::Lua) {
        policy_update_lua(wv, dyn, t, c, w);
      } else {
        policy_update_simple(wv, dyn, t, c, w);
      }
      value_update(wv, dyn, t, c, w);
    }
  }
}

void value_only_phase(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                      int iterations) {
  t.ensure(wv.id_bound());
  const auto& order = wv.sorted_ids();
  for (int i = 0; i < iterations; ++i) {
    for (auto w : order) value_update(wv, dyn, t, c, w);
  }
}

double policy_bellman_residual(const Worldview& wv, AbstractDynamics& dyn, const PlannerTables& t,
                               const PlannerConfig& c) {
  double worst = 0.0;
  for (auto w : wv.sorted_ids()) worst = std::max(worst, std::abs(t.value[w] - backup(wv, dyn, t, c, w)));
  return worst;
}

void propagate_split(const Worldview& wv, PlannerTables& t, StateId parent, const std::vector<StateId>& children) {
  t.ensure(wv.id_bound());
  const double share = t.proximity[parent] / static_cast<double>(children.size());
  for (auto c : children) {
    t.policy[c] = t.policy[parent];
    t.value[c] = t.value[parent];
    t.proximity[c] = share;
  }
}

void propagate_merge(PlannerTables& t, const std::vector<StateId>& members, std::size_t chosen, StateId merged) {
  t.ensure(static_cast<std::size_t>(merged) + 1);
  double value = 0.0, proximity = 0.0;
  for (auto m : members) {
    value += t.value[m];
    proximity += t.proximity[m];
  }
  t.policy[merged] = t.policy[members.at(chosen)];
  t.value[merged] = value / static_cast<double>(members.size());
  t.proximity[merged] = proximity;
}

}  // namespace wvplan
