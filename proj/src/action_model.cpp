#include "wvplan/action_model.hpp"

#include <algorithm>
#include <set>

namespace wvplan {

ActionModel::ActionModel(FactoredSpace space, std::vector<std::string> action_names,
                         std::vector<std::vector<TransitionRule>> rules, std::vector<RewardRule> reward_rules,
                         double reward_fallback)
    : space_(std::move(space)),
      names_(std::move(action_names)),
      rules_(std::move(rules)),
      reward_rules_(std::move(reward_rules)),
      reward_fallback_(reward_fallback) {
  if (names_.empty()) throw Error("a model needs at least one action");
  if (rules_.size() != names_.size()) throw Error("one rule list per action is required");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error("action with empty name");
    if (!seen.insert(n).second) throw Error("duplicate action '" + n + "'");
  }
  trees_.reserve(rules_.size());
  for (std::size_t a = 0; a < rules_.size(); ++a) {
    try {
      trees_.push_back(compile_rule_list(space_, rules_[a]));
    } catch (const RuleError& e) {
      throw RuleError(e.index(), std::string("action '") + names_[a] + "': " + e.what());
    }
  }
  reward_tree_ = compile_reward_rules(space_, reward_rules_, reward_fallback_);
}

std::optional<ActionId> ActionModel::find_action(std::string_view name) const {
  for (ActionId a = 0; a < names_.size(); ++a) {
    if (names_[a] == name) return a;
  }
  return std::nullopt;
}

ActionId ActionModel::require_action(std::string_view name) const {
  auto a = find_action(name);
  if (!a) throw Error("unknown action '" + std::string(name) + "'");
  return *a;
}

namespace {

void add_outcome(std::vector<StateProbability>& out, SpecificState next, double p) {
  for (auto& sp : out) {
    if (sp.state == next) {
      sp.probability += p;
      return;
    }
  }
  out.push_back(StateProbability{std::move(next), p});
}

}  // namespace

std::vector<StateProbability> ActionModel::transition_distribution(ActionId a, std::span<const Value> state) const {
  if (a >= trees_.size()) throw Error("unknown action id " + std::to_string(a));
  std::vector<StateProbability> out;
  SpecificState base(state.begin(), state.end());
  trees_[a].for_each_outcome(state, [&](double p, const PartialAssignment& effect) {
    add_outcome(out, apply(effect, base), p);
  });
  return out;
}

double ActionModel::min_reward() const {
  double m = reward_fallback_;
  for (const auto& r : reward_rules_) m = std::min(m, r.value);
  return m;
}

double ActionModel::max_reward() const {
  double m = reward_fallback_;
  for (const auto& r : reward_rules_) m = std::max(m, r.value);
  return m;
}

std::vector<PartialAssignment> enumerate_nexuses(const ActionModel& model) {
  std::set<PartialAssignment> all;
  for (ActionId a = 0; a < model.num_actions(); ++a) {
    for (auto& p : model.tree(a).paths()) all.insert(std::move(p));
  }
  return {all.begin(), all.end()};
}

std::vector<StateProbability> first_match_distribution(const ActionModel& model, ActionId a,
                                                       std::span<const Value> state) {
  const auto& space = model.space();
  SpecificState base(state.begin(), state.end());
  std::vector<StateProbability> out;
  for (const auto& rule : model.rules(a)) {
    if (!space.matches(rule.guard, state)) continue;
    double total = 0.0;
    for (const auto& o : rule.outcomes) {
      add_outcome(out, apply(o.effect, base), o.probability);
      total += o.probability;
    }
    if (1.0 - total > 1e-12) add_outcome(out, base, 1.0 - total);
    return out;
  }
  out.push_back(StateProbability{base, 1.0});
  return out;
}

}  // namespace wvplan
