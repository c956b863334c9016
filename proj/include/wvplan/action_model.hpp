#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wvplan/decision_tree.hpp"
#include "wvplan/factored_space.hpp"

namespace wvplan {

using ActionId = std::uint32_t;

struct StateProbability {
  SpecificState state;
  double probability = 0.0;
};

/// Actions with first-match rule lists compiled to decision trees, plus a
/// state-only reward. Action 0 is the default action a0; the order is the
/// tie-break order everywhere.
class ActionModel {
 public:
  ActionModel() = default;
  ActionModel(FactoredSpace space, std::vector<std::string> action_names,
              std::vector<std::vector<TransitionRule>> rules, std::vector<RewardRule> reward_rules,
              double reward_fallback = 0.0);

  const FactoredSpace& space() const { return space_; }

  std::size_t num_actions() const { return names_.size(); }
  const std::string& action_name(ActionId a) const { return names_.at(a); }
  const std::vector<std::string>& action_names() const { return names_; }
  std::optional<ActionId> find_action(std::string_view name) const;
  ActionId require_action(std::string_view name) const;

  const std::vector<TransitionRule>& rules(ActionId a) const { return rules_.at(a); }
  const DecisionTree& tree(ActionId a) const { return trees_.at(a); }
  const std::vector<RewardRule>& reward_rules() const { return reward_rules_; }
  double reward_fallback() const { return reward_fallback_; }
  const DecisionTree& reward_tree() const { return reward_tree_; }

  /// Post-state distribution with duplicate post-states merged, in order of
  /// first appearance.
  std::vector<StateProbability> transition_distribution(ActionId a, std::span<const Value> state) const;

  double reward_of_state(std::span<const Value> state) const { return reward_tree_.reward(state); }

  std::vector<DimIndex> reward_dimensions() const { return reward_tree_.tested_dimensions(); }

  double min_reward() const;
  double max_reward() const;

 private:
  FactoredSpace space_;
  std::vector<std::string> names_;
  std::vector<std::vector<TransitionRule>> rules_;
  std::vector<DecisionTree> trees_;
  std::vector<RewardRule> reward_rules_;
  double reward_fallback_ = 0.0;
  DecisionTree reward_tree_;
};

/// Root-to-leaf paths of every action tree, deduplicated and sorted.
std::vector<PartialAssignment> enumerate_nexuses(const ActionModel& model);

/// Reference interpreter of the rule lists, independent of the trees.
std::vector<StateProbability> first_match_distribution(const ActionModel& model, ActionId a,
                                                       std::span<const Value> state);

}  // namespace wvplan
