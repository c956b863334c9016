#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wvplan/factored_space.hpp"

namespace wvplan {

struct Outcome {
  double probability = 1.0;
  PartialAssignment effect;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// One line of a first-match rule list. Each outcome applies its effect
/// with its probability; any remaining mass leaves the state unchanged.
struct TransitionRule {
  PartialAssignment guard;
  std::vector<Outcome> outcomes;

  static TransitionRule simple(PartialAssignment guard, double probability, PartialAssignment effect);

  friend bool operator==(const TransitionRule&, const TransitionRule&) = default;
};

struct RewardRule {
  PartialAssignment guard;
  double value = 0.0;

  friend bool operator==(const RewardRule&, const RewardRule&) = default;
};

/// Rejection of a rule list, carrying the offending rule's position.
class RuleError : public Error {
 public:
  RuleError(std::size_t index, const std::string& what)
      : Error("rule " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Decision tree over the dimensions of a factored space. Test nodes branch
/// once per value of one dimension, chance nodes carry one probability per
/// child, and leaves hold either a partial post-assignment (dimensions not
/// mentioned keep their value) or a reward.
class DecisionTree {
 public:
  enum class NodeKind : std::uint8_t { Test, Chance, Leaf };

  struct Node {
    NodeKind kind = NodeKind::Leaf;
    DimIndex dim = 0;
    std::vector<std::uint32_t> children;
    std::vector<double> probabilities;
    PartialAssignment effect;
    double reward = 0.0;

    friend bool operator==(const Node&, const Node&) = default;
  };

  DecisionTree();

  std::uint32_t root() const { return 0; }
  const Node& node(std::uint32_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }

  /// Calls `fn(probability, effect)` for each leaf reached from `state`.
  template <class Fn>
  void for_each_outcome(std::span<const Value> state, Fn&& fn) const {
    walk(root(), 1.0, state, fn);
  }

  double reward(std::span<const Value> state) const;

  /// One partial assignment per root-to-leaf path, chance nodes ignored.
  std::vector<PartialAssignment> paths() const;

  std::vector<DimIndex> tested_dimensions() const;

  /// Structural problems: probabilities not summing to one, a dimension
  /// tested twice on one path, out-of-range dims or values.
  std::vector<std::string> validate(const FactoredSpace& space) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  friend class TreeBuilder;

  template <class Fn>
  void walk(std::uint32_t i, double p, std::span<const Value> state, Fn& fn) const {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Test:
        walk(n.children[state[n.dim]], p, state, fn);
        break;
      case NodeKind::Chance:
        for (std::size_t c = 0; c < n.children.size(); ++c) walk(n.children[c], p * n.probabilities[c], state, fn);
        break;
      case NodeKind::Leaf:
        fn(p, n.effect);
        break;
    }
  }

  std::vector<Node> nodes_;
};

/// Compiles a first-match rule list into a decision tree. Tests follow the
/// guard of the earliest rule still able to match, in dimension order.
DecisionTree compile_rule_list(const FactoredSpace& space, std::span<const TransitionRule> rules);

/// First-match reward rules; states matching no rule get `fallback`.
DecisionTree compile_reward_rules(const FactoredSpace& space, std::span<const RewardRule> rules,
                                  double fallback = 0.0);

/// Throws RuleError for the first rule referencing unknown dims/values or
/// carrying invalid probabilities.
void validate_rules(const FactoredSpace& space, std::span<const TransitionRule> rules);

}  // namespace wvplan
