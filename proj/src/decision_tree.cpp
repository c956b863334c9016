#include "wvplan/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wvplan {

namespace {

constexpr std::size_t kMaxTreeNodes = 4'000'000;
constexpr int kUntested = -1;

}  // namespace

TransitionRule TransitionRule::simple(PartialAssignment guard, double probability, PartialAssignment effect) {
  return TransitionRule{normalize(std::move(guard)), {Outcome{probability, normalize(std::move(effect))}}};
}

DecisionTree::DecisionTree() { nodes_.push_back(Node{}); }

double DecisionTree::reward(std::span<const Value> state) const {
  std::uint32_t i = root();
  while (nodes_[i].kind == NodeKind::Test) i = nodes_[i].children[state[nodes_[i].dim]];
  return nodes_[i].reward;
}

std::vector<PartialAssignment> DecisionTree::paths() const {
  std::vector<PartialAssignment> out;
  PartialAssignment path;
  auto rec = [&](auto&& self, std::uint32_t i) -> void {
    const Node& n = nodes_[i];
    if (n.kind != NodeKind::Test) {
      PartialAssignment sorted = path;
      std::sort(sorted.begin(), sorted.end());
      out.push_back(std::move(sorted));
      return;
    }
    for (std::size_t v = 0; v < n.children.size(); ++v) {
      path.push_back(Literal{n.dim, static_cast<Value>(v)});
      self(self, n.children[v]);
      path.pop_back();
    }
  };
  rec(rec, root());
  return out;
}

std::vector<DimIndex> DecisionTree::tested_dimensions() const {
  std::set<DimIndex> dims;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Test) dims.insert(n.dim);
  }
  return {dims.begin(), dims.end()};
}

std::vector<std::string> DecisionTree::validate(const FactoredSpace& space) const {
  std::vector<std::string> problems;
  std::vector<bool> on_path(space.num_dims(), false);
  auto rec = [&](auto&& self, std::uint32_t i) -> void {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Test: {
        if (n.dim >= space.num_dims()) {
          problems.push_back("node " + std::to_string(i) + " tests unknown dimension");
          return;
        }
        if (on_path[n.dim]) problems.push_back("dimension " + space.dim(n.dim).name + " tested twice on a path");
        if (n.children.size() != space.width(n.dim)) {
          problems.push_back("node " + std::to_string(i) + " has wrong branch count");
          return;
        }
        on_path[n.dim] = true;
        for (auto c : n.children) self(self, c);
        on_path[n.dim] = false;
        break;
      }
      case NodeKind::Chance: {
        double sum = 0.0;
        for (double p : n.probabilities) sum += p;
        if (std::abs(sum - 1.0) > 1e-12) problems.push_back("chance node " + std::to_string(i) + " sums to " + std::to_string(sum));
        for (auto c : n.children) self(self, c);
        break;
      }
      case NodeKind::Leaf:
        if (!space.valid(n.effect)) problems.push_back("leaf " + std::to_string(i) + " has an invalid effect");
        break;
    }
  };
  rec(rec, root());
  return problems;
}

void validate_rules(const FactoredSpace& space, std::span<const TransitionRule> rules) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (!space.valid(r.guard)) throw RuleError(i, "guard references an unknown dimension or value");
    double total = 0.0;
    for (const auto& o : r.outcomes) {
      if (!(o.probability > 0.0 && o.probability <= 1.0)) throw RuleError(i, "probability outside (0,1]");
      if (!space.valid(o.effect)) throw RuleError(i, "effect references an unknown dimension or value");
      total += o.probability;
    }
    if (total > 1.0 + 1e-12) throw RuleError(i, "outcome probabilities exceed 1");
  }
}

class TreeBuilder {
 public:
  template <class Rule, class MakeLeaf>
  static DecisionTree build(const FactoredSpace& space, std::span<const Rule> rules, MakeLeaf&& make_leaf) {
    DecisionTree tree;
    tree.nodes_.clear();
    std::vector<int> context(space.num_dims(), kUntested);
    std::vector<std::size_t> candidates(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) candidates[i] = i;

    auto rec = [&](auto&& self, const std::vector<std::size_t>& cand) -> std::uint32_t {
      if (tree.nodes_.size() > kMaxTreeNodes) throw Error("decision tree exceeds node limit");
      const auto index = static_cast<std::uint32_t>(tree.nodes_.size());
      tree.nodes_.emplace_back();
      if (cand.empty()) {
        make_leaf(tree, index, nullptr);
        return index;
      }
      const Rule& first = rules[cand.front()];
      const Literal* open = nullptr;
      for (const auto& lit : first.guard) {
        if (context[lit.dim] == kUntested) {
          open = &lit;
          break;
        }
      }
      if (open == nullptr) {
        make_leaf(tree, index, &first);
        return index;
      }
      const DimIndex d = open->dim;
      tree.nodes_[index].kind = DecisionTree::NodeKind::Test;
      tree.nodes_[index].dim = d;
      std::vector<std::uint32_t> children;
      for (std::size_t v = 0; v < space.width(d); ++v) {
        context[d] = static_cast<int>(v);
        std::vector<std::size_t> next;
        for (auto c : cand) {
          bool ok = true;
          for (const auto& lit : rules[c].guard) {
            if (lit.dim == d && lit.value != v) {
              ok = false;
              break;
            }
          }
          if (ok) next.push_back(c);
        }
        children.push_back(self(self, next));
      }
      context[d] = kUntested;
      tree.nodes_[index].children = std::move(children);
      return index;
    };
    rec(rec, candidates);
    return tree;
  }

  static void transition_leaf(DecisionTree& tree, std::uint32_t index, const TransitionRule* rule) {
    using Kind = DecisionTree::NodeKind;
    if (rule == nullptr || rule->outcomes.empty()) {
      tree.nodes_[index].kind = Kind::Leaf;
      return;
    }
    double total = 0.0;
    for (const auto& o : rule->outcomes) total += o.probability;
    const double rest = 1.0 - total;
    if (rule->outcomes.size() == 1 && rest <= 1e-12) {
      tree.nodes_[index].kind = Kind::Leaf;
      tree.nodes_[index].effect = rule->outcomes.front().effect;
      return;
    }
    std::vector<std::uint32_t> children;
    std::vector<double> probs;
    for (const auto& o : rule->outcomes) {
      DecisionTree::Node leaf;
      leaf.effect = o.effect;
      children.push_back(static_cast<std::uint32_t>(tree.nodes_.size()));
      probs.push_back(o.probability);
      tree.nodes_.push_back(std::move(leaf));
    }
    if (rest > 1e-12) {
      children.push_back(static_cast<std::uint32_t>(tree.nodes_.size()));
      probs.push_back(rest);
      tree.nodes_.emplace_back();
    }
    auto& n = tree.nodes_[index];
    n.kind = Kind::Chance;
    n.children = std::move(children);
    n.probabilities = std::move(probs);
  }

  static void reward_leaf(DecisionTree& tree, std::uint32_t index, const RewardRule* rule, double fallback) {
    tree.nodes_[index].kind = DecisionTree::NodeKind::Leaf;
    tree.nodes_[index].reward = rule ? rule->value : fallback;
  }
};

DecisionTree compile_rule_list(const FactoredSpace& space, std::span<const TransitionRule> rules) {
  validate_rules(space, rules);
  return TreeBuilder::build(space, rules, &TreeBuilder::transition_leaf);
}

DecisionTree compile_reward_rules(const FactoredSpace& space, std::span<const RewardRule> rules, double fallback) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (!space.valid(rules[i].guard)) throw RuleError(i, "reward guard references an unknown dimension or value");
    if (!std::isfinite(rules[i].value)) throw RuleError(i, "reward is not finite");
  }
  return TreeBuilder::build(space, rules, [fallback](DecisionTree& tree, std::uint32_t index, const RewardRule* rule) {
    TreeBuilder::reward_leaf(tree, index, rule, fallback);
  });
}

}  // namespace wvplan
