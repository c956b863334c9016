#include <doctest.h>

#include <map>

#include "support.hpp"
#include "wvplan/action_model.hpp"
#include "wvplan/rng.hpp"

using namespace wvplan;

namespace {

FactoredSpace space3() {
  return FactoredSpace({{"a", {"0", "1", "2"}}, {"b", {"0", "1"}}, {"c", {"0", "1", "2", "3"}}});
}

PartialAssignment random_assignment(const FactoredSpace& space, Rng& rng, double density) {
  PartialAssignment p;
  for (DimIndex d = 0; d < space.num_dims(); ++d) {
    if (rng.uniform() < density) p.push_back({d, static_cast<Value>(rng.below(space.width(d)))});
  }
  return p;
}

std::vector<TransitionRule> random_rules(const FactoredSpace& space, Rng& rng) {
  std::vector<TransitionRule> rules;
  const auto count = 1 + rng.below(6);
  for (std::uint64_t r = 0; r < count; ++r) {
    TransitionRule rule;
    rule.guard = random_assignment(space, rng, 0.5);
    const auto outcomes = 1 + rng.below(3);
    double left = 1.0;
    for (std::uint64_t o = 0; o < outcomes; ++o) {
      const double p = o + 1 == outcomes && rng.uniform() < 0.5 ? left : left * rng.uniform();
      rule.outcomes.push_back({p, random_assignment(space, rng, 0.4)});
      left -= p;
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace

TEST_CASE("compiled trees agree with first-match interpretation on random rule lists") {
  const auto space = space3();
  Rng rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rules = random_rules(space, rng);
    ActionModel model(space, {"act"}, {rules}, {});
    testing::for_each_member(space, Pattern(space.num_dims(), kAbstract), [&](const SpecificState& s) {
      const auto expected = testing::rule_distribution(model, 0, s);
      std::map<SpecificState, double> got;
      for (const auto& sp : model.transition_distribution(0, s)) got[sp.state] += sp.probability;
      REQUIRE(got.size() == expected.size());
      for (const auto& [state, p] : expected) CHECK(got[state] == doctest::Approx(p).epsilon(1e-12));
    });
  }
}

TEST_CASE("reward trees follow the first matching rule") {
  const auto space = space3();
  Rng rng(5, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RewardRule> rules;
    const auto count = rng.below(5);
    for (std::uint64_t r = 0; r < count; ++r) {
      rules.push_back({random_assignment(space, rng, 0.5), std::floor(rng.uniform() * 10.0) - 5.0});
    }
    ActionModel model(space, {"act"}, {{}}, rules, -1.0);
    testing::for_each_member(space, Pattern(space.num_dims(), kAbstract), [&](const SpecificState& s) {
      CHECK(model.reward_of_state(s) == testing::rule_reward(model, s));
    });
  }
}

TEST_CASE("single deterministic outcome compiles to a leaf") {
  const auto space = space3();
  const auto tree = compile_rule_list(space, std::vector{TransitionRule::simple({}, 1.0, {{0, 2}})});
  CHECK(tree.size() == 1);
  CHECK(tree.node(0).kind == DecisionTree::NodeKind::Leaf);
}

TEST_CASE("nexuses are the root-to-leaf test paths") {
  const auto space = space3();
  std::vector<TransitionRule> rules = {TransitionRule::simple({{0, 1}, {1, 0}}, 0.5, {{2, 3}}),
                                       TransitionRule::simple({{0, 2}}, 1.0, {{1, 1}})};
  const auto tree = compile_rule_list(space, rules);
  const auto paths = tree.paths();
  // a=0, a=1 & b=0, a=1 & b=1, a=2.
  CHECK(paths.size() == 4);
  const auto dims = tree.tested_dimensions();
  CHECK(dims == std::vector<DimIndex>{0, 1});
  ActionModel model(space, {"act"}, {rules}, {});
  const auto nexuses = enumerate_nexuses(model);
  CHECK(nexuses.size() == 4);
  CHECK(std::find(nexuses.begin(), nexuses.end(), PartialAssignment{{0, 1}, {1, 0}}) != nexuses.end());
}

TEST_CASE("rule validation") {
  const auto space = space3();
  CHECK_THROWS_AS(validate_rules(space, std::vector{TransitionRule::simple({}, 1.5, {})}), RuleError);
  CHECK_THROWS_AS(validate_rules(space, std::vector{TransitionRule::simple({{0, 7}}, 1.0, {})}), RuleError);
  TransitionRule over;
  over.outcomes = {{0.7, {{0, 1}}}, {0.7, {{0, 2}}}};
  try {
    validate_rules(space, std::vector{TransitionRule::simple({}, 1.0, {}), over});
    FAIL("expected a rule error");
  } catch (const RuleError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("rule errors carry the action name") {
  const auto space = space3();
  try {
    ActionModel model(space, {"stay", "jump"}, {{}, {TransitionRule::simple({}, 2.0, {})}}, {});
    FAIL("expected a rule error");
  } catch (const RuleError& e) {
    CHECK(std::string(e.what()).find("jump") != std::string::npos);
  }
}
