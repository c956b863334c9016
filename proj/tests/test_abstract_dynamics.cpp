#include <doctest.h>

#include "support.hpp"
#include "wvplan/abstract_dynamics.hpp"
#include "wvplan/abstraction_control.hpp"
#include "wvplan/domains.hpp"
#include "wvplan/rng.hpp"

using namespace wvplan;

namespace {

void check_against_brute_force(const Worldview& wv, const ActionModel& model, AbstractDynamics& dyn) {
  for (auto w : wv.sorted_ids()) {
    CHECK(dyn.reward(wv, w) == doctest::Approx(testing::brute_reward(wv, model, w)).epsilon(1e-12));
    for (ActionId a = 0; a < model.num_actions(); ++a) {
      const auto expected = testing::brute_transition(wv, model, w, a);
      const auto& got = dyn.transitions(wv, w, a);
      double total = 0.0;
      std::size_t positive = 0;
      for (const auto& s : got) {
        total += s.probability;
        auto it = expected.find(s.id);
        const double e = it == expected.end() ? 0.0 : it->second;
        CHECK(std::abs(s.probability - e) <= 1e-9);
        if (s.probability > 0.0) ++positive;
      }
      std::size_t expected_positive = 0;
      for (const auto& [id, p] : expected) expected_positive += p > 1e-15;
      CHECK(positive == expected_positive);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

void random_refinements(Worldview& wv, Rng& rng, int count) {
  for (int i = 0; i < count; ++i) {
    const auto& ids = wv.sorted_ids();
    const StateId w = ids[rng.below(ids.size())];
    const auto d = static_cast<DimIndex>(rng.below(wv.space().num_dims()));
    if (wv.is_abstract(w, d)) wv.split(w, d);
  }
}

}  // namespace

TEST_CASE("abstract transitions equal brute-force double sums on 3doors worldviews") {
  const auto p = build_problem("3doors");
  Rng rng(23, 0);
  for (bool reward_step : {false, true}) {
    for (bool nexus_step : {false, true}) {
      auto wv = select_initial_abstraction(p, reward_step, nexus_step);
      AbstractDynamics dyn(p.model);
      check_against_brute_force(wv, p.model, dyn);
      random_refinements(wv, rng, 25);
      check_against_brute_force(wv, p.model, dyn);
    }
  }
}

TEST_CASE("abstract transitions equal brute-force double sums on other domains") {
  Rng rng(29, 0);
  for (const char* name : {"robot4:5", "shuttlebot"}) {
    const auto p = build_problem(name);
    auto wv = select_initial_abstraction(p, true, false);
    random_refinements(wv, rng, 30);
    AbstractDynamics dyn(p.model);
    check_against_brute_force(wv, p.model, dyn);
  }
}

TEST_CASE("cache entries are invalidated by splits and merges") {
  const auto p = build_problem("3doors");
  Worldview wv(p.space());
  AbstractDynamics dyn(p.model);
  Rng rng(31, 0);
  for (int round = 0; round < 12; ++round) {
    for (auto w : wv.sorted_ids()) {
      for (ActionId a = 0; a < p.model.num_actions(); ++a) dyn.transitions(wv, w, a);
    }
    random_refinements(wv, rng, 6);
    if (round % 3 == 2) {
      // Merge back some complete group to exercise removal.
      for (auto w : wv.sorted_ids()) {
        Pattern parent = wv.pattern(w);
        DimIndex d = 0;
        while (d < parent.size() && parent[d] == kAbstract) ++d;
        if (d == parent.size()) continue;
        std::vector<StateId> group;
        for (Value v = 0; v < p.space().width(d); ++v) {
          parent[d] = v;
          group.push_back(wv.find(parent));
        }
        if (std::find(group.begin(), group.end(), kNoState) == group.end()) {
          wv.merge(group, d);
          break;
        }
      }
    }
    check_against_brute_force(wv, p.model, dyn);
  }
}

TEST_CASE("locally uniform weights reduce to transitions without abstraction") {
  const auto p = build_problem("3doors");
  auto wv = select_initial_abstraction(p, true, true);
  AbstractDynamics dyn(p.model);
  for (auto w : wv.sorted_ids()) {
    for (ActionId a = 0; a < p.model.num_actions(); ++a) {
      const auto& lua = dyn.lua_weights(wv, w, a);
      double total = 0.0;
      for (const auto& s : lua) total += s.probability;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      if (!dyn.lua_has_abstraction(wv, w)) {
        const auto& t = dyn.transitions(wv, w, a);
        REQUIRE(lua.size() == t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
          CHECK(lua[i].id == t[i].id);
          CHECK(lua[i].probability == t[i].probability);
        }
      }
    }
  }
}

TEST_CASE("locally uniform weights average successors over abstracted dimensions") {
  // From x=0 "up" keeps the flag while "jump" lands in a state abstract in
  // the flag, so the update for x=0 averages "up" successors over the flag.
  const FactoredSpace space({{"x", {"0", "1", "2"}}, {"flag", {"0", "1"}}});
  ActionModel model(space, {"up", "jump"},
                    {{TransitionRule::simple({{0, 0}}, 1.0, {{0, 1}})}, {TransitionRule::simple({{0, 0}}, 1.0, {{0, 2}})}},
                    {});
  auto wv = Worldview::from_patterns(space, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, kAbstract}});
  REQUIRE(wv.check_partition().empty());
  AbstractDynamics dyn(model);
  const StateId w = wv.find({0, 0});
  const auto& t = dyn.transitions(wv, w, 0);
  REQUIRE(t.size() == 1);
  CHECK(t[0].id == wv.find({1, 0}));
  CHECK(dyn.lua_has_abstraction(wv, w));
  const auto& lua = dyn.lua_weights(wv, w, 0);
  REQUIRE(lua.size() == 2);
  CHECK(lua[0].id == wv.find({1, 0}));
  CHECK(lua[0].probability == 0.5);
  CHECK(lua[1].id == wv.find({1, 1}));
  CHECK(lua[1].probability == 0.5);
  const auto weights = region_weights(wv, Pattern{kAbstract, 0});
  CHECK(weights.size() == 3);
}
