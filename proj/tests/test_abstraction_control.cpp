#include <doctest.h>

#include "support.hpp"
#include "wvplan/abstraction_control.hpp"
#include "wvplan/domains.hpp"

using namespace wvplan;

namespace {

void initialise(const Worldview& wv, PlannerTables& t) {
  t.ensure(wv.id_bound());
  for (auto w : wv.sorted_ids()) {
    t.policy[w] = 0;
    t.value[w] = 0.0;
    t.proximity[w] = wv.fraction(w);
  }
}

}  // namespace

TEST_CASE("initial abstraction sizes") {
  const auto doors = build_problem("3doors");
  CHECK(select_initial_abstraction(doors, false, false).size() == 1);
  CHECK(select_initial_abstraction(doors, true, false).size() == 200);
  CHECK(select_initial_abstraction(doors, true, true).size() == 212);
  const auto keys = build_problem("3keys");
  CHECK(select_initial_abstraction(keys, true, true).size() == 224);
  for (const char* name : {"3doors", "1key", "3keys", "shuttlebot", "robot4:6"}) {
    CHECK(select_initial_abstraction(build_problem(name), true, true).check_partition().empty());
  }
}

TEST_CASE("nexus step makes every nexus-intersecting state concrete in the nexus dimensions") {
  const auto p = build_problem("3doors");
  const auto wv = select_initial_abstraction(p, false, true);
  for (const auto& nexus : enumerate_nexuses(p.model)) {
    const Pattern region = pattern_of(p.space(), nexus);
    wv.for_each_intersecting(region, [&](StateId id) {
      for (const auto& lit : nexus) {
        CHECK(wv.pattern(id)[lit.dim] != kAbstract);
      }
    });
  }
}

TEST_CASE("the worldview cap is enforced") {
  const auto p = build_problem("3doors");
  CHECK_THROWS_AS(select_initial_abstraction(p, true, true, 150), WorldviewCapError);
}

TEST_CASE("pinwheel partition has no merge groups") {
  const FactoredSpace space({{"a", {"0", "1"}}, {"b", {"0", "1"}}, {"c", {"0", "1"}}});
  auto wv = Worldview::from_patterns(
      space, {{0, 0, kAbstract}, {1, kAbstract, 0}, {kAbstract, 1, 1}, {0, 1, 0}, {1, 0, 1}});
  REQUIRE(wv.size() == 5);
  REQUIRE(wv.check_partition().empty());
  PlannerTables t;
  initialise(wv, t);
  for (auto w : wv.sorted_ids()) t.proximity[w] = 1e-6;
  CHECK(coarsening_groups(wv, t, 0.5).empty());
  PlannerConfig c;
  c.coarsen_threshold = 0.5;
  Rng rng(1, 0);
  CHECK(proximity_based_coarsening(wv, t, c, rng) == 0);
  CHECK(wv.size() == 5);
}

TEST_CASE("complete low-proximity sibling groups merge") {
  const FactoredSpace space({{"a", {"0", "1", "2"}}, {"b", {"0", "1"}}});
  Worldview wv(space);
  PlannerTables t;
  initialise(wv, t);
  const auto children = refine_state(wv, t, 0, 0);
  refine_state(wv, t, children[2], 1);
  t.proximity[children[0]] = 0.01;
  t.proximity[children[1]] = 0.02;
  const auto groups = coarsening_groups(wv, t, 0.2);
  // Only the b-split of a=2 is complete: both halves hold 1/6 < 0.2.
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].d == 1);
  PlannerConfig c;
  c.coarsen_threshold = 0.2;
  Rng rng(2, 0);
  CHECK(proximity_based_coarsening(wv, t, c, rng) == 1);
  CHECK(wv.size() == 3);
  CHECK(wv.check_partition().empty());
}

TEST_CASE("proximity refinement splits states above the threshold in one dimension") {
  const FactoredSpace space({{"a", {"0", "1"}}, {"b", {"0", "1", "2"}}});
  Worldview wv(space);
  PlannerTables t;
  initialise(wv, t);
  auto halves = refine_state(wv, t, 0, 0);
  t.proximity[halves[0]] = 0.9;
  t.proximity[halves[1]] = 0.1;
  PlannerConfig c;
  c.refine_threshold = 0.5;
  Rng rng(5, 0);
  std::size_t total = 0;
  for (int i = 0; i < 8; ++i) total += proximity_based_refinement(wv, t, c, rng);
  CHECK(total == 1);
  CHECK(wv.size() == 4);
  CHECK(wv.is_abstract(halves[1], 1));
}

TEST_CASE("policy refinement candidates need a policy difference") {
  // Moving right from x=0 reaches x=1, where the policy depends on the flag.
  const FactoredSpace space({{"x", {"0", "1"}}, {"flag", {"0", "1"}}});
  ActionModel model(space, {"stay", "right"}, {{}, {TransitionRule::simple({{0, 0}}, 1.0, {{0, 1}})}}, {});
  auto wv = Worldview::from_patterns(space, {{0, kAbstract}, {1, 0}, {1, 1}});
  AbstractDynamics dyn(model);
  PlannerTables t;
  initialise(wv, t);
  const StateId left = wv.find({0, kAbstract});
  t.policy[wv.find({1, 0})] = 1;
  t.policy[wv.find({1, 1})] = 1;
  CHECK(policy_refinement_candidates(wv, dyn, t).empty());
  t.policy[wv.find({1, 1})] = 0;
  const auto cands = policy_refinement_candidates(wv, dyn, t);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].w == left);
  CHECK(cands[0].d == 1);
  PlannerConfig c;
  Rng rng(7, 0);
  CHECK(policy_based_refinement(wv, dyn, t, c, rng) == 1);
  CHECK(wv.size() == 4);
}
