#include <doctest.h>

#include "wvplan/domains.hpp"
#include "wvplan/planner_loop.hpp"

using namespace wvplan;

namespace {

std::shared_ptr<const ProblemInstance> doors() {
  static auto p = std::make_shared<const ProblemInstance>(build_problem("3doors"));
  return p;
}

PlannerConfig all_phases() {
  PlannerConfig c;
  c.gamma = 0.99999;
  c.phase_weights = uniform_phase_weights({Phase::PolicyValue, Phase::PolicyRefine, Phase::ProximityCalc,
                                           Phase::ProximityRefine, Phase::ProximityCoarsen});
  return c;
}

}  // namespace

TEST_CASE("initialisation publishes a snapshot of the initial worldview") {
  Planner planner(doors(), all_phases(), 1);
  const auto snap = planner.latest_snapshot();
  REQUIRE(snap);
  CHECK(snap->sequence == 0);
  CHECK(snap->phases_total == 0);
  CHECK(snap->worldview_size() == 212);
  CHECK(planner.phases_total() == 0);
}

TEST_CASE("identical seeds give identical phase sequences and policies") {
  std::vector<Phase> a, b;
  Planner p1(doors(), all_phases(), 9), p2(doors(), all_phases(), 9);
  p1.set_phase_observer([&](const PhaseLog& log) { a.push_back(log.phase); });
  p2.set_phase_observer([&](const PhaseLog& log) { b.push_back(log.phase); });
  p1.run_phases(60);
  p2.run_phases(60);
  CHECK(a == b);
  const auto s1 = p1.latest_snapshot(), s2 = p2.latest_snapshot();
  CHECK(s1->policy == s2->policy);
  CHECK(s1->value == s2->value);
  CHECK(s1->worldview_size() == s2->worldview_size());
  Planner p3(doors(), all_phases(), 10);
  std::vector<Phase> c;
  p3.set_phase_observer([&](const PhaseLog& log) { c.push_back(log.phase); });
  p3.run_phases(60);
  CHECK(c != a);
}

TEST_CASE("snapshots stay valid while the planner keeps refining") {
  Planner planner(doors(), all_phases(), 3);
  const auto first = planner.latest_snapshot();
  const std::size_t size = first->worldview_size();
  const auto policy = first->policy;
  planner.run_phases(80);
  CHECK(first->worldview_size() == size);
  CHECK(first->policy == policy);
  CHECK(first->worldview->check_partition().empty());
  const auto last = planner.latest_snapshot();
  CHECK(last->sequence == 80);
  CHECK(last->phases_total == 80);
}

TEST_CASE("phase weights restrict the phases drawn") {
  PlannerConfig c;
  c.phase_weights = uniform_phase_weights({Phase::PolicyValue, Phase::ProximityCalc});
  Planner planner(doors(), c, 4);
  planner.run_phases(50);
  const auto& counts = planner.stats().phase_counts;
  CHECK(counts[0] + counts[2] == 50);
  CHECK(counts[0] > 0);
  CHECK(counts[2] > 0);
  CHECK(planner.stats().proximity_solves == counts[2]);
  CHECK(planner.worldview().size() == 212);
}

TEST_CASE("proximity mass is conserved across solves") {
  Planner planner(doors(), all_phases(), 5);
  planner.run_phases(150);
  CHECK(planner.stats().proximity_solves > 0);
  CHECK(planner.stats().max_proximity_mass_error <= 1e-9);
  const auto report = planner.refresh_proximity();
  CHECK(std::abs(report.total - 1.0) <= 1e-9);
}

TEST_CASE("the mailbox moves the current state") {
  Planner planner(doors(), all_phases(), 6);
  SpecificState s = doors()->initial_state;
  s[0] = 5;
  planner.mailbox().put(s);
  planner.iterate();
  CHECK(planner.current_state() == s);
}

TEST_CASE("the observer sees every phase") {
  Planner planner(doors(), all_phases(), 8);
  std::vector<std::uint64_t> seen;
  planner.set_phase_observer([&](const PhaseLog& log) {
    seen.push_back(log.index);
    CHECK(log.worldview_size == planner.worldview().size());
    CHECK(log.seconds >= 0.0);
  });
  planner.run_phases(10);
  CHECK(seen == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}

TEST_CASE("invalid configuration is rejected at construction") {
  PlannerConfig c;
  c.gamma_p = 1.5;
  CHECK_THROWS_AS(Planner(doors(), c, 0), Error);
}
