#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "wvplan/domains.hpp"
#include "wvplan/problem.hpp"

using namespace wvplan;

namespace {

const char* kCorridor = R"(problem corridor
gamma 0.9
dimension pos a b c
dimension lamp off on   # trailing comment
action wait
action step
action toggle
rule step : pos=a -> 0.75 pos=b | 0.25 lamp=on
rule step : pos=b lamp=on -> 1 pos=c
rule toggle : lamp=off -> 1 lamp=on
rule toggle : * -> 1 lamp=off
reward pos=c -> 0
reward default -1
initial pos=a lamp=off
goal pos=c
)";

ProblemInstance parse(const std::string& text) {
  std::istringstream in(text);
  return parse_problem(in);
}

}  // namespace

TEST_CASE("parses a hand-written problem") {
  const auto p = parse(kCorridor);
  CHECK(p.name == "corridor");
  CHECK(p.gamma_default == 0.9);
  CHECK(p.space().size() == 6);
  CHECK(p.model.num_actions() == 3);
  CHECK(p.model.action_name(0) == "wait");
  CHECK(p.initial_state == SpecificState{0, 0});
  REQUIRE(p.goal.has_value());
  CHECK(p.goal->size() == 1);
  const auto dist = p.model.transition_distribution(1, SpecificState{0, 0});
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].state == SpecificState{1, 0});
  CHECK(dist[0].probability == 0.75);
  CHECK(p.model.reward_of_state(SpecificState{2, 1}) == 0.0);
  CHECK(p.model.reward_of_state(SpecificState{1, 1}) == -1.0);
}

TEST_CASE("write then parse reproduces the problem") {
  const auto p = parse(kCorridor);
  const auto q = parse(problem_to_string(p));
  CHECK(problem_to_string(q) == problem_to_string(p));
  CHECK(q.model.space() == p.model.space());
  for (ActionId a = 0; a < p.model.num_actions(); ++a) CHECK(q.model.rules(a) == p.model.rules(a));
}

TEST_CASE("built-in problems survive the text format") {
  for (const char* name : {"3doors", "3keys", "shuttlebot", "robot4:5"}) {
    const auto p = build_problem(name);
    const auto q = parse(problem_to_string(p));
    CHECK(problem_to_string(q) == problem_to_string(p));
    CHECK(q.initial_state == p.initial_state);
    testing::for_each_member(p.space(), Pattern(p.space().num_dims(), kAbstract), [&](const SpecificState& s) {
      CHECK(q.model.reward_of_state(s) == p.model.reward_of_state(s));
    });
  }
}

TEST_CASE("format_real is shortest round trip") {
  CHECK(format_real(0.8) == "0.8");
  CHECK(format_real(-1.0) == "-1");
  CHECK(std::stod(format_real(0.99999)) == 0.99999);
}

TEST_CASE("errors name the offending line") {
  auto expect_line = [](const std::string& text, const std::string& fragment) {
    try {
      parse(text);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect_line("dimension x a b\naction go\nrule go : x=c -> 1 x=a\ninitial x=a\n", "line 3");
  expect_line("dimension x a b\naction go\nrule jump : * -> 1 x=a\ninitial x=a\n", "line 3");
  expect_line("dimension x a b\naction go\nrule go : * -> 1.5 x=a\ninitial x=a\n", "");
  expect_line("dimension x a b\naction go\nbogus\n", "line 3");
  CHECK_THROWS_AS(parse("dimension x a b\naction go\n"), Error);  // no initial state
}
