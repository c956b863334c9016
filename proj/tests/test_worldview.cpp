#include <doctest.h>

#include <set>

#include "support.hpp"
#include "wvplan/rng.hpp"
#include "wvplan/worldview.hpp"

using namespace wvplan;

namespace {

FactoredSpace space4() {
  return FactoredSpace({{"a", {"0", "1", "2"}}, {"b", {"0", "1"}}, {"c", {"0", "1", "2", "3"}}, {"d", {"0", "1"}}});
}

// Applies random splits and merges, checking invariants against a scan.
void random_walk(Worldview& wv, Rng& rng, int steps) {
  const auto& space = wv.space();
  for (int i = 0; i < steps; ++i) {
    const auto& ids = wv.sorted_ids();
    const StateId w = ids[rng.below(ids.size())];
    const auto d = static_cast<DimIndex>(rng.below(space.num_dims()));
    if (wv.is_abstract(w, d) && rng.uniform() < 0.7) {
      wv.split(w, d);
    } else if (!wv.is_abstract(w, d)) {
      Pattern parent = wv.pattern(w);
      std::vector<StateId> group;
      for (Value v = 0; v < space.width(d); ++v) {
        parent[d] = v;
        group.push_back(wv.find(parent));
      }
      if (std::find(group.begin(), group.end(), kNoState) == group.end()) wv.merge(group, d);
    }
  }
}

}  // namespace

TEST_CASE("singleton worldview") {
  Worldview wv(space4());
  CHECK(wv.size() == 1);
  CHECK(wv.cardinality(0) == 48);
  CHECK(wv.fraction(0) == 1.0);
  CHECK(wv.locate(SpecificState{2, 1, 3, 0}) == 0);
  CHECK(wv.check_partition().empty());
}

TEST_CASE("split and merge keep a partition and never reuse ids") {
  Worldview wv(space4());
  const auto children = wv.split(0, 2);
  CHECK(children.size() == 4);
  CHECK(wv.size() == 4);
  CHECK_FALSE(wv.contains(0));
  CHECK(wv.pattern(children[1])[2] == 1);
  CHECK(wv.locate(SpecificState{0, 0, 1, 0}) == children[1]);
  const auto merged = wv.merge(children, 2);
  CHECK(wv.size() == 1);
  CHECK(merged == 5);
  CHECK(wv.removal_journal() == std::vector<StateId>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(wv.split(merged, 5), Error);
}

TEST_CASE("merge requires a complete sibling group") {
  Worldview wv(space4());
  auto c = wv.split(0, 0);
  wv.split(c[0], 1);
  CHECK_THROWS_AS(wv.merge(std::vector<StateId>{c[1], c[2]}, 0), Error);
  CHECK_THROWS_AS(wv.check_mergeable(std::vector<StateId>{c[1], c[2], c[2]}, 0), Error);
}

TEST_CASE("random split/merge sequences agree with a linear scan") {
  Rng rng(17, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Worldview wv(space4());
    random_walk(wv, rng, 60);
    REQUIRE(wv.check_partition().empty());
    StateCount covered = 0;
    for (auto id : wv.sorted_ids()) covered += wv.cardinality(id);
    CHECK(covered == 48);
    testing::for_each_member(wv.space(), Pattern(4, kAbstract), [&](const SpecificState& s) {
      CHECK(wv.locate(s) == testing::scan_locate(wv, s));
    });
    // for_each_intersecting against brute-force intersection.
    for (int q = 0; q < 10; ++q) {
      Pattern region(4);
      for (DimIndex d = 0; d < 4; ++d) {
        region[d] = rng.uniform() < 0.5 ? kAbstract : static_cast<Value>(rng.below(wv.space().width(d)));
      }
      std::set<StateId> got, expected;
      wv.for_each_intersecting(region, [&](StateId id) { got.insert(id); });
      for (auto id : wv.sorted_ids()) {
        if (intersects(region, wv.pattern(id))) expected.insert(id);
      }
      CHECK(got == expected);
    }
  }
}

TEST_CASE("sorted ids follow pattern order with abstract last") {
  Worldview wv(space4());
  auto c = wv.split(0, 0);
  wv.split(c[1], 3);
  std::vector<Pattern> patterns;
  for (auto id : wv.sorted_ids()) patterns.push_back(wv.pattern(id));
  CHECK(std::is_sorted(patterns.begin(), patterns.end()));
}

TEST_CASE("overlap fractions") {
  const auto space = space4();
  const Pattern region{kAbstract, 1, kAbstract, kAbstract};
  const Pattern block{0, kAbstract, 2, kAbstract};
  CHECK(intersects(region, block));
  CHECK(overlap_fraction(space, region, block) == doctest::Approx(1.0 / 12.0));
  CHECK_FALSE(intersects(Pattern{0, 0, 0, 0}, Pattern{1, kAbstract, kAbstract, kAbstract}));
}

TEST_CASE("from_patterns and partition checks") {
  const FactoredSpace space({{"a", {"0", "1"}}, {"b", {"0", "1"}}});
  auto good = Worldview::from_patterns(space, {{0, kAbstract}, {1, 0}, {1, 1}});
  CHECK(good.check_partition().empty());
  auto gap = Worldview::from_patterns(space, {{0, kAbstract}, {1, 0}});
  CHECK_FALSE(gap.check_partition().empty());
  auto overlap = Worldview::from_patterns(space, {{0, kAbstract}, {kAbstract, 0}, {1, 1}});
  CHECK_FALSE(overlap.check_partition().empty());
  CHECK_THROWS_AS(Worldview::from_patterns(space, {{0, 0}, {0, 0}}), Error);
  CHECK_THROWS_AS(gap.locate(SpecificState{1, 1}), Error);
}

TEST_CASE("describe") {
  const FactoredSpace space({{"x", {"a", "b"}}, {"y", {"0", "1"}}});
  Worldview wv(space);
  auto c = wv.split(0, 0);
  CHECK(wv.describe(c[1]) == "x=b y=*");
}
