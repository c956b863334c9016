#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wvplan/factored_space.hpp"

namespace wvplan {

using StateId = std::uint32_t;
inline constexpr StateId kNoState = std::numeric_limits<StateId>::max();

/// Per dimension either a concrete value or kAbstract (the whole dimension).
using Pattern = std::vector<Value>;
inline constexpr Value kAbstract = 0xFFFF;

bool intersects(const Pattern& a, const Pattern& b);
/// |region ∩ block| / |region| for a block that intersects the region.
double overlap_fraction(const FactoredSpace& space, const Pattern& region, const Pattern& block);
Pattern pattern_of(const FactoredSpace& space, const PartialAssignment& assignment);
Pattern pattern_of(std::span<const Value> state);

/// A partition of a factored space into worldview states. Ids are never
/// reused; removed states leave an entry in the removal journal so caches
/// keyed by id can be invalidated.
class Worldview {
 public:
  /// The singleton worldview {S}.
  explicit Worldview(FactoredSpace space);

  /// Builds a worldview from explicit patterns without checking the
  /// partition property (see check_partition). Duplicate patterns throw.
  static Worldview from_patterns(FactoredSpace space, const std::vector<Pattern>& patterns);

  const FactoredSpace& space() const { return space_; }
  std::size_t size() const { return live_; }
  std::size_t id_bound() const { return patterns_.size(); }
  bool contains(StateId id) const { return id < alive_.size() && alive_[id]; }
  const Pattern& pattern(StateId id) const { return patterns_.at(id); }

  bool is_abstract(StateId id, DimIndex d) const { return patterns_[id][d] == kAbstract; }
  StateCount cardinality(StateId id) const;
  /// |w| / |S|.
  double fraction(StateId id) const;

  /// The state containing `s`; throws if none does.
  StateId locate(std::span<const Value> s) const;
  /// The state with exactly this pattern, or kNoState.
  StateId find(const Pattern& p) const;

  /// Calls fn(id) for every live state intersecting `region`.
  template <class Fn>
  void for_each_intersecting(const Pattern& region, Fn&& fn) const {
    if (nodes_[0].live > 0) visit(0, 0, region, fn);
  }

  /// Live ids in lexicographic pattern order (abstract sorts after every value).
  const std::vector<StateId>& sorted_ids() const;

  /// Replaces `id` with one state per value of `d`; returns the new ids in value order.
  std::vector<StateId> split(StateId id, DimIndex d);
  /// Replaces a full sibling group along `d` with one state abstract in `d`.
  StateId merge(std::span<const StateId> group, DimIndex d);
  /// Throws unless `group` is a complete sibling group along `d`.
  void check_mergeable(std::span<const StateId> group, DimIndex d) const;

  /// Incremented on every structural change.
  std::uint64_t version() const { return version_; }
  /// Every id ever removed, in removal order.
  const std::vector<StateId>& removal_journal() const { return removed_; }

  /// Empty iff the states are pairwise disjoint and cover the space.
  std::vector<std::string> check_partition() const;

  /// `x=3 y=* ...`
  std::string describe(StateId id) const;
  std::string describe(const Pattern& p) const;

 private:
  struct Node {
    std::uint32_t abstract_child = kNoState;
    std::vector<std::uint32_t> value_child;
    std::uint32_t live = 0;
    StateId leaf = kNoState;
  };

  StateId add(Pattern p);
  void remove(StateId id);
  std::uint32_t new_node();
  StateId locate_rec(std::uint32_t node, DimIndex depth, std::span<const Value> s) const;

  template <class Fn>
  void visit(std::uint32_t node, DimIndex depth, const Pattern& region, Fn& fn) const {
    const Node& n = nodes_[node];
    if (depth == space_.num_dims()) {
      fn(n.leaf);
      return;
    }
    if (n.abstract_child != kNoState && nodes_[n.abstract_child].live > 0) visit(n.abstract_child, depth + 1, region, fn);
    if (n.value_child.empty()) return;
    const Value r = region[depth];
    if (r == kAbstract) {
      for (auto c : n.value_child) {
        if (c != kNoState && nodes_[c].live > 0) visit(c, depth + 1, region, fn);
      }
    } else {
      const auto c = n.value_child[r];
      if (c != kNoState && nodes_[c].live > 0) visit(c, depth + 1, region, fn);
    }
  }

  FactoredSpace space_;
  std::vector<Pattern> patterns_;
  std::vector<bool> alive_;
  std::size_t live_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_nodes_;
  std::vector<StateId> removed_;
  std::uint64_t version_ = 0;
  mutable std::vector<StateId> sorted_;
  mutable std::uint64_t sorted_version_ = std::numeric_limits<std::uint64_t>::max();
};

}  // namespace wvplan
