#include "wvplan/worldview.hpp"

#include <algorithm>
#include <set>

namespace wvplan {

bool intersects(const Pattern& a, const Pattern& b) {
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d] != kAbstract && b[d] != kAbstract && a[d] != b[d]) return false;
  }
  return true;
}

double overlap_fraction(const FactoredSpace& space, const Pattern& region, const Pattern& block) {
  std::uint64_t denominator = 1;
  double result = 1.0;
  for (DimIndex d = 0; d < region.size(); ++d) {
    if (region[d] == kAbstract && block[d] != kAbstract) {
      denominator *= space.width(d);
      if (denominator > (1ull << 40)) {
        result /= static_cast<double>(denominator);
        denominator = 1;
      }
    }
  }
  return result / static_cast<double>(denominator);
}

Pattern pattern_of(const FactoredSpace& space, const PartialAssignment& assignment) {
  Pattern p(space.num_dims(), kAbstract);
  for (const auto& lit : assignment) p[lit.dim] = lit.value;
  return p;
}

Pattern pattern_of(std::span<const Value> state) { return Pattern(state.begin(), state.end()); }

Worldview::Worldview(FactoredSpace space) : space_(std::move(space)) {
  nodes_.emplace_back();
  add(Pattern(space_.num_dims(), kAbstract));
}

Worldview Worldview::from_patterns(FactoredSpace space, const std::vector<Pattern>& patterns) {
  Worldview w(std::move(space));
  w.remove(0);
  w.removed_.clear();
  for (const auto& p : patterns) {
    if (p.size() != w.space_.num_dims()) throw Error("pattern has the wrong number of dimensions");
    for (DimIndex d = 0; d < p.size(); ++d) {
      if (p[d] != kAbstract && p[d] >= w.space_.width(d)) throw Error("pattern value out of range");
    }
    if (w.find(p) != kNoState) throw Error("duplicate pattern " + w.describe(p));
    w.add(p);
  }
  return w;
}

std::uint32_t Worldview::new_node() {
  if (!free_nodes_.empty()) {
    auto n = free_nodes_.back();
    free_nodes_.pop_back();
    nodes_[n] = Node{};
    return n;
  }
  nodes_.emplace_back();
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

StateId Worldview::add(Pattern p) {
  const auto id = static_cast<StateId>(patterns_.size());
  std::uint32_t node = 0;
  for (DimIndex d = 0; d < space_.num_dims(); ++d) {
    ++nodes_[node].live;
    std::uint32_t next;
    if (p[d] == kAbstract) {
      next = nodes_[node].abstract_child;
      if (next == kNoState) {
        next = new_node();
        nodes_[node].abstract_child = next;
      }
    } else {
      if (nodes_[node].value_child.empty()) nodes_[node].value_child.assign(space_.width(d), kNoState);
      next = nodes_[node].value_child[p[d]];
      if (next == kNoState) {
        next = new_node();
        nodes_[node].value_child[p[d]] = next;
      }
    }
    node = next;
  }
  ++nodes_[node].live;
  nodes_[node].leaf = id;
  patterns_.push_back(std::move(p));
  alive_.push_back(true);
  ++live_;
  ++version_;
  return id;
}

void Worldview::remove(StateId id) {
  if (!contains(id)) throw Error("worldview state " + std::to_string(id) + " is not live");
  const Pattern& p = patterns_[id];
  std::vector<std::uint32_t> path{0};
  for (DimIndex d = 0; d < space_.num_dims(); ++d) {
    const Node& n = nodes_[path.back()];
    path.push_back(p[d] == kAbstract ? n.abstract_child : n.value_child[p[d]]);
  }
  for (auto n : path) --nodes_[n].live;
  nodes_[path.back()].leaf = kNoState;
  for (std::size_t i = path.size() - 1; i > 0; --i) {
    const auto n = path[i];
    if (nodes_[n].live > 0) break;
    Node& parent = nodes_[path[i - 1]];
    const Value v = p[i - 1];
    if (v == kAbstract) {
      parent.abstract_child = kNoState;
    } else {
      parent.value_child[v] = kNoState;
    }
    nodes_[n] = Node{};
    free_nodes_.push_back(n);
  }
  alive_[id] = false;
  --live_;
  removed_.push_back(id);
  ++version_;
}

StateCount Worldview::cardinality(StateId id) const {
  StateCount c = 1;
  const Pattern& p = patterns_.at(id);
  for (DimIndex d = 0; d < p.size(); ++d) {
    if (p[d] == kAbstract) c *= space_.width(d);
  }
  return c;
}

double Worldview::fraction(StateId id) const {
  return overlap_fraction(space_, Pattern(space_.num_dims(), kAbstract), patterns_.at(id));
}

StateId Worldview::locate_rec(std::uint32_t node, DimIndex depth, std::span<const Value> s) const {
  const Node& n = nodes_[node];
  if (depth == space_.num_dims()) return n.leaf;
  if (!n.value_child.empty()) {
    const auto c = n.value_child[s[depth]];
    if (c != kNoState && nodes_[c].live > 0) {
      const StateId r = locate_rec(c, depth + 1, s);
      if (r != kNoState) return r;
    }
  }
  if (n.abstract_child != kNoState && nodes_[n.abstract_child].live > 0) {
    return locate_rec(n.abstract_child, depth + 1, s);
  }
  return kNoState;
}

StateId Worldview::locate(std::span<const Value> s) const {
  if (s.size() != space_.num_dims()) throw Error("locate: state has the wrong number of dimensions");
  const StateId r = locate_rec(0, 0, s);
  if (r == kNoState) throw Error("partition breach: no worldview state contains " + space_.format(s));
  return r;
}

StateId Worldview::find(const Pattern& p) const {
  std::uint32_t node = 0;
  for (DimIndex d = 0; d < space_.num_dims(); ++d) {
    const Node& n = nodes_[node];
    node = p[d] == kAbstract ? n.abstract_child : (n.value_child.empty() ? kNoState : n.value_child[p[d]]);
    if (node == kNoState || nodes_[node].live == 0) return kNoState;
  }
  return nodes_[node].leaf;
}

const std::vector<StateId>& Worldview::sorted_ids() const {
  if (sorted_version_ != version_) {
    sorted_.clear();
    sorted_.reserve(live_);
    for (StateId id = 0; id < patterns_.size(); ++id) {
      if (alive_[id]) sorted_.push_back(id);
    }
    std::sort(sorted_.begin(), sorted_.end(), [&](StateId a, StateId b) { return patterns_[a] < patterns_[b]; });
    sorted_version_ = version_;
  }
  return sorted_;
}

std::vector<StateId> Worldview::split(StateId id, DimIndex d) {
  if (!contains(id)) throw Error("split: worldview state " + std::to_string(id) + " is not live");
  if (d >= space_.num_dims()) throw Error("split: unknown dimension");
  if (patterns_[id][d] != kAbstract) {
    throw Error("split: state " + describe(id) + " is already concrete in " + space_.dim(d).name);
  }
  Pattern base = patterns_[id];
  remove(id);
  std::vector<StateId> out;
  for (std::size_t v = 0; v < space_.width(d); ++v) {
    base[d] = static_cast<Value>(v);
    out.push_back(add(base));
  }
  return out;
}

void Worldview::check_mergeable(std::span<const StateId> group, DimIndex d) const {
  if (d >= space_.num_dims()) throw Error("merge: unknown dimension");
  if (group.size() != space_.width(d)) throw Error("merge: group size differs from the dimension width");
  std::vector<bool> seen(space_.width(d), false);
  Pattern reference;
  for (auto id : group) {
    if (!contains(id)) throw Error("merge: state " + std::to_string(id) + " is not live");
    Pattern p = patterns_[id];
    if (p[d] == kAbstract) throw Error("merge: member " + describe(id) + " is abstract in the merge dimension");
    if (seen[p[d]]) throw Error("merge: two members share a value of the merge dimension");
    seen[p[d]] = true;
    p[d] = kAbstract;
    if (reference.empty()) {
      reference = std::move(p);
    } else if (p != reference) {
      throw Error("merge: members differ outside the merge dimension");
    }
  }
}

StateId Worldview::merge(std::span<const StateId> group, DimIndex d) {
  check_mergeable(group, d);
  Pattern p = patterns_[group.front()];
  p[d] = kAbstract;
  for (auto id : group) remove(id);
  return add(std::move(p));
}

std::vector<std::string> Worldview::check_partition() const {
  std::vector<std::string> problems;
  StateCount total = 0;
  for (StateId id = 0; id < patterns_.size(); ++id) {
    if (!alive_[id]) continue;
    total += cardinality(id);
    for_each_intersecting(patterns_[id], [&](StateId other) {
      if (other > id) problems.push_back("overlap: " + describe(id) + " and " + describe(other));
    });
  }
  if (total != space_.size()) {
    problems.push_back("covering: states hold " + to_string(total) + " of " + to_string(space_.size()) +
                       " specific states");
  }
  return problems;
}

std::string Worldview::describe(const Pattern& p) const {
  std::string out;
  for (DimIndex d = 0; d < p.size(); ++d) {
    if (d > 0) out += ' ';
    out += space_.dim(d).name;
    out += '=';
    out += p[d] == kAbstract ? std::string("*") : space_.dim(d).values.at(p[d]);
  }
  return out;
}

std::string Worldview::describe(StateId id) const { return describe(patterns_.at(id)); }

}  // namespace wvplan
