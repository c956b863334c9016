#include "wvplan/abstract_dynamics.hpp"

#include <algorithm>

namespace wvplan {

namespace {

void merge_by_id(std::vector<Successor>& v) {
  std::sort(v.begin(), v.end(), [](const Successor& a, const Successor& b) { return a.id < b.id; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (out > 0 && v[out - 1].id == v[i].id) {
      v[out - 1].probability += v[i].probability;
    } else {
      v[out++] = v[i];
    }
  }
  v.resize(out);
}

}  // namespace

std::vector<RegionMass> outcome_regions(const ActionModel& model, const Pattern& w, ActionId a) {
  const auto& tree = model.tree(a);
  const auto& space = model.space();
  std::vector<RegionMass> out;
  Pattern region = w;
  // Branch probability is carried as p / denominator, the denominator being
  // the product of widths of abstract dimensions branched on so far.
  auto rec = [&](auto&& self, std::uint32_t node, double p, double denominator) -> void {
    const auto& n = tree.node(node);
    switch (n.kind) {
      case DecisionTree::NodeKind::Test: {
        const Value v = region[n.dim];
        if (v != kAbstract) {
          self(self, n.children[v], p, denominator);
          return;
        }
        const double width = static_cast<double>(space.width(n.dim));
        for (std::size_t c = 0; c < n.children.size(); ++c) {
          region[n.dim] = static_cast<Value>(c);
          self(self, n.children[c], p, denominator * width);
        }
        region[n.dim] = kAbstract;
        return;
      }
      case DecisionTree::NodeKind::Chance:
        for (std::size_t c = 0; c < n.children.size(); ++c) self(self, n.children[c], p * n.probabilities[c], denominator);
        return;
      case DecisionTree::NodeKind::Leaf: {
        Pattern post = region;
        for (const auto& lit : n.effect) post[lit.dim] = lit.value;
        out.push_back(RegionMass{std::move(post), p / denominator});
        return;
      }
    }
  };
  rec(rec, tree.root(), 1.0, 1.0);
  return out;
}

std::vector<Successor> region_weights(const Worldview& wv, const Pattern& region) {
  std::vector<Successor> out;
  wv.for_each_intersecting(region, [&](StateId id) {
    out.push_back(Successor{id, overlap_fraction(wv.space(), region, wv.pattern(id))});
  });
  return out;
}

std::vector<Successor> abstract_transition(const Worldview& wv, const ActionModel& model, StateId w, ActionId a) {
  std::vector<Successor> out;
  for (const auto& rm : outcome_regions(model, wv.pattern(w), a)) {
    wv.for_each_intersecting(rm.region, [&](StateId id) {
      out.push_back(Successor{id, rm.mass * overlap_fraction(wv.space(), rm.region, wv.pattern(id))});
    });
  }
  merge_by_id(out);
  return out;
}

double abstract_reward(const ActionModel& model, const Pattern& w) {
  const auto& tree = model.reward_tree();
  const auto& space = model.space();
  auto rec = [&](auto&& self, std::uint32_t node) -> double {
    const auto& n = tree.node(node);
    if (n.kind != DecisionTree::NodeKind::Test) return n.reward;
    const Value v = w[n.dim];
    if (v != kAbstract) return self(self, n.children[v]);
    double sum = 0.0;
    for (auto c : n.children) sum += self(self, c);
    return sum / static_cast<double>(space.width(n.dim));
  };
  return rec(rec, tree.root());
}

std::vector<bool> lua_abstract_dims(const Worldview& wv, const std::vector<std::vector<Successor>>& successors) {
  std::vector<bool> dims(wv.space().num_dims(), false);
  for (const auto& list : successors) {
    for (const auto& s : list) {
      if (s.probability <= 0.0) continue;
      const auto& p = wv.pattern(s.id);
      for (DimIndex d = 0; d < p.size(); ++d) {
        if (p[d] == kAbstract) dims[d] = true;
      }
    }
  }
  return dims;
}

void AbstractDynamics::clear() {
  entries_.clear();
  referenced_by_.clear();
  bound_ = nullptr;
  journal_cursor_ = 0;
}

std::size_t AbstractDynamics::cached_entries() const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) { return e.valid; }));
}

void AbstractDynamics::sync(const Worldview& wv) {
  if (bound_ != &wv || journal_cursor_ > wv.removal_journal().size()) {
    clear();
    bound_ = &wv;
    journal_cursor_ = wv.removal_journal().size();
  }
  const auto& journal = wv.removal_journal();
  for (; journal_cursor_ < journal.size(); ++journal_cursor_) {
    const StateId gone = journal[journal_cursor_];
    if (gone < entries_.size()) {
      entries_[gone] = Entry{};
    }
    if (gone < referenced_by_.size()) {
      for (auto [source, generation] : referenced_by_[gone]) {
        if (source < entries_.size() && entries_[source].generation == generation) {
          entries_[source].valid = false;
          entries_[source].lua_valid = false;
        }
      }
      referenced_by_[gone].clear();
      referenced_by_[gone].shrink_to_fit();
    }
  }
  if (entries_.size() < wv.id_bound()) {
    entries_.resize(wv.id_bound());
    referenced_by_.resize(wv.id_bound());
  }
}

void AbstractDynamics::reference(StateId target, StateId source) {
  referenced_by_[target].emplace_back(source, entries_[source].generation);
}

AbstractDynamics::Entry& AbstractDynamics::entry(const Worldview& wv, StateId w) {
  sync(wv);
  if (!wv.contains(w)) throw Error("abstract dynamics: state " + std::to_string(w) + " is not live");
  Entry& e = entries_[w];
  if (!e.valid) {
    ++e.generation;
    e.lua_valid = false;
    e.lua.clear();
    e.reward = abstract_reward(*model_, wv.pattern(w));
    e.transitions.assign(model_->num_actions(), {});
    for (ActionId a = 0; a < model_->num_actions(); ++a) {
      e.transitions[a] = abstract_transition(wv, *model_, w, a);
      for (const auto& s : e.transitions[a]) reference(s.id, w);
    }
    e.valid = true;
  }
  return e;
}

const std::vector<Successor>& AbstractDynamics::transitions(const Worldview& wv, StateId w, ActionId a) {
  return entry(wv, w).transitions.at(a);
}

double AbstractDynamics::reward(const Worldview& wv, StateId w) { return entry(wv, w).reward; }

bool AbstractDynamics::lua_has_abstraction(const Worldview& wv, StateId w) {
  lua_weights(wv, w, 0);
  return entries_[w].lua_active;
}

const std::vector<Successor>& AbstractDynamics::lua_weights(const Worldview& wv, StateId w, ActionId a) {
  Entry& e = entry(wv, w);
  if (!e.lua_valid) {
    const auto absdims = lua_abstract_dims(wv, e.transitions);
    e.lua_active = std::find(absdims.begin(), absdims.end(), true) != absdims.end();
    e.lua.assign(model_->num_actions(), {});
    for (ActionId b = 0; b < model_->num_actions(); ++b) {
      if (!e.lua_active) {
        e.lua[b] = e.transitions[b];
        continue;
      }
      std::vector<Successor> terms;
      for (const auto& s : e.transitions[b]) {
        Pattern region = wv.pattern(s.id);
        for (DimIndex d = 0; d < region.size(); ++d) {
          if (absdims[d]) region[d] = kAbstract;
        }
        wv.for_each_intersecting(region, [&](StateId id) {
          terms.push_back(Successor{id, s.probability * overlap_fraction(wv.space(), region, wv.pattern(id))});
        });
      }
      merge_by_id(terms);
      for (const auto& t : terms) reference(t.id, w);
      e.lua[b] = std::move(terms);
    }
    e.lua_valid = true;
  }
  return e.lua.at(a);
}

}  // namespace wvplan
