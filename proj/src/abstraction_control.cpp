#include "wvplan/abstraction_control.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace wvplan {

namespace {

void check_cap(const Worldview& wv, DimIndex d, std::size_t cap) {
  if (wv.size() - 1 + wv.space().width(d) > cap) throw WorldviewCapError(cap);
}

}  // namespace

std::vector<StateId> refine_state(Worldview& wv, PlannerTables& t, StateId w, DimIndex d) {
  auto children = wv.split(w, d);
  propagate_split(wv, t, w, children);
  return children;
}

StateId coarsen_group(Worldview& wv, PlannerTables& t, const std::vector<StateId>& group, DimIndex d,
                      std::size_t chosen) {
  if (chosen >= group.size()) throw Error("coarsen: chosen member out of range");
  const StateId merged = wv.merge(group, d);
  propagate_merge(t, group, chosen, merged);
  return merged;
}

Worldview select_initial_abstraction(const ProblemInstance& problem, bool reward_step, bool nexus_step,
                                     std::size_t cap) {
  Worldview wv(problem.space());
  if (reward_step) {
    for (DimIndex d : problem.model.reward_dimensions()) {
      const std::vector<StateId> ids = wv.sorted_ids();
      for (auto id : ids) {
        if (!wv.is_abstract(id, d)) continue;
        check_cap(wv, d, cap);
        wv.split(id, d);
      }
    }
  }
  if (nexus_step) {
    for (const auto& nexus : enumerate_nexuses(problem.model)) {
      const Pattern region = pattern_of(wv.space(), nexus);
      std::vector<StateId> hits;
      wv.for_each_intersecting(region, [&](StateId id) { hits.push_back(id); });
      std::sort(hits.begin(), hits.end());
      for (StateId current : hits) {
        for (const auto& lit : nexus) {
          if (!wv.is_abstract(current, lit.dim)) continue;
          check_cap(wv, lit.dim, cap);
          current = wv.split(current, lit.dim)[lit.value];
        }
      }
    }
  }
  return wv;
}

std::vector<RefinementCandidate> policy_refinement_candidates(const Worldview& wv, AbstractDynamics& dyn,
                                                              const PlannerTables& t) {
  std::set<RefinementCandidate> found;
  std::map<std::pair<StateId, DimIndex>, bool> varies_cache;
  const std::size_t dims = wv.space().num_dims();
  auto policy_varies = [&](StateId succ, DimIndex d) {
    auto key = std::make_pair(succ, d);
    if (auto it = varies_cache.find(key); it != varies_cache.end()) return it->second;
    Pattern region = wv.pattern(succ);
    region[d] = kAbstract;
    bool varies = false;
    const ActionId reference = t.policy[succ];
    wv.for_each_intersecting(region, [&](StateId id) {
      if (t.policy[id] != reference) varies = true;
    });
    varies_cache.emplace(key, varies);
    return varies;
  };
  for (auto w : wv.sorted_ids()) {
    const Pattern& pw = wv.pattern(w);
    for (ActionId a = 0; a < dyn.model().num_actions(); ++a) {
      for (const auto& s : dyn.transitions(wv, w, a)) {
        if (s.probability <= 0.0) continue;
        const Pattern& ps = wv.pattern(s.id);
        for (DimIndex d = 0; d < dims; ++d) {
          if (pw[d] != kAbstract || ps[d] == kAbstract) continue;
          if (found.count({w, d})) continue;
          if (policy_varies(s.id, d)) found.insert({w, d});
        }
      }
    }
  }
  return {found.begin(), found.end()};
}

std::size_t policy_based_refinement(Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                                    Rng& rng) {
  auto candidates = policy_refinement_candidates(wv, dyn, t);
  rng.shuffle(std::span<RefinementCandidate>(candidates));
  std::size_t splits = 0;
  for (const auto& cand : candidates) {
    if (!wv.contains(cand.w) || !wv.is_abstract(cand.w, cand.d)) continue;
    check_cap(wv, cand.d, c.max_worldview_size);
    refine_state(wv, t, cand.w, cand.d);
    ++splits;
  }
  return splits;
}

std::size_t proximity_based_refinement(Worldview& wv, PlannerTables& t, const PlannerConfig& c, Rng& rng) {
  const auto d = static_cast<DimIndex>(rng.below(wv.space().num_dims()));
  std::vector<StateId> chosen;
  for (auto w : wv.sorted_ids()) {
    if (t.proximity[w] > c.refine_threshold && wv.is_abstract(w, d)) chosen.push_back(w);
  }
  for (auto w : chosen) {
    check_cap(wv, d, c.max_worldview_size);
    refine_state(wv, t, w, d);
  }
  return chosen.size();
}

std::vector<MergeGroup> coarsening_groups(const Worldview& wv, const PlannerTables& t, double threshold) {
  std::map<std::pair<DimIndex, Pattern>, std::vector<StateId>> buckets;
  for (auto w : wv.sorted_ids()) {
    if (!(t.proximity[w] < threshold)) continue;
    const Pattern& p = wv.pattern(w);
    for (DimIndex d = 0; d < p.size(); ++d) {
      if (p[d] == kAbstract) continue;
      Pattern key = p;
      key[d] = kAbstract;
      buckets[{d, std::move(key)}].push_back(w);
    }
  }
  std::vector<MergeGroup> groups;
  for (auto& [key, members] : buckets) {
    if (members.size() != wv.space().width(key.first)) continue;
    const DimIndex d = key.first;
    std::sort(members.begin(), members.end(),
              [&](StateId a, StateId b) { return wv.pattern(a)[d] < wv.pattern(b)[d]; });
    groups.push_back(MergeGroup{d, members});
  }
  return groups;
}

std::size_t proximity_based_coarsening(Worldview& wv, PlannerTables& t, const PlannerConfig& c, Rng& rng) {
  auto groups = coarsening_groups(wv, t, c.coarsen_threshold);
  rng.shuffle(std::span<MergeGroup>(groups));
  std::size_t merges = 0;
  for (const auto& g : groups) {
    const bool intact = std::all_of(g.members.begin(), g.members.end(), [&](StateId id) { return wv.contains(id); });
    if (!intact) continue;
    coarsen_group(wv, t, g.members, g.d, rng.below(g.members.size()));
    ++merges;
  }
  return merges;
}

}  // namespace wvplan
