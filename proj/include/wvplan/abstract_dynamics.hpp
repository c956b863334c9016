#pragma once

#include <cstdint>
#include <vector>

#include "wvplan/action_model.hpp"
#include "wvplan/worldview.hpp"

namespace wvplan {

struct Successor {
  StateId id = kNoState;
  double probability = 0.0;
};

/// Uniformly weighted post-region reached from a worldview state.
struct RegionMass {
  Pattern region;
  double mass = 0.0;
};

/// Post-regions of `a` from the uniform distribution over `w`. Abstract
/// dimensions tested by the tree branch with weight 1/width.
std::vector<RegionMass> outcome_regions(const ActionModel& model, const Pattern& w, ActionId a);

/// Pr(w, a, w') for every w' with positive probability, sorted by id.
std::vector<Successor> abstract_transition(const Worldview& wv, const ActionModel& model, StateId w, ActionId a);

/// Uniform average of the reward over the concrete states of `w`.
double abstract_reward(const ActionModel& model, const Pattern& w);

/// Weights |w'' ∩ region| / |region| of every state intersecting `region`.
std::vector<Successor> region_weights(const Worldview& wv, const Pattern& region);

/// Dimensions abstract in some possible successor of `w` under some action.
std::vector<bool> lua_abstract_dims(const Worldview& wv, const std::vector<std::vector<Successor>>& successors);

/// Per-state cache of abstract transitions, rewards and locally uniform
/// lookahead weights. Entries are invalidated when any state they refer to
/// leaves the worldview.
class AbstractDynamics {
 public:
  explicit AbstractDynamics(const ActionModel& model) : model_(&model) {}

  const ActionModel& model() const { return *model_; }

  const std::vector<Successor>& transitions(const Worldview& wv, StateId w, ActionId a);
  double reward(const Worldview& wv, StateId w);
  /// Q-weights for the locally uniform policy update: Q(w,a) = Σ weight·V̂(id).
  const std::vector<Successor>& lua_weights(const Worldview& wv, StateId w, ActionId a);
  /// True when some successor of w is abstract in a dimension (LUA active).
  bool lua_has_abstraction(const Worldview& wv, StateId w);

  void clear();
  std::size_t cached_entries() const;

 private:
  struct Entry {
    bool valid = false;
    bool lua_valid = false;
    bool lua_active = false;
    std::uint32_t generation = 0;
    double reward = 0.0;
    std::vector<std::vector<Successor>> transitions;
    std::vector<std::vector<Successor>> lua;
  };

  void sync(const Worldview& wv);
  Entry& entry(const Worldview& wv, StateId w);
  void reference(StateId target, StateId source);

  const ActionModel* model_;
  const Worldview* bound_ = nullptr;
  std::size_t journal_cursor_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::vector<std::pair<StateId, std::uint32_t>>> referenced_by_;
};

}  // namespace wvplan
