#pragma once

#include <vector>

#include "wvplan/abstract_planner.hpp"
#include "wvplan/problem.hpp"
#include "wvplan/rng.hpp"

namespace wvplan {

/// Raised when refinement would push the worldview past its size cap.
class WorldviewCapError : public Error {
 public:
  explicit WorldviewCapError(std::size_t cap)
      : Error("worldview exceeds the configured cap of " + std::to_string(cap) + " states"), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

/// Splits `w` along `d` and propagates its table entries to the children.
std::vector<StateId> refine_state(Worldview& wv, PlannerTables& t, StateId w, DimIndex d);

/// Merges a full sibling group along `d`; the merged state's policy comes from
/// `group[chosen]`.
StateId coarsen_group(Worldview& wv, PlannerTables& t, const std::vector<StateId>& group, DimIndex d,
                      std::size_t chosen);

/// Starts from {S}; the reward step refines everything in each reward
/// dimension, the nexus step refines the states intersecting each nexus
/// until they are concrete in the nexus's dimensions.
Worldview select_initial_abstraction(const ProblemInstance& problem, bool reward_step, bool nexus_step,
                                     std::size_t cap = 1'000'000);

struct RefinementCandidate {
  StateId w = kNoState;
  DimIndex d = 0;

  friend bool operator==(const RefinementCandidate&, const RefinementCandidate&) = default;
  friend auto operator<=>(const RefinementCandidate&, const RefinementCandidate&) = default;
};

/// Candidates (w, d): some successor w' of w is concrete in d while w is
/// abstract in d, and the policy is not constant over w' made abstract in d.
std::vector<RefinementCandidate> policy_refinement_candidates(const Worldview& wv, AbstractDynamics& dyn,
                                                              const PlannerTables& t);

/// Applies the candidates in random order, skipping stale ones. Returns the
/// number of splits performed.
std::size_t policy_based_refinement(Worldview& wv, AbstractDynamics& dyn, PlannerTables& t, const PlannerConfig& c,
                                    Rng& rng);

/// Chooses one dimension uniformly and splits every state above the refine
/// threshold that is abstract in it. Returns the number of splits.
std::size_t proximity_based_refinement(Worldview& wv, PlannerTables& t, const PlannerConfig& c, Rng& rng);

/// Groups of low-proximity siblings that could be merged along one dimension.
struct MergeGroup {
  DimIndex d = 0;
  std::vector<StateId> members;  // ordered by the value of d
};
std::vector<MergeGroup> coarsening_groups(const Worldview& wv, const PlannerTables& t, double threshold);

/// Merges every complete low-proximity group still intact. Returns the number of merges.
std::size_t proximity_based_coarsening(Worldview& wv, PlannerTables& t, const PlannerConfig& c, Rng& rng);

}  // namespace wvplan
