#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wvplan/kernels.hpp"
#include "wvplan/problem.hpp"

namespace wvplan {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Fully enumerated MDP: one row-stochastic sparse matrix per action over
/// mixed-radix state indices.
struct ExplicitMdp {
  std::size_t num_states = 0;
  std::size_t initial_index = 0;
  std::vector<kernels::CsrMatrix> transitions;
  std::vector<double> reward;

  std::size_t num_actions() const { return transitions.size(); }
};

ExplicitMdp enumerate_mdp(const ProblemInstance& problem, std::uint64_t cap = kDefaultEnumerationCap);

struct ExactSolution {
  std::vector<ActionId> policy;
  std::vector<double> value;
  double residual = 0.0;
  int iterations = 0;
};

/// Policy iteration with sparse LU policy evaluation. The returned policy is
/// greedy on the returned values, ties going to the lowest action index.
ExactSolution solve_exact(const ExplicitMdp& mdp, double gamma, double tolerance = 1e-9);

/// Independent cross-check: synchronous value iteration to a sup-norm
/// Bellman residual of `tolerance`.
ExactSolution value_iteration(const ExplicitMdp& mdp, double gamma, double tolerance = 1e-9,
                              int max_iterations = 10'000'000);

/// Solves V = R + gamma T_pi V exactly (sparse LU).
std::vector<double> evaluate_policy_exact(const ExplicitMdp& mdp, std::span<const ActionId> policy, double gamma);

/// Evaluates a policy given as a function of specific states.
std::vector<ActionId> tabulate_policy(const ProblemInstance& problem,
                                      const std::function<ActionId(std::span<const Value>)>& policy,
                                      std::uint64_t cap = kDefaultEnumerationCap);

/// max_s |V(s) - max_a [R(s) + gamma sum T(s,a,s') V(s')]|.
double bellman_residual(const ExplicitMdp& mdp, double gamma, std::span<const double> value);

/// Greedy actions with ties to the lowest index within `tie_tolerance`.
std::vector<ActionId> greedy_policy(const ExplicitMdp& mdp, std::span<const double> value,
                                    double tie_tolerance = 1e-9);

}  // namespace wvplan
