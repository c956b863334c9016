#include "wvplan/exact_oracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace wvplan {

namespace {

std::uint64_t checked_size(const FactoredSpace& space, std::uint64_t cap) {
  const StateCount n = space.size();
  if (n > cap) {
    throw Error("state space has " + to_string(n) + " states, above the enumeration cap of " + std::to_string(cap));
  }
  return static_cast<std::uint64_t>(n);
}

double row_dot(const kernels::CsrMatrix& m, std::size_t row, std::span<const double> v) {
  double acc = 0.0;
  for (auto k = m.row_ptr[row]; k < m.row_ptr[row + 1]; ++k) acc += m.val[k] * v[m.col[k]];
  return acc;
}

}  // namespace

ExplicitMdp enumerate_mdp(const ProblemInstance& problem, std::uint64_t cap) {
  const auto& space = problem.space();
  const auto& model = problem.model;
  const std::uint64_t n = checked_size(space, cap);
  ExplicitMdp mdp;
  mdp.num_states = n;
  mdp.initial_index = space.index_of(problem.initial_state);
  mdp.reward.resize(n);
  mdp.transitions.resize(model.num_actions());
  for (auto& t : mdp.transitions) {
    t.cols = n;
    t.row_ptr.reserve(n + 1);
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    const SpecificState s = space.state_at(i);
    mdp.reward[i] = model.reward_of_state(s);
    for (ActionId a = 0; a < model.num_actions(); ++a) {
      auto& t = mdp.transitions[a];
      auto dist = model.transition_distribution(a, s);
      std::sort(dist.begin(), dist.end(), [&](const auto& l, const auto& r) {
        return space.index_of(l.state) < space.index_of(r.state);
      });
      for (const auto& sp : dist) {
        t.col.push_back(static_cast<std::int32_t>(space.index_of(sp.state)));
        t.val.push_back(sp.probability);
      }
      t.row_ptr.push_back(static_cast<std::uint32_t>(t.col.size()));
    }
  }
  return mdp;
}

std::vector<double> evaluate_policy_exact(const ExplicitMdp& mdp, std::span<const ActionId> policy, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("discount must lie in [0,1)");
  if (policy.size() != mdp.num_states) throw Error("policy size does not match the state count");
  const auto n = static_cast<Eigen::Index>(mdp.num_states);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mdp.num_states * 4);
  for (std::size_t i = 0; i < mdp.num_states; ++i) {
    if (policy[i] >= mdp.num_actions()) throw Error("policy names an unknown action");
    const auto& t = mdp.transitions[policy[i]];
    double diag = 1.0;
    for (auto k = t.row_ptr[i]; k < t.row_ptr[i + 1]; ++k) {
      if (static_cast<std::size_t>(t.col[k]) == i) {
        diag -= gamma * t.val[k];
      } else {
        triplets.emplace_back(static_cast<Eigen::Index>(i), t.col[k], -gamma * t.val[k]);
      }
    }
    triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), diag);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) throw Error("policy evaluation: factorisation failed");
  Eigen::Map<const Eigen::VectorXd> r(mdp.reward.data(), n);
  Eigen::VectorXd v = lu.solve(r);
  if (lu.info() != Eigen::Success) throw Error("policy evaluation: solve failed");
  return {v.data(), v.data() + n};
}

std::vector<ActionId> greedy_policy(const ExplicitMdp& mdp, std::span<const double> value,
                                    double tie_tolerance) {
  std::vector<ActionId> policy(mdp.num_states, 0);
  for (std::size_t i = 0; i < mdp.num_states; ++i) {
    double best = -INFINITY;
    std::vector<double> q(mdp.num_actions());
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      q[a] = row_dot(mdp.transitions[a], i, value);
      best = std::max(best, q[a]);
    }
    const double slack = tie_tolerance * std::max(1.0, std::abs(best));
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      if (q[a] >= best - slack) {
        policy[i] = a;
        break;
      }
    }
  }
  return policy;
}

double bellman_residual(const ExplicitMdp& mdp, double gamma, std::span<const double> value) {
  double worst = 0.0;
  for (std::size_t i = 0; i < mdp.num_states; ++i) {
    double best = -INFINITY;
    for (ActionId a = 0; a < mdp.num_actions(); ++a) best = std::max(best, row_dot(mdp.transitions[a], i, value));
    worst = std::max(worst, std::abs(value[i] - (mdp.reward[i] + gamma * best)));
  }
  return worst;
}

ExactSolution solve_exact(const ExplicitMdp& mdp, double gamma, double tolerance) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("discount must lie in [0,1)");
  ExactSolution sol;
  sol.policy.assign(mdp.num_states, 0);
  // An action replaces the incumbent only on a clear improvement, which
  // rules out cycling between equally good policies.
  const double improve = 1e-12;
  for (;;) {
    sol.value = evaluate_policy_exact(mdp, sol.policy, gamma);
    ++sol.iterations;
    bool changed = false;
    for (std::size_t i = 0; i < mdp.num_states; ++i) {
      const double incumbent = row_dot(mdp.transitions[sol.policy[i]], i, sol.value);
      double best = incumbent;
      ActionId best_a = sol.policy[i];
      for (ActionId a = 0; a < mdp.num_actions(); ++a) {
        const double q = row_dot(mdp.transitions[a], i, sol.value);
        if (q > best + improve * std::max(1.0, std::abs(best))) {
          best = q;
          best_a = a;
        }
      }
      if (best_a != sol.policy[i]) {
        sol.policy[i] = best_a;
        changed = true;
      }
    }
    if (!changed) break;
    if (sol.iterations > 100000) throw Error("policy iteration did not terminate");
  }
  sol.residual = bellman_residual(mdp, gamma, sol.value);
  if (sol.residual > tolerance * std::max(1.0, 1.0 / (1.0 - gamma))) {
    throw Error("exact solve residual " + std::to_string(sol.residual) + " above tolerance");
  }
  sol.policy = greedy_policy(mdp, sol.value);
  return sol;
}

ExactSolution value_iteration(const ExplicitMdp& mdp, double gamma, double tolerance, int max_iterations) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("discount must lie in [0,1)");
  const std::size_t n = mdp.num_states;
  ExactSolution sol;
  sol.value.assign(n, 0.0);
  std::vector<double> q(n), next(n);
  for (int it = 0; it < max_iterations; ++it) {
    std::fill(next.begin(), next.end(), -INFINITY);
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      kernels::affine_spmv(mdp.transitions[a], mdp.reward, gamma, sol.value, q);
      for (std::size_t i = 0; i < n; ++i) next[i] = std::max(next[i], q[i]);
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - sol.value[i]));
    sol.value.swap(next);
    sol.iterations = it + 1;
    sol.residual = delta;
    if (delta <= tolerance) break;
  }
  if (sol.residual > tolerance) throw Error("value iteration hit its iteration cap");
  sol.policy = greedy_policy(mdp, sol.value);
  return sol;
}

std::vector<ActionId> tabulate_policy(const ProblemInstance& problem,
                                      const std::function<ActionId(std::span<const Value>)>& policy,
                                      std::uint64_t cap) {
  const auto& space = problem.space();
  const std::uint64_t n = checked_size(space, cap);
  std::vector<ActionId> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = policy(space.state_at(i));
  return out;
}

}  // namespace wvplan
