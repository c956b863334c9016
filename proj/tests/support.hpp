#pragma once

// Independent reference computations used as test oracles. Nothing here
// goes through the decision trees, the worldview trie or the sparse kernels.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "wvplan/problem.hpp"
#include "wvplan/worldview.hpp"

namespace wvplan::testing {

/// Calls fn(s) for every specific state inside `pattern` (odometer order).
inline void for_each_member(const FactoredSpace& space, const Pattern& pattern,
                            const std::function<void(const SpecificState&)>& fn) {
  std::vector<std::size_t> free;
  SpecificState s(space.num_dims());
  for (std::size_t d = 0; d < space.num_dims(); ++d) {
    if (pattern[d] == kAbstract) {
      free.push_back(d);
      s[d] = 0;
    } else {
      s[d] = pattern[d];
    }
  }
  for (;;) {
    fn(s);
    std::size_t k = free.size();
    for (; k > 0; --k) {
      const std::size_t d = free[k - 1];
      if (++s[d] < space.width(d)) break;
      s[d] = 0;
    }
    if (k == 0) return;
  }
}

inline bool guard_holds(const PartialAssignment& guard, const SpecificState& s) {
  for (const auto& lit : guard) {
    if (s[lit.dim] != lit.value) return false;
  }
  return true;
}

/// Successor distribution straight from the first-match rule list.
inline std::map<SpecificState, double> rule_distribution(const ActionModel& model, ActionId a,
                                                         const SpecificState& s) {
  std::map<SpecificState, double> out;
  for (const auto& rule : model.rules(a)) {
    if (!guard_holds(rule.guard, s)) continue;
    double used = 0.0;
    for (const auto& o : rule.outcomes) {
      SpecificState next = s;
      for (const auto& lit : o.effect) next[lit.dim] = lit.value;
      out[next] += o.probability;
      used += o.probability;
    }
    if (used < 1.0 - 1e-15) out[s] += 1.0 - used;
    return out;
  }
  out[s] = 1.0;
  return out;
}

inline double rule_reward(const ActionModel& model, const SpecificState& s) {
  for (const auto& rule : model.reward_rules()) {
    if (guard_holds(rule.guard, s)) return rule.value;
  }
  return model.reward_fallback();
}

inline bool pattern_contains(const Pattern& p, const SpecificState& s) {
  for (std::size_t d = 0; d < p.size(); ++d) {
    if (p[d] != kAbstract && p[d] != s[d]) return false;
  }
  return true;
}

/// The live state containing s, found by a linear scan.
inline StateId scan_locate(const Worldview& wv, const SpecificState& s) {
  for (StateId id = 0; id < wv.id_bound(); ++id) {
    if (wv.contains(id) && pattern_contains(wv.pattern(id), s)) return id;
  }
  return kNoState;
}

/// Pr(w, a, w') as the double sum (1/|w|) Σ_{s∈w} Σ_{s'∈w'} T(s, a, s').
inline std::map<StateId, double> brute_transition(const Worldview& wv, const ActionModel& model, StateId w,
                                                  ActionId a) {
  std::map<StateId, double> out;
  double count = 0.0;
  for_each_member(wv.space(), wv.pattern(w), [&](const SpecificState& s) {
    count += 1.0;
    for (const auto& [next, p] : rule_distribution(model, a, s)) out[scan_locate(wv, next)] += p;
  });
  for (auto& [id, p] : out) p /= count;
  return out;
}

inline double brute_reward(const Worldview& wv, const ActionModel& model, StateId w) {
  double total = 0.0, count = 0.0;
  for_each_member(wv.space(), wv.pattern(w), [&](const SpecificState& s) {
    total += rule_reward(model, s);
    count += 1.0;
  });
  return total / count;
}

/// Dense model of a small problem with its own state numbering.
struct DenseMdp {
  std::vector<SpecificState> states;
  std::map<SpecificState, std::size_t> index;
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> next;  // [a][s]
  std::vector<double> reward;
  std::size_t initial = 0;
};

inline DenseMdp dense_mdp(const ProblemInstance& problem) {
  DenseMdp m;
  const auto& space = problem.space();
  for_each_member(space, Pattern(space.num_dims(), kAbstract), [&](const SpecificState& s) {
    m.index[s] = m.states.size();
    m.states.push_back(s);
  });
  m.initial = m.index.at(problem.initial_state);
  m.next.resize(problem.model.num_actions());
  for (ActionId a = 0; a < problem.model.num_actions(); ++a) {
    m.next[a].resize(m.states.size());
    for (std::size_t i = 0; i < m.states.size(); ++i) {
      for (const auto& [s, p] : rule_distribution(problem.model, a, m.states[i])) {
        m.next[a][i].emplace_back(m.index.at(s), p);
      }
    }
  }
  for (const auto& s : m.states) m.reward.push_back(rule_reward(problem.model, s));
  return m;
}

/// Gauss-Seidel value iteration to a sup-norm change below `tol`.
inline std::vector<double> dense_optimal_values(const DenseMdp& m, double gamma, double tol = 1e-11) {
  std::vector<double> v(m.states.size(), 0.0);
  for (;;) {
    double change = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      double best = -INFINITY;
      for (const auto& rows : m.next) {
        double q = 0.0;
        for (const auto& [j, p] : rows[i]) q += p * v[j];
        best = std::max(best, m.reward[i] + gamma * q);
      }
      change = std::max(change, std::abs(best - v[i]));
      v[i] = best;
    }
    if (change < tol * (1.0 - gamma)) return v;
  }
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Value of a fixed policy (by dense index) from the dense model.
inline std::vector<double> dense_policy_values(const DenseMdp& m, const std::vector<ActionId>& policy, double gamma) {
  const std::size_t n = m.states.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] += 1.0;
    for (const auto& [j, p] : m.next[policy[i]][i]) a[i][j] -= gamma * p;
  }
  return dense_solve(std::move(a), m.reward);
}

}  // namespace wvplan::testing
