#include "wvplan/proximity.hpp"

#include <algorithm>
#include <cmath>

#include "wvplan/kernels.hpp"

namespace wvplan {

namespace {

double future_probability(const PlannerConfig& c, std::size_t num_actions, ActionId current, ActionId a) {
  if (num_actions == 1) return 1.0;
  const double rho = c.replanning_probability;
  return a == current ? 1.0 - rho : rho / static_cast<double>(num_actions - 1);
}

}  // namespace

StochasticPolicy build_future_policy(const Worldview& wv, const PlannerTables& t, const PlannerConfig& c,
                                     std::size_t num_actions) {
  StochasticPolicy out(wv.id_bound());
  for (auto w : wv.sorted_ids()) {
    out[w].resize(num_actions);
    for (ActionId a = 0; a < num_actions; ++a) out[w][a] = future_probability(c, num_actions, t.policy[w], a);
  }
  return out;
}

std::vector<double> cur_vector(const Worldview& wv, std::span<const Value> s_cur, const PlannerConfig& c) {
  std::vector<double> out(wv.id_bound(), 0.0);
  out[wv.locate(s_cur)] = 1.0 - c.gamma_p;
  return out;
}

ProximityReport compute_proximity(const Worldview& wv, AbstractDynamics& dyn, PlannerTables& t,
                                  std::span<const Value> s_cur, const PlannerConfig& c) {
  t.ensure(wv.id_bound());
  const auto& order = wv.sorted_ids();
  const std::size_t n = order.size();
  std::vector<std::int32_t> dense(wv.id_bound(), -1);
  for (std::size_t i = 0; i < n; ++i) dense[order[i]] = static_cast<std::int32_t>(i);

  // Rows of T_π̃ᵀ: for every target, the mass flowing in from each source.
  std::vector<std::vector<std::pair<std::int32_t, double>>> incoming(n);
  const std::size_t num_actions = dyn.model().num_actions();
  for (std::size_t j = 0; j < n; ++j) {
    const StateId w = order[j];
    for (ActionId a = 0; a < num_actions; ++a) {
      const double pa = future_probability(c, num_actions, t.policy[w], a);
      if (pa == 0.0) continue;
      for (const auto& s : dyn.transitions(wv, w, a)) {
        incoming[dense[s.id]].emplace_back(static_cast<std::int32_t>(j), pa * s.probability);
      }
    }
  }
  kernels::CsrMatrix m;
  m.cols = n;
  m.row_ptr.reserve(n + 1);
  for (auto& row : incoming) {
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == row[k - 1].first) {
        m.val.back() += row[k].second;
      } else {
        m.col.push_back(row[k].first);
        m.val.push_back(row[k].second);
      }
    }
    m.row_ptr.push_back(static_cast<std::uint32_t>(m.col.size()));
  }

  const std::size_t here = static_cast<std::size_t>(dense[wv.locate(s_cur)]);
  std::vector<double> cur(n, 0.0), x(n, 0.0), y(n, 0.0);
  cur[here] = 1.0 - c.gamma_p;
  double stored = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = t.proximity[order[i]];
    stored += x[i];
  }
  if (!(std::abs(stored - 1.0) <= 1e-6)) {
    std::fill(x.begin(), x.end(), 0.0);
    x[here] = 1.0;
  }

  const double tol = 1e-10;
  const int cap =
      c.gamma_p <= 0.0 ? 10 : 10 * static_cast<int>(std::ceil(std::log(tol) / std::log(c.gamma_p)));
  ProximityReport report;
  for (;;) {
    report.residual = kernels::affine_spmv(m, cur, c.gamma_p, x, y);
    ++report.iterations;
    x.swap(y);
    if (report.residual <= tol) break;
    if (report.iterations >= cap) {
      throw Error("proximity solve did not converge in " + std::to_string(cap) + " iterations");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    t.proximity[order[i]] = x[i];
    report.total += x[i];
  }
  return report;
}

}  // namespace wvplan
