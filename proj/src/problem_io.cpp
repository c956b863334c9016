#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "wvplan/problem.hpp"

namespace wvplan {

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}


namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, int line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error("line " + std::to_string(line_no) + ": expected a number, got '" + tok + "'");
  }
  return v;
}

PartialAssignment parse_assignment(const FactoredSpace& space, const std::vector<std::string>& toks,
                                   std::size_t begin, std::size_t end, int line_no) {
  PartialAssignment out;
  for (std::size_t i = begin; i < end; ++i) {
    if (toks[i] == "*") continue;
    auto eq = toks[i].find('=');
    if (eq == std::string::npos) {
      throw Error("line " + std::to_string(line_no) + ": expected dim=value, got '" + toks[i] + "'");
    }
    try {
      out.push_back(space.literal(toks[i].substr(0, eq), toks[i].substr(eq + 1)));
    } catch (const Error& e) {
      throw Error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    return normalize(std::move(out));
  } catch (const Error& e) {
    throw Error("line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::string format_assignment(const FactoredSpace& space, const PartialAssignment& a) {
  if (a.empty()) return "*";
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) out += ' ';
    out += space.dim(a[i].dim).name + "=" + space.dim(a[i].dim).values[a[i].value];
  }
  return out;
}

std::size_t find_token(const std::vector<std::string>& toks, const std::string& what, std::size_t from, int line_no) {
  for (std::size_t i = from; i < toks.size(); ++i) {
    if (toks[i] == what) return i;
  }
  throw Error("line " + std::to_string(line_no) + ": missing '" + what + "'");
}

}  // namespace

ProblemInstance parse_problem(std::istream& in) {
  std::string name = "unnamed";
  double gamma = 0.95;
  std::vector<Dimension> dims;
  std::vector<std::string> actions;
  struct PendingLine {
    int line_no;
    std::vector<std::string> toks;
  };
  std::vector<PendingLine> rule_lines, reward_lines;
  std::optional<PendingLine> initial_line, goal_line;
  std::optional<double> reward_default;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    const auto& kw = toks[0];
    if (kw == "problem") {
      if (toks.size() != 2) throw Error("line " + std::to_string(line_no) + ": problem takes one name");
      name = toks[1];
    } else if (kw == "gamma") {
      if (toks.size() != 2) throw Error("line " + std::to_string(line_no) + ": gamma takes one value");
      gamma = parse_real(toks[1], line_no);
    } else if (kw == "dimension") {
      if (toks.size() < 3) throw Error("line " + std::to_string(line_no) + ": dimension needs a name and values");
      dims.push_back(Dimension{toks[1], {toks.begin() + 2, toks.end()}});
    } else if (kw == "action") {
      if (toks.size() != 2) throw Error("line " + std::to_string(line_no) + ": action takes one name");
      actions.push_back(toks[1]);
    } else if (kw == "rule") {
      rule_lines.push_back({line_no, toks});
    } else if (kw == "reward") {
      if (toks.size() == 3 && toks[1] == "default") {
        reward_default = parse_real(toks[2], line_no);
      } else {
        reward_lines.push_back({line_no, toks});
      }
    } else if (kw == "initial") {
      initial_line = PendingLine{line_no, toks};
    } else if (kw == "goal") {
      goal_line = PendingLine{line_no, toks};
    } else {
      throw Error("line " + std::to_string(line_no) + ": unknown keyword '" + kw + "'");
    }
  }

  FactoredSpace space(std::move(dims));
  std::map<std::string, std::size_t> action_index;
  for (std::size_t a = 0; a < actions.size(); ++a) action_index[actions[a]] = a;

  std::vector<std::vector<TransitionRule>> rules(actions.size());
  for (const auto& [ln, toks] : rule_lines) {
    if (toks.size() < 3 || toks[2] != ":") throw Error("line " + std::to_string(ln) + ": expected 'rule <action> :'");
    auto it = action_index.find(toks[1]);
    if (it == action_index.end()) throw Error("line " + std::to_string(ln) + ": unknown action '" + toks[1] + "'");
    std::size_t arrow = find_token(toks, "->", 3, ln);
    TransitionRule rule;
    rule.guard = parse_assignment(space, toks, 3, arrow, ln);
    std::size_t pos = arrow + 1;
    while (pos < toks.size()) {
      std::size_t end = pos;
      while (end < toks.size() && toks[end] != "|") ++end;
      if (end == pos) throw Error("line " + std::to_string(ln) + ": empty outcome");
      Outcome o;
      o.probability = parse_real(toks[pos], ln);
      o.effect = parse_assignment(space, toks, pos + 1, end, ln);
      rule.outcomes.push_back(std::move(o));
      pos = end + 1;
    }
    if (rule.outcomes.empty()) throw Error("line " + std::to_string(ln) + ": rule without outcomes");
    rules[it->second].push_back(std::move(rule));
  }

  std::vector<RewardRule> reward_rules;
  for (const auto& [ln, toks] : reward_lines) {
    std::size_t arrow = find_token(toks, "->", 1, ln);
    if (arrow + 2 != toks.size()) throw Error("line " + std::to_string(ln) + ": reward needs one value after '->'");
    reward_rules.push_back(RewardRule{parse_assignment(space, toks, 1, arrow, ln), parse_real(toks[arrow + 1], ln)});
  }

  ProblemInstance p;
  p.name = name;
  p.gamma_default = gamma;
  p.model = ActionModel(space, actions, std::move(rules), std::move(reward_rules), reward_default.value_or(0.0));
  if (!initial_line) throw Error("problem has no initial state");
  auto init = parse_assignment(space, initial_line->toks, 1, initial_line->toks.size(), initial_line->line_no);
  if (init.size() != space.num_dims()) throw Error("initial state must bind every dimension");
  p.initial_state.resize(space.num_dims());
  for (const auto& lit : init) p.initial_state[lit.dim] = lit.value;
  if (goal_line) p.goal = parse_assignment(space, goal_line->toks, 1, goal_line->toks.size(), goal_line->line_no);
  return p;
}

ProblemInstance load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file '" + path + "'");
  return parse_problem(in);
}

void write_problem(std::ostream& out, const ProblemInstance& p) {
  const auto& space = p.space();
  const auto& m = p.model;
  out << "problem " << p.name << "\n";
  out << "gamma " << format_real(p.gamma_default) << "\n";
  for (const auto& d : space.dims()) {
    out << "dimension " << d.name;
    for (const auto& v : d.values) out << ' ' << v;
    out << "\n";
  }
  for (const auto& a : m.action_names()) out << "action " << a << "\n";
  for (ActionId a = 0; a < m.num_actions(); ++a) {
    for (const auto& r : m.rules(a)) {
      out << "rule " << m.action_name(a) << " : " << format_assignment(space, r.guard) << " ->";
      for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
        if (i > 0) out << " |";
        out << ' ' << format_real(r.outcomes[i].probability) << ' ' << format_assignment(space, r.outcomes[i].effect);
      }
      out << "\n";
    }
  }
  for (const auto& r : m.reward_rules()) {
    out << "reward " << format_assignment(space, r.guard) << " -> " << format_real(r.value) << "\n";
  }
  out << "reward default " << format_real(m.reward_fallback()) << "\n";
  PartialAssignment init;
  for (DimIndex d = 0; d < space.num_dims(); ++d) init.push_back(Literal{d, p.initial_state[d]});
  out << "initial " << format_assignment(space, init) << "\n";
  if (p.goal) out << "goal " << format_assignment(space, *p.goal) << "\n";
}

std::string problem_to_string(const ProblemInstance& problem) {
  std::ostringstream os;
  write_problem(os, problem);
  return os.str();
}

}  // namespace wvplan
