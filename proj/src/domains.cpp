#include "wvplan/domains.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace wvplan {

std::string to_string(GridVariant v) {
  switch (v) {
    case GridVariant::ThreeDoors: return "3doors";
    case GridVariant::OneKey: return "1key";
    case GridVariant::ThreeKeys: return "3keys";
    case GridVariant::Shuttlebot: return "shuttlebot";
    case GridVariant::TenByTen: return "10x10";
  }
  return "?";
}

namespace {

std::vector<std::string> numbered(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

const std::vector<std::string> kDoor = {"closed", "open"};
const std::vector<std::string> kNoYes = {"no", "yes"};
const std::vector<std::string> kBinary = {"0", "1"};

/// Rule-authoring helper bound to one space.
class Author {
 public:
  explicit Author(const FactoredSpace& space) : space_(space) {}

  Literal operator()(std::string_view dim, std::string_view value) const { return space_.literal(dim, value); }
  Literal operator()(std::string_view dim, int value) const { return space_.literal(dim, std::to_string(value)); }

  static TransitionRule rule(PartialAssignment guard, double p, PartialAssignment effect) {
    return TransitionRule::simple(std::move(guard), p, std::move(effect));
  }

 private:
  const FactoredSpace& space_;
};

struct Door {
  int index;     // 1-based, names d1..d3
  int x_a, y_a;  // the two cells on either side
  int x_b, y_b;
};

// Door 1 joins (2,2)-(2,3), door 2 joins (7,2)-(7,3), door 3 joins (4,9)-(5,9).
const Door kDoors[3] = {{1, 2, 2, 2, 3}, {2, 7, 2, 7, 3}, {3, 4, 9, 5, 9}};

struct KeySpot {
  int key;
  int x, y;
};

// Keys 3 and 1 sit in the corridor's east end; key 2 is inside the south-east room.
const KeySpot kKeys[3] = {{3, 7, 0}, {1, 9, 0}, {2, 9, 9}};

class GridBuilder {
 public:
  GridBuilder(GridVariant variant, const GridOptions& opt) : variant_(variant), opt_(opt) {}

  ProblemInstance build() {
    std::vector<Dimension> dims = {{"x", numbered(10)}, {"y", numbered(10)}, {"d1", kDoor}, {"d2", kDoor}, {"d3", kDoor}};
    if (variant_ == GridVariant::Shuttlebot) {
      dims.push_back({"loaded", kNoYes});
      dims.push_back({"dmg", {"none", "dented", "broken"}});
    } else {
      dims.push_back({"dmg", kNoYes});
    }
    if (variant_ == GridVariant::ThreeKeys) {
      for (int k = 1; k <= 3; ++k) dims.push_back({"k" + std::to_string(k), kNoYes});
    } else if (variant_ == GridVariant::OneKey) {
      dims.push_back({"held", {"none", "k1", "k2", "k3"}});
    } else if (variant_ == GridVariant::TenByTen) {
      dims.push_back({"xx", numbered(10)});
      dims.push_back({"yy", numbered(10)});
    }
    space_ = FactoredSpace(dims);
    Author L(space_);

    std::vector<std::string> actions = {"Stay", "South", "North", "East", "West", "Open"};
    const bool keys = variant_ == GridVariant::ThreeKeys || variant_ == GridVariant::OneKey;
    if (keys) actions.push_back("PickUp");

    std::vector<std::vector<TransitionRule>> rules(actions.size());
    rules[1] = south();
    rules[2] = north();
    rules[3] = east();
    rules[4] = west();
    rules[5] = open();
    if (keys) rules[6] = pickup();
    if (variant_ == GridVariant::Shuttlebot) {
      for (auto& list : rules) {
        std::vector<TransitionRule> depots = {
            Author::rule({L("x", 1), L("y", 0), L("loaded", "no")}, 1.0, {L("loaded", "yes")}),
            Author::rule({L("x", 7), L("y", 7), L("loaded", "yes")}, 1.0, {L("loaded", "no")}),
        };
        list.insert(list.begin(), depots.begin(), depots.end());
      }
    }

    std::vector<RewardRule> reward;
    double fallback = -1.0;
    if (variant_ == GridVariant::Shuttlebot) {
      reward = {{normalize({L("dmg", "broken")}), -1.0},
                {normalize({L("x", 1), L("y", 0), L("loaded", "no")}), 1.0},
                {normalize({L("x", 7), L("y", 7), L("loaded", "yes")}), 1.0}};
      fallback = 0.0;
    } else {
      reward.push_back({normalize({L("dmg", "yes")}), -2.0});
      PartialAssignment goal = {L("x", 7), L("y", 7)};
      if (variant_ == GridVariant::TenByTen) {
        goal.push_back(L("xx", 9));
        goal.push_back(L("yy", 9));
      }
      reward.push_back({normalize(goal), 0.0});
    }

    ProblemInstance p;
    p.name = to_string(variant_);
    p.gamma_default = opt_.gamma;
    p.initial_state = SpecificState(space_.num_dims(), 0);
    if (variant_ != GridVariant::Shuttlebot) {
      PartialAssignment goal = {L("x", 7), L("y", 7)};
      if (variant_ == GridVariant::TenByTen) {
        goal.push_back(L("xx", 9));
        goal.push_back(L("yy", 9));
      }
      p.goal = normalize(goal);
    }
    p.model = ActionModel(space_, actions, std::move(rules), std::move(reward), fallback);
    return p;
  }

 private:
  Literal lit(std::string_view d, int v) const { return space_.literal(d, std::to_string(v)); }
  Literal lit(std::string_view d, std::string_view v) const { return space_.literal(d, v); }

  TransitionRule move(PartialAssignment guard, PartialAssignment effect) const {
    return Author::rule(std::move(guard), opt_.move_success, std::move(effect));
  }

  /// Bumping into a wall or closed door damages the robot.
  void bump(std::vector<TransitionRule>& out, PartialAssignment guard) const {
    if (variant_ == GridVariant::Shuttlebot) {
      auto g = guard;
      g.push_back(lit("dmg", "none"));
      out.push_back(Author::rule(g, 1.0, {lit("dmg", "dented")}));
      out.push_back(Author::rule(std::move(guard), 1.0, {lit("dmg", "broken")}));
    } else {
      out.push_back(Author::rule(std::move(guard), 1.0, {lit("dmg", "yes")}));
    }
  }

  std::vector<TransitionRule> south() const {
    std::vector<TransitionRule> r;
    r.push_back(move({lit("x", 2), lit("y", 2), lit("d1", "open")}, {lit("y", 3)}));
    r.push_back(move({lit("x", 7), lit("y", 2), lit("d2", "open")}, {lit("y", 3)}));
    if (variant_ == GridVariant::TenByTen) {
      for (int t = 0; t < 9; ++t) r.push_back(move({lit("x", 7), lit("y", 9), lit("yy", t)}, {lit("y", 0), lit("yy", t + 1)}));
    }
    bump(r, {lit("y", 2)});
    bump(r, {lit("y", 9)});
    for (int v = 0; v < 9; ++v) {
      if (v != 2) r.push_back(move({lit("y", v)}, {lit("y", v + 1)}));
    }
    return r;
  }

  std::vector<TransitionRule> north() const {
    std::vector<TransitionRule> r;
    r.push_back(move({lit("x", 2), lit("y", 3), lit("d1", "open")}, {lit("y", 2)}));
    r.push_back(move({lit("x", 7), lit("y", 3), lit("d2", "open")}, {lit("y", 2)}));
    if (variant_ == GridVariant::TenByTen) {
      for (int t = 1; t < 10; ++t) r.push_back(move({lit("x", 7), lit("y", 0), lit("yy", t)}, {lit("y", 9), lit("yy", t - 1)}));
    }
    bump(r, {lit("y", 0)});
    bump(r, {lit("y", 3)});
    for (int v = 1; v < 10; ++v) {
      if (v != 3) r.push_back(move({lit("y", v)}, {lit("y", v - 1)}));
    }
    return r;
  }

  std::vector<TransitionRule> east() const {
    std::vector<TransitionRule> r;
    for (int y = 0; y < 3; ++y) r.push_back(move({lit("x", 4), lit("y", y)}, {lit("x", 5)}));
    r.push_back(move({lit("x", 4), lit("y", 9), lit("d3", "open")}, {lit("x", 5)}));
    if (variant_ == GridVariant::TenByTen) {
      for (int y = 0; y < 3; ++y) {
        for (int t = 0; t < 9; ++t) r.push_back(move({lit("x", 9), lit("y", y), lit("xx", t)}, {lit("x", 0), lit("xx", t + 1)}));
      }
    }
    bump(r, {lit("x", 4)});
    bump(r, {lit("x", 9)});
    for (int v = 0; v < 9; ++v) {
      if (v != 4) r.push_back(move({lit("x", v)}, {lit("x", v + 1)}));
    }
    return r;
  }

  std::vector<TransitionRule> west() const {
    std::vector<TransitionRule> r;
    for (int y = 0; y < 3; ++y) r.push_back(move({lit("x", 5), lit("y", y)}, {lit("x", 4)}));
    r.push_back(move({lit("x", 5), lit("y", 9), lit("d3", "open")}, {lit("x", 4)}));
    if (variant_ == GridVariant::TenByTen) {
      for (int y = 0; y < 3; ++y) {
        for (int t = 1; t < 10; ++t) r.push_back(move({lit("x", 0), lit("y", y), lit("xx", t)}, {lit("x", 9), lit("xx", t - 1)}));
      }
    }
    bump(r, {lit("x", 5)});
    bump(r, {lit("x", 0)});
    for (int v = 1; v < 10; ++v) {
      if (v != 5) r.push_back(move({lit("x", v)}, {lit("x", v - 1)}));
    }
    return r;
  }

  Literal key_literal(int key) const {
    if (variant_ == GridVariant::ThreeKeys) return lit("k" + std::to_string(key), "yes");
    return lit("held", "k" + std::to_string(key));
  }

  std::vector<TransitionRule> open() const {
    std::vector<TransitionRule> r;
    const bool keys = variant_ == GridVariant::ThreeKeys || variant_ == GridVariant::OneKey;
    for (const auto& door : kDoors) {
      const std::string d = "d" + std::to_string(door.index);
      for (auto [x, y] : {std::pair{door.x_a, door.y_a}, std::pair{door.x_b, door.y_b}}) {
        if (keys) {
          r.push_back(Author::rule({lit("x", x), lit("y", y), lit(d, "closed"), key_literal(door.index)}, opt_.open_success,
                                   {lit(d, "open")}));
          r.push_back(Author::rule({lit("x", x), lit("y", y)}, 1.0, {}));
        } else {
          r.push_back(Author::rule({lit("x", x), lit("y", y)}, opt_.open_success, {lit(d, "open")}));
        }
      }
    }
    bump(r, {});
    return r;
  }

  std::vector<TransitionRule> pickup() const {
    std::vector<TransitionRule> r;
    for (const auto& k : kKeys) r.push_back(Author::rule({lit("x", k.x), lit("y", k.y)}, 1.0, {key_literal(k.key)}));
    return r;
  }

  GridVariant variant_;
  GridOptions opt_;
  FactoredSpace space_;
};

int parse_positive_int(std::string_view text, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v <= 0) {
    throw Error("invalid " + what + " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

ProblemInstance build_grid_problem(GridVariant variant, const GridOptions& options) {
  return GridBuilder(variant, options).build();
}

ProblemInstance build_robot4(int k, const Robot4Options& opt) {
  if (k < 2) throw Error("robot4 needs at least two rooms");
  std::vector<Dimension> dims = {{"room", numbered(k)}};
  for (int i = 0; i < k; ++i) dims.push_back({"light" + std::to_string(i), {"off", "on"}});
  FactoredSpace space(dims);
  Author L(space);
  std::vector<std::string> actions = {"noop", "forward", "light-on", "light-off"};
  std::vector<std::vector<TransitionRule>> rules(4);
  for (int i = 0; i < k; ++i) {
    const std::string light = "light" + std::to_string(i);
    rules[1].push_back(Author::rule({L("room", i), L(light, "on")}, opt.forward_success, {L("room", (i + 1) % k)}));
    rules[2].push_back(Author::rule({L("room", i)}, opt.light_success, {L(light, "on")}));
    rules[3].push_back(Author::rule({L("room", i)}, opt.light_success, {L(light, "off")}));
  }
  std::vector<RewardRule> reward = {{normalize({L("room", k - 1)}), 0.0}};
  ProblemInstance p;
  p.name = "robot4-" + std::to_string(k);
  p.gamma_default = opt.gamma;
  p.initial_state = SpecificState(space.num_dims(), 0);
  p.goal = normalize({L("room", k - 1)});
  p.model = ActionModel(space, actions, std::move(rules), std::move(reward), -1.0);
  return p;
}

RoadGraph parse_road_graph(std::istream& in) {
  RoadGraph g;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::string>> neighbours;
  bool have_initial = false, have_goal = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::vector<std::string> toks;
    for (std::string t; is >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    const std::string where = "road graph line " + std::to_string(line_no);
    const std::string& name = toks[0];
    if (name == ":") throw Error(where + ": missing location name");
    if (index.count(name)) throw Error(where + ": duplicate location '" + name + "'");
    const std::size_t id = g.locations.size();
    index[name] = id;
    g.locations.push_back(name);
    g.spare.push_back(false);
    neighbours.emplace_back();
    std::size_t i = 1;
    for (; i < toks.size() && toks[i] != ":"; ++i) {
      if (toks[i] == "spare") {
        g.spare[id] = true;
      } else if (toks[i] == "initial") {
        if (have_initial) throw Error(where + ": second initial location");
        g.initial = id;
        have_initial = true;
      } else if (toks[i] == "goal") {
        if (have_goal) throw Error(where + ": second goal location");
        g.goal = id;
        have_goal = true;
      } else {
        throw Error(where + ": unknown marker '" + toks[i] + "'");
      }
    }
    if (i == toks.size()) throw Error(where + ": missing ':'");
    for (++i; i < toks.size(); ++i) neighbours[id].push_back(toks[i]);
  }
  if (g.locations.empty()) throw Error("road graph has no locations");
  if (!have_initial) throw Error("road graph has no initial location");
  if (!have_goal) throw Error("road graph has no goal location");
  for (std::size_t a = 0; a < neighbours.size(); ++a) {
    for (const auto& n : neighbours[a]) {
      auto it = index.find(n);
      if (it == index.end()) throw Error("road graph: unknown neighbour '" + n + "' of '" + g.locations[a] + "'");
      if (it->second == a) throw Error("road graph: self loop at '" + n + "'");
      g.edges.emplace_back(a, it->second);
    }
  }
  return g;
}

RoadGraph load_road_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open road graph '" + path + "'");
  return parse_road_graph(in);
}

std::string road_graph_to_string(const RoadGraph& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.locations.size(); ++i) {
    os << g.locations[i];
    if (g.spare[i]) os << " spare";
    if (g.initial == i) os << " initial";
    if (g.goal == i) os << " goal";
    os << " :";
    for (const auto& [a, b] : g.edges) {
      if (a == i) os << ' ' << g.locations[b];
    }
    os << "\n";
  }
  return os.str();
}

ProblemInstance build_tireworld(const RoadGraph& g, const TireworldOptions& opt) {
  const std::size_t n = g.locations.size();
  if (n == 0) throw Error("road graph has no locations");
  if (g.spare.size() != n || g.initial >= n || g.goal >= n) throw Error("malformed road graph");
  if (!(opt.flat_probability >= 0.0 && opt.flat_probability <= 1.0)) throw Error("flat probability outside [0,1]");
  std::vector<Dimension> dims;
  for (const auto& l : g.locations) dims.push_back({"at_" + l, kBinary});
  for (const auto& l : g.locations) dims.push_back({"spare_" + l, kBinary});
  dims.push_back({"has_spare", kBinary});
  dims.push_back({"flat", kBinary});
  FactoredSpace space(dims);
  Author L(space);

  std::vector<std::string> actions = {"noop"};
  std::vector<std::vector<TransitionRule>> rules(1);
  for (const auto& [a, b] : g.edges) {
    const std::string at_a = "at_" + g.locations[a], at_b = "at_" + g.locations[b];
    actions.push_back("move_" + g.locations[a] + "_" + g.locations[b]);
    TransitionRule r;
    r.guard = normalize({L(at_a, 1), L("flat", 0)});
    const double pf = opt.flat_probability;
    if (pf > 0.0) r.outcomes.push_back({pf, normalize({L(at_a, 0), L(at_b, 1), L("flat", 1)})});
    if (pf < 1.0) r.outcomes.push_back({1.0 - pf, normalize({L(at_a, 0), L(at_b, 1)})});
    rules.push_back({r});
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (!g.spare[l]) continue;
    const std::string& name = g.locations[l];
    actions.push_back("pickup_" + name);
    rules.push_back({Author::rule({L("at_" + name, 1), L("spare_" + name, 1), L("has_spare", 0)}, 1.0,
                                  {L("has_spare", 1), L("spare_" + name, 0)})});
  }
  actions.push_back("change_tire");
  rules.push_back({Author::rule({L("flat", 1), L("has_spare", 1)}, 1.0, {L("flat", 0), L("has_spare", 0)})});

  const Literal at_goal = L("at_" + g.locations[g.goal], 1);
  ProblemInstance p;
  p.name = "tireworld-" + std::to_string(n);
  p.gamma_default = opt.gamma;
  p.initial_state = SpecificState(space.num_dims(), 0);
  p.initial_state[g.initial] = 1;
  for (std::size_t l = 0; l < n; ++l) p.initial_state[n + l] = g.spare[l] ? 1 : 0;
  p.goal = PartialAssignment{at_goal};
  p.model = ActionModel(space, actions, std::move(rules), {{{at_goal}, 0.0}}, -1.0);
  return p;
}

ProblemInstance build_problem(std::string_view selector) {
  if (selector == "3doors") return build_grid_problem(GridVariant::ThreeDoors);
  if (selector == "1key") return build_grid_problem(GridVariant::OneKey);
  if (selector == "3keys") return build_grid_problem(GridVariant::ThreeKeys);
  if (selector == "shuttlebot") return build_grid_problem(GridVariant::Shuttlebot);
  if (selector == "10x10") return build_grid_problem(GridVariant::TenByTen);
  if (selector.starts_with("robot4:")) return build_robot4(parse_positive_int(selector.substr(7), "room count"));
  if (selector.starts_with("tireworld:")) return build_tireworld(load_road_graph(std::string(selector.substr(10))));
  throw Error("unknown problem '" + std::string(selector) + "'");
}

}  // namespace wvplan
