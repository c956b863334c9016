#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "wvplan/action_model.hpp"

namespace wvplan {

struct ProblemInstance {
  std::string name;
  ActionModel model;
  SpecificState initial_state;
  double gamma_default = 0.95;
  /// States satisfying this count as "goal reached" in run summaries.
  std::optional<PartialAssignment> goal;

  const FactoredSpace& space() const { return model.space(); }
};

/// Text problem format, one declaration per line, `#` starts a comment:
///
///     problem <name>
///     gamma <real>
///     dimension <name> <value> <value> ...
///     action <name>                     (first declared action is a0)
///     rule <action> : <guard> -> <p> <effect> [| <p> <effect> ...]
///     reward <guard> -> <real>
///     reward default <real>
///     initial <dim>=<value> ...
///     goal <dim>=<value> ...
///
/// Guards and effects are space-separated `dim=value` lists, `*` when empty.
/// Shortest text that reads back to the same double.
std::string format_real(double v);

ProblemInstance parse_problem(std::istream& in);
ProblemInstance load_problem(const std::string& path);
void write_problem(std::ostream& out, const ProblemInstance& problem);
std::string problem_to_string(const ProblemInstance& problem);

}  // namespace wvplan
