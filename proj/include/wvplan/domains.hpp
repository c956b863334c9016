#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wvplan/problem.hpp"

namespace wvplan {

enum class GridVariant { ThreeDoors, OneKey, ThreeKeys, Shuttlebot, TenByTen };

std::string to_string(GridVariant v);

struct GridOptions {
  double move_success = 0.8;
  double open_success = 0.1;
  double gamma = 0.99999;
};

ProblemInstance build_grid_problem(GridVariant variant, const GridOptions& options = {});

struct Robot4Options {
  double forward_success = 0.8;
  double light_success = 1.0;
  double gamma = 0.99999;
};

/// Cycle of k rooms, one light per room; forward only works with the light on.
ProblemInstance build_robot4(int k, const Robot4Options& options = {});

struct RoadGraph {
  std::vector<std::string> locations;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // directed
  std::vector<bool> spare;
  std::size_t initial = 0;
  std::size_t goal = 0;
};

/// One line per location: `name [spare] [initial] [goal] : neighbour ...`.
/// Edges are directed from the line's location to each listed neighbour.
RoadGraph parse_road_graph(std::istream& in);
RoadGraph load_road_graph(const std::string& path);
std::string road_graph_to_string(const RoadGraph& graph);

struct TireworldOptions {
  double flat_probability = 0.5;
  double gamma = 0.95;
};

ProblemInstance build_tireworld(const RoadGraph& graph, const TireworldOptions& options = {});

/// `3doors|1key|3keys|shuttlebot|10x10|robot4:<k>|tireworld:<graph-file>`.
ProblemInstance build_problem(std::string_view selector);

}  // namespace wvplan
