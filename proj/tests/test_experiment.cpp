#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wvplan/experiment.hpp"

using namespace wvplan;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wvplan-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("experiment config round trips through JSON") {
  ExperimentSpec spec;
  spec.problem = "3keys";
  spec.mode = RunMode::Recurrent;
  spec.gamma = 0.99999;
  spec.refine_threshold = 1e-7;
  spec.phase_weights = {{"policy-value", 1.0}, {"proximity-refine", 0.5}};
  spec.seeds = {3, 4, 9};
  spec.stop_at_goal = true;
  spec.out_dir = "somewhere";
  const auto back = spec_from_json(spec_to_json(spec));
  CHECK(back == spec);
  CHECK(spec_from_json(spec_to_json(ExperimentSpec{})) == ExperimentSpec{});
}

TEST_CASE("partial configs keep the base values and reject unknown keys") {
  ExperimentSpec base;
  base.phase_budget = 77;
  const auto spec = spec_from_json(R"({"problem": "1key", "gamma": null})", base);
  CHECK(spec.problem == "1key");
  CHECK(spec.phase_budget == 77);
  CHECK_FALSE(spec.gamma.has_value());
  CHECK_THROWS_AS(spec_from_json(R"({"gama": 0.9})"), Error);
  CHECK_THROWS_AS(spec_from_json(R"({"gamma": "high"})"), Error);
  CHECK_THROWS_AS(spec_from_json("[1,2]"), Error);
}

TEST_CASE("run configuration mapping") {
  ExperimentSpec spec;
  spec.phase_weights = {{"policy-value", 2.0}, {"coarsen", 1.0}};
  const auto problem = resolve_problem(spec);
  const auto rc = run_config_for(spec, *problem, 5);
  CHECK(rc.seed == 5);
  CHECK(rc.planner.gamma == problem->gamma_default);
  CHECK(rc.planner.phase_weights[0] == 2.0);
  CHECK(rc.planner.phase_weights[4] == 1.0);
  CHECK(rc.planner.phase_weights[1] == 0.0);
  spec.phase_weights = {{"sleep", 1.0}};
  CHECK_THROWS_AS(run_config_for(spec, *problem, 0), Error);
  const auto header = run_header(ExperimentSpec{}, *problem);
  CHECK(header.find("refine_threshold      1e-07") != std::string::npos);
  CHECK(header.find("gamma_p               0.95") != std::string::npos);
}

TEST_CASE("summary rows agree with the per-seed files") {
  ExperimentSpec spec;
  spec.mode = RunMode::Recurrent;
  spec.phase_weights = {{"policy-value", 1}, {"policy-refine", 1}, {"proximity-calc", 1}, {"proximity-refine", 1}};
  spec.seeds = {1, 2};
  spec.world_step_limit = 30;
  spec.phases_per_world_step = 4;
  spec.gamma = 0.95;
  spec.out_dir = scratch("summary").string();
  std::ostringstream log;
  const auto results = run_experiment(spec, log);
  REQUIRE(results.size() == 2);
  const auto summary = read_csv(std::filesystem::path(spec.out_dir) / "summary.csv");
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].size() == 17);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& row = summary[i + 1];
    const auto trace =
        read_csv(std::filesystem::path(spec.out_dir) / ("seed-" + std::to_string(spec.seeds[i]) + "-trace.csv"));
    REQUIRE(trace.size() == 31);
    CHECK(row[0] == std::to_string(spec.seeds[i]));
    CHECK(row[7] == "30");
    std::size_t peak = 0;
    double ret = 0.0, discount = 1.0;
    for (std::size_t r = 1; r < trace.size(); ++r) {
      peak = std::max<std::size_t>(peak, std::stoul(trace[r][4]));
      ret += discount * std::stod(trace[r][3]);
      discount *= 0.95;
    }
    CHECK(std::stoul(row[2]) >= peak);
    CHECK(std::stod(row[8]) == doctest::Approx(ret).epsilon(1e-12));
    CHECK(std::stoul(row[9]) == std::stoul(trace.back()[6]));
    CHECK(std::stoul(row[1]) == results[i].final_worldview_size);
    CHECK(!row[4].empty());
  }
  CHECK(log.str().find("seed 1:") != std::string::npos);
  const auto stored = load_spec((std::filesystem::path(spec.out_dir) / "experiment.json").string());
  CHECK(stored == spec);
}

TEST_CASE("identical seeded experiments write identical files") {
  ExperimentSpec spec;
  spec.phase_weights = {{"policy-value", 1}, {"policy-refine", 1}, {"proximity-refine", 1}, {"coarsen", 1}};
  spec.seeds = {42};
  spec.phase_budget = 60;
  spec.gamma = 0.99999;
  std::ostringstream log;
  spec.out_dir = scratch("det-a").string();
  run_experiment(spec, log);
  const auto a = std::filesystem::path(spec.out_dir);
  spec.out_dir = scratch("det-b").string();
  spec.jobs = 2;
  run_experiment(spec, log);
  const auto b = std::filesystem::path(spec.out_dir);
  for (const char* f : {"summary.csv", "seed-42-phases.csv", "seed-42.snapshot"}) {
    CHECK_MESSAGE(read_file(a / f) == read_file(b / f), f);
    CHECK(!read_file(a / f).empty());
  }
}

TEST_CASE("parallel seeds give the same summary as sequential ones") {
  ExperimentSpec spec;
  spec.phase_weights = {{"policy-value", 1}, {"policy-refine", 1}};
  spec.seeds = {0, 1, 2, 3};
  spec.phase_budget = 30;
  std::ostringstream log;
  spec.out_dir = scratch("seq").string();
  run_experiment(spec, log);
  const auto seq = read_file(std::filesystem::path(spec.out_dir) / "summary.csv");
  spec.out_dir = scratch("par").string();
  spec.jobs = 3;
  run_experiment(spec, log);
  CHECK(read_file(std::filesystem::path(spec.out_dir) / "summary.csv") == seq);
}

TEST_CASE("output directory falls back to the environment") {
  ExperimentSpec spec;
  ::setenv("WVPLAN_OUT_DIR", "/tmp/from-env", 1);
  CHECK(resolved_out_dir(spec) == "/tmp/from-env");
  ::unsetenv("WVPLAN_OUT_DIR");
  CHECK(resolved_out_dir(spec) == "wvplan-out");
  spec.out_dir = "explicit";
  CHECK(resolved_out_dir(spec) == "explicit");
}

TEST_CASE("worldview cap errors propagate") {
  ExperimentSpec spec;
  spec.phase_weights = {{"policy-value", 1}, {"policy-refine", 1}};
  spec.max_worldview_size = 100;
  spec.out_dir = scratch("cap").string();
  std::ostringstream log;
  CHECK_THROWS_AS(run_experiment(spec, log), WorldviewCapError);
}
