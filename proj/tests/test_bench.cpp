// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Benchmark driver audits. Config validation (name sets, solver pairing,
// override routing) is exercised against the documented rules; a shrunken
// monitoring tour is solved through every solver and its persisted record
// checked for self-containment, determinism modulo runtime, and tamper
// rejection on reload; plot export and the comparison table are verified
// against hand-counted shapes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "trigopt/bench.hpp"

using namespace trigopt;
using doctest::Approx;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string(TRIGOPT_BINARY_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(static_cast<bool>(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  REQUIRE(static_cast<bool>(f));
  f << text;
}

int count_lines(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(static_cast<bool>(f));
  int n = 0;
  std::string line;
  while (std::getline(f, line)) ++n;
  return n;
}

// A five-interval tour: ten seconds of driving toward (2, 0.2) through one
// rectangular patch. Small enough that branch-and-bound, exhaustive
// enumeration, and the homotopy all finish in seconds.
const char* kTinyParams = R"({
  "N": 5,
  "t_d": 2.0,
  "psi_max_deg": 5.0,
  "xN": [2.0, 0.2, 0.0, 0.15, 0.0]
})";

// The same tour with the goal pulled inside the minimum distance the speed
// floor forces (v >= 0.1 over 10 s travels at least ~1.05 m but the goal is
// 1.005 m away), so every formulation is infeasible.
const char* kStuckParams = R"({
  "N": 5,
  "t_d": 2.0,
  "psi_max_deg": 5.0,
  "xN": [1.0, 0.1, 0.0, 0.15, 0.0]
})";

// Eight intervals toward (4, 0.4) through a farther patch. The root
// relaxation of this one is fractional (exhausting its tree takes about a
// thousand nodes), which makes it the fixture for budget-capped runs.
const char* kMiniParams = R"({
  "N": 8,
  "t_d": 2.0,
  "psi_max_deg": 5.0,
  "xN": [4.0, 0.4, 0.0, 0.15, 0.0]
})";

const char* kMiniRegions = R"([
  {
    "name": "patch",
    "dim": 2,
    "A": [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
    "b": [-2.6, 1.4, -0.9, -0.3]
  }
])";

const char* kTinyRegions = R"([
  {
    "name": "patch",
    "dim": 2,
    "A": [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
    "b": [-1.4, 0.6, -0.5, -0.3]
  }
])";

RunConfig tiny_cfg(const std::string& formulation, const std::string& solver,
                   const std::string& out_dir) {
  static bool written = false;
  if (!written) {
    write_file(tmp_path("tiny_params.json"), kTinyParams);
    write_file(tmp_path("stuck_params.json"), kStuckParams);
    write_file(tmp_path("tiny_regions.json"), kTinyRegions);
    write_file(tmp_path("mini_params.json"), kMiniParams);
    write_file(tmp_path("mini_regions.json"), kMiniRegions);
    written = true;
  }
  RunConfig cfg;
  cfg.scenario = "ugv";
  cfg.formulation = formulation;
  cfg.solver = solver;
  cfg.params_path = tmp_path("tiny_params.json");
  cfg.regions_path = tmp_path("tiny_regions.json");
  cfg.out_dir = out_dir;
  return cfg;
}

nlohmann::json load_json(const std::string& path) {
  return nlohmann::json::parse(read_file(path));
}

}  // namespace

TEST_CASE("config validation enforces names and solver pairing") {
  RunConfig cfg;
  cfg.scenario = "ugv";
  cfg.formulation = "minlp";
  cfg.solver = "bnb";
  CHECK_NOTHROW(cfg.validate());
  cfg.solver = "enumerate";
  CHECK_NOTHROW(cfg.validate());
  cfg.formulation = "mpvc";
  cfg.solver = "homotopy";
  CHECK_NOTHROW(cfg.validate());

  RunConfig bad = cfg;
  bad.scenario = "rover";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.formulation = "milp";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.solver = "simplex";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // every incompatible formulation/solver pair
  for (const char* s : {"bnb", "enumerate"}) {
    bad = cfg;
    bad.formulation = "mpvc";
    bad.solver = s;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
  bad = cfg;
  bad.formulation = "minlp";
  bad.solver = "homotopy";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.out_dir = "";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.overrides["w"] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // exit status mapping by solver verdict
  ResultsRecord rec;
  for (const char* s : {"optimal_within_tree", "feasible", "converged"}) {
    rec.status = s;
    CHECK(exit_code(rec) == 0);
  }
  for (const char* s : {"infeasible", "never_succeeded"}) {
    rec.status = s;
    CHECK(exit_code(rec) == 2);
  }
  for (const char* s : {"node_limit", "stalled", "iter_cap"}) {
    rec.status = s;
    CHECK(exit_code(rec) == 3);
  }
}

TEST_CASE("a branch-and-bound run persists a self-contained record") {
  const std::string out = tmp_path("bench_bnb");
  std::filesystem::remove_all(out);
  RunConfig cfg = tiny_cfg("minlp", "bnb", out);
  ResultsRecord rec = run(cfg);

  CHECK(rec.status == "optimal_within_tree");
  CHECK(exit_code(rec) == 0);
  CHECK(rec.objective < -75.0);
  CHECK(std::abs(rec.objective - (rec.effort + rec.indicator + rec.rate_penalty +
                                  rec.slack_penalty)) <= 1e-6);
  // one region visited on two of the six nodes at the optimum
  CHECK(rec.sum_delta == Approx(2.0).epsilon(1e-9));
  REQUIRE(rec.sum_delta_per_region.size() == 1);
  CHECK(rec.region_names == std::vector<std::string>{"patch"});
  // the terminal state is pinned by the problem
  REQUIRE(rec.final_state.size() == 5);
  CHECK(rec.final_state[0] == Approx(2.0).epsilon(1e-9));
  CHECK(rec.final_state[3] == Approx(0.15).epsilon(1e-9));
  CHECK(std::isnan(rec.final_mass));  // no mass state in this model
  // 6 nodes x 5 states + 5 intervals x 2 controls + 6 indicators
  CHECK(rec.solution.size() == 46);
  CHECK(rec.config_hash.size() == 16);
  CHECK(rec.solver_steps > 0);
  CHECK(rec.record_path.find("ugv_minlp_bnb_") != std::string::npos);

  // reload reproduces the record bit for bit
  ResultsRecord back = load_record(rec.record_path);
  CHECK(back.status == rec.status);
  CHECK(back.objective == rec.objective);
  CHECK(back.config_hash == rec.config_hash);
  CHECK(back.solution == rec.solution);
  CHECK(back.sum_delta == rec.sum_delta);
  CHECK(back.runtime_sec == rec.runtime_sec);
  CHECK(back.params_json == rec.params_json);
  CHECK(back.regions_json == rec.regions_json);

  // the embedded parameters are the resolved ones, reloadable on their own
  UgvParams p = parse_ugv_params(rec.params_json);
  CHECK(p.N == 5);
  CHECK(p.xN[0] == 2.0);
}

TEST_CASE("identical configs reproduce records byte for byte modulo runtime") {
  const std::string out = tmp_path("bench_det");
  std::filesystem::remove_all(out);
  RunConfig cfg = tiny_cfg("mpvc", "homotopy", out);
  cfg.trace = true;

  ResultsRecord first = run(cfg);
  CHECK(first.status == "converged");
  const std::string text1 = read_file(first.record_path);
  const std::string trace_path =
      first.record_path.substr(0, first.record_path.size() - 5) + "_trace.txt";
  CHECK(count_lines(trace_path) > 1);

  ResultsRecord second = run(cfg);
  CHECK(second.record_path == first.record_path);  // deterministic file name
  const std::string text2 = read_file(first.record_path);

  nlohmann::json a = nlohmann::json::parse(text1);
  nlohmann::json b = nlohmann::json::parse(text2);
  CHECK(a["results"]["runtime_sec"] != nullptr);
  a["results"].erase("runtime_sec");
  b["results"].erase("runtime_sec");
  CHECK(a.dump() == b.dump());

  // the index is append-only: one line per run, same file
  CHECK(count_lines(out + "/results_index.jsonl") == 2);

  // both formulations agree on this tour to solver tolerance
  const std::string out2 = tmp_path("bench_enum");
  std::filesystem::remove_all(out2);
  ResultsRecord en = run(tiny_cfg("minlp", "enumerate", out2));
  CHECK(en.status == "optimal_within_tree");
  CHECK(en.objective == Approx(first.objective).epsilon(1e-3));
}

TEST_CASE("overrides reshape the resolved parameters and the digest") {
  const std::string out = tmp_path("bench_override");
  std::filesystem::remove_all(out);
  RunConfig cfg = tiny_cfg("minlp", "enumerate", out);
  cfg.overrides["w"] = -10.0;
  ResultsRecord rec = run(cfg);
  CHECK(rec.status == "optimal_within_tree");
  // two active indicators now earn 2 x 10 instead of 2 x 38
  CHECK(rec.indicator == Approx(-20.0).epsilon(1e-9));
  CHECK(parse_ugv_params(rec.params_json).w == -10.0);

  RunConfig plain = tiny_cfg("minlp", "enumerate", out);
  std::string pj, rj;
  pj = rec.params_json;
  rj = rec.regions_json;
  CHECK(config_digest(cfg, pj, rj) != config_digest(plain, pj, rj));
  CHECK(config_digest(cfg, pj, rj) == rec.config_hash);

  RunConfig bogus = tiny_cfg("minlp", "bnb", out);
  bogus.overrides["warp"] = 1.0;
  CHECK_THROWS_WITH_AS(run(bogus), doctest::Contains("warp"), std::invalid_argument);

  RunConfig wrong_solver_key = tiny_cfg("mpvc", "homotopy", out);
  wrong_solver_key.overrides["node_limit"] = 10.0;
  CHECK_THROWS_AS(run(wrong_solver_key), std::invalid_argument);
  wrong_solver_key = tiny_cfg("minlp", "bnb", out);
  wrong_solver_key.overrides["max_outer"] = 10.0;
  CHECK_THROWS_AS(run(wrong_solver_key), std::invalid_argument);
  wrong_solver_key.overrides.clear();
  wrong_solver_key.overrides["N"] = 5.5;  // grid sizes must be integers
  CHECK_THROWS_AS(run(wrong_solver_key), std::invalid_argument);
}

TEST_CASE("failed and capped runs keep honest statuses and empty solutions") {
  const std::string out = tmp_path("bench_fail");
  std::filesystem::remove_all(out);

  // budget of one node on a tour whose root relaxation is fractional: the
  // rounding heuristic may hand back an incumbent, but the verdict stays
  // capped because the tree is nowhere near exhausted
  RunConfig capped = tiny_cfg("minlp", "bnb", out);
  capped.params_path = tmp_path("mini_params.json");
  capped.regions_path = tmp_path("mini_regions.json");
  capped.overrides["node_limit"] = 1.0;
  ResultsRecord rec = run(capped);
  CHECK(rec.status == "node_limit");
  CHECK(exit_code(rec) == 3);
  CHECK(rec.solver_steps <= 1);
  ResultsRecord back = load_record(rec.record_path);
  CHECK(back.status == "node_limit");
  CHECK((back.objective == rec.objective ||
         (std::isnan(back.objective) && std::isnan(rec.objective))));

  // unreachable goal: the homotopy never accepts a point, and the record of
  // the failure reloads with its empty solution intact
  RunConfig stuck = tiny_cfg("mpvc", "homotopy", out);
  stuck.params_path = tmp_path("stuck_params.json");
  ResultsRecord sr = run(stuck);
  CHECK(sr.status != "converged");
  CHECK(exit_code(sr) != 0);
  CHECK(sr.solution.empty());
  CHECK(std::isnan(sr.objective));
  ResultsRecord sback = load_record(sr.record_path);
  CHECK(sback.solution.empty());
  CHECK(std::isnan(sback.objective));
  CHECK(sback.final_state.empty());
}

TEST_CASE("reload rejects tampered or unsupported records") {
  const std::string out = tmp_path("bench_tamper");
  std::filesystem::remove_all(out);
  ResultsRecord rec = run(tiny_cfg("mpvc", "homotopy", out));
  nlohmann::json good = load_json(rec.record_path);

  auto expect_reject = [&out](const nlohmann::json& j, const char* name) {
    const std::string path = out + "/" + name + ".json";
    write_file(path, j.dump(2));
    CHECK_THROWS_AS(load_record(path), std::runtime_error);
  };

  nlohmann::json j = good;
  j["schema_version"] = 2;
  expect_reject(j, "future_schema");

  j = good;
  j["results"]["decomposition"]["effort"] = j["results"]["decomposition"]["effort"].get<double>() + 1.0;
  expect_reject(j, "broken_decomposition");

  j = good;
  j["results"]["status"] = "excellent";
  expect_reject(j, "unknown_status");

  j = good;
  j["config"]["solver"] = "bnb";  // mpvc + bnb can never have produced this
  expect_reject(j, "impossible_pair");

  j = good;
  j["inputs"]["params"]["v_min"] = 0.9;  // fails the parameter validator
  expect_reject(j, "invalid_params");

  j = good;
  j.erase("solution");
  expect_reject(j, "missing_solution");

  write_file(out + "/truncated.json", read_file(rec.record_path).substr(0, 100));
  CHECK_THROWS_AS(load_record(out + "/truncated.json"), std::runtime_error);
  CHECK_THROWS_AS(load_record(out + "/never_written.json"), std::runtime_error);
}

TEST_CASE("plot export and comparison tables match the documented shapes") {
  const std::string out = tmp_path("bench_plot");
  std::filesystem::remove_all(out);
  ResultsRecord ugv = run(tiny_cfg("mpvc", "homotopy", out));
  ResultsRecord reloaded = load_record(ugv.record_path);

  ScenarioProblem sp = rebuild_scenario(reloaded);
  CHECK(sp.nlp.n == static_cast<int>(reloaded.solution.size()));
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
      reloaded.solution.data(), static_cast<Eigen::Index>(reloaded.solution.size()));
  emit_plot_data(sp, x, out, "tour");
  const std::string states = read_file(out + "/tour_states.csv");
  const std::string controls = read_file(out + "/tour_controls.csv");
  CHECK(states.substr(0, states.find('\n')) == "node,t,px,py,theta,v,phi,delta_patch");
  CHECK(count_lines(out + "/tour_states.csv") == 7);    // header + N + 1 nodes
  CHECK(count_lines(out + "/tour_controls.csv") == 6);  // header + N intervals
  CHECK(controls.substr(0, controls.find('\n')) == "node,t,a,psi");

  // a complementarity-form record of another scenario for the mismatch check
  RunConfig dock;
  dock.scenario = "docking";
  dock.formulation = "mpvc";
  dock.solver = "homotopy";
  dock.out_dir = out;
  ResultsRecord dk = run(dock);
  CHECK(dk.status == "converged");
  CHECK(std::isnan(dk.final_mass));
  CHECK(dk.sum_delta == 0.0);  // this form carries no indicator variables
  ScenarioProblem dsp = rebuild_scenario(dk);
  Eigen::VectorXd dx = Eigen::Map<const Eigen::VectorXd>(
      dk.solution.data(), static_cast<Eigen::Index>(dk.solution.size()));
  emit_plot_data(dsp, dx, out, "dock");
  const std::string dstates = read_file(out + "/dock_states.csv");
  CHECK(dstates.substr(0, dstates.find('\n')) ==
        "node,t,px,py,pz,vx,vy,vz,y_speed_funnel,y_approach_cone");

  const std::string table = render_comparison({ugv, ugv});
  CHECK(table.find("scenario: ugv") != std::string::npos);
  CHECK(table.find("mpvc/homotopy") != std::string::npos);
  CHECK(table.find("converged") != std::string::npos);
  // identical records compare with zero deltas
  std::istringstream ss(table);
  std::string line;
  bool saw_delta_row = false;
  while (std::getline(ss, line)) {
    if (line.rfind("d_objective", 0) == 0) {
      saw_delta_row = true;
      CHECK(line.find(" 0 ") != std::string::npos);
    }
  }
  CHECK(saw_delta_row);

  CHECK_THROWS_AS(render_comparison({ugv}), std::invalid_argument);
  CHECK_THROWS_AS(render_comparison({ugv, dk}), std::invalid_argument);
}
