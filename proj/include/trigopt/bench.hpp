// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Reproducible benchmark runs. A RunConfig names a scenario, a logic
// formulation, and a solver; run() builds the problem, solves it, and
// persists a self-contained results record (resolved parameters, regions,
// and the full solution vector are embedded) plus an append-only index
// line. Records reload with schema validation, rebuild their scenario for
// plot export, and render side-by-side comparison tables. Runs are
// deterministic: the same config reproduces the record byte for byte except
// for the measured runtime.

#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trigopt/scenarios.hpp"

namespace trigopt {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kRecordSchemaVersion = 1;

struct RunConfig {
  std::string scenario;      // ugv | pdg | docking
  std::string formulation;   // minlp | mpvc
  std::string solver;        // bnb | enumerate | homotopy
  std::string params_path;   // parameter JSON; empty uses built-in defaults
  std::string regions_path;  // region JSON; empty uses built-in defaults
  std::string out_dir = "runs";
  unsigned seed = 0;   // recorded for provenance; solves are deterministic
  bool trace = false;  // persist the solver trace next to the record
  // Numeric knobs keyed by name. Parameter keys depend on the scenario
  // (e.g. N, t_d or t_f, weights, tau_min); solver keys are node_limit,
  // max_outer, tol, and wall_limit_sec. Unknown keys are rejected.
  std::map<std::string, double> overrides;

  // Checks the name sets and the pairing rules: bnb and enumerate work on
  // the minlp formulation, homotopy on mpvc. Throws std::invalid_argument.
  void validate() const;
};

struct ResultsRecord {
  int schema_version = kRecordSchemaVersion;
  std::string tool_version = kToolVersion;
  std::string config_hash;  // digest of the resolved inputs
  std::string scenario, formulation, solver;
  unsigned seed = 0;
  std::map<std::string, double> overrides;
  std::string params_json;   // resolved parameter set, reloadable
  std::string regions_json;  // resolved regions; empty when the scenario has none
  std::string status;        // solver status string
  double objective = std::numeric_limits<double>::quiet_NaN();
  // Objective decomposition; the four parts sum to the objective.
  double effort = 0.0, indicator = 0.0, rate_penalty = 0.0, slack_penalty = 0.0;
  std::vector<double> final_state;
  double final_mass = std::numeric_limits<double>::quiet_NaN();  // NaN: no mass state
  double sum_delta = 0.0;
  std::vector<double> sum_delta_per_region;
  std::vector<std::string> region_names;
  double runtime_sec = 0.0;
  int solver_steps = 0;          // tree nodes or homotopy outer iterations
  std::vector<double> solution;  // full decision vector; empty when none found
  std::string record_path;       // set by run() and load_record(); not persisted
};

// Digest (16 hex digits, FNV-1a) of the resolved inputs: names, seed,
// overrides, and the serialized parameter and region sets.
std::string config_digest(const RunConfig& cfg, const std::string& params_json,
                          const std::string& regions_json);

// Validate the config, build the scenario, solve, and persist the record as
// <out_dir>/<scenario>_<formulation>_<solver>_<hash8>.json plus a line in
// <out_dir>/results_index.jsonl. Solver outcomes, including infeasible and
// failed runs, are recorded and returned; configuration and I/O problems
// throw. With cfg.trace the branch-and-bound node log or the homotopy trace
// is written next to the record, also for failed runs.
ResultsRecord run(const RunConfig& cfg);

// Reload a persisted record, checking the schema: required fields, known
// names and status, embedded inputs that parse and validate, and the
// objective decomposition identity.
ResultsRecord load_record(const std::string& path);

// Rebuild the scenario problem a record was produced from, using the
// embedded parameter and region sets.
ScenarioProblem rebuild_scenario(const ResultsRecord& rec);

// Write <out_dir>/<stem>_states.csv (one row per node, horizon + 1 rows)
// and <out_dir>/<stem>_controls.csv (one row per interval, horizon rows)
// for a solution on sp's grid. Columns are scenario specific: states and
// per-region indicator levels always; the lander additionally gets speed
// and thrust norms plus glide-slope and pointing angles in degrees.
void emit_plot_data(const ScenarioProblem& sp, const Eigen::VectorXd& x,
                    const std::string& out_dir, const std::string& stem);

// Side-by-side metric table for two or more records of the same scenario,
// with deltas against the first column. Throws std::invalid_argument on
// fewer than two records or on a scenario mismatch.
std::string render_comparison(const std::vector<ResultsRecord>& records);

// Process exit status a finished run maps to: 0 when the solver reports a
// solution (optimal_within_tree, feasible, converged), 2 when it certifies
// infeasibility (infeasible, never_succeeded), 3 when it gave up
// (node_limit, stalled, iter_cap).
int exit_code(const ResultsRecord& rec);

}  // namespace trigopt
