// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

#include "json.hpp"
#include "trigopt/bnb.hpp"
#include "trigopt/mpvc.hpp"

namespace trigopt {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

std::string num17(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char b[17];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

// Write-then-rename so readers never observe a half-written file.
void atomic_write(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

double null_or_num(const json& j, double fallback) {
  return j.is_null() ? fallback : j.get<double>();
}

int as_int(const std::string& key, double v) {
  double r = std::round(v);
  if (!(std::abs(v - r) < 1e-9))
    throw std::invalid_argument("override '" + key + "' must be an integer");
  return static_cast<int>(r);
}

// Pops known keys from the override map into the parameter struct; anything
// the scenario does not understand stays behind and is reported by run().
void apply_overrides(UgvParams& p, std::map<std::string, double>& ov) {
  auto take = [&ov](const char* k) -> std::optional<double> {
    auto it = ov.find(k);
    if (it == ov.end()) return std::nullopt;
    double v = it->second;
    ov.erase(it);
    return v;
  };
  if (auto v = take("N")) p.N = as_int("N", *v);
  if (auto v = take("t_d")) p.t_d = *v;
  if (auto v = take("w")) p.w = *v;
  if (auto v = take("M")) p.M = *v;
  if (auto v = take("tau_min")) p.tau_min = *v;
  if (auto v = take("substeps")) p.substeps = as_int("substeps", *v);
}

void apply_overrides(LanderParams& p, std::map<std::string, double>& ov) {
  auto take = [&ov](const char* k) -> std::optional<double> {
    auto it = ov.find(k);
    if (it == ov.end()) return std::nullopt;
    double v = it->second;
    ov.erase(it);
    return v;
  };
  if (auto v = take("N")) p.N = as_int("N", *v);
  if (auto v = take("t_f")) p.t_f = *v;
  if (auto v = take("w0")) p.w0 = *v;
  if (auto v = take("w1")) p.w1 = *v;
  if (auto v = take("w2")) p.w2 = *v;
  if (auto v = take("tau_min")) p.tau_min = *v;
  if (auto v = take("literal_thrust_box")) p.literal_thrust_box = *v != 0.0;
}

void apply_overrides(DockingParams& p, std::map<std::string, double>& ov) {
  auto take = [&ov](const char* k) -> std::optional<double> {
    auto it = ov.find(k);
    if (it == ov.end()) return std::nullopt;
    double v = it->second;
    ov.erase(it);
    return v;
  };
  if (auto v = take("N")) p.N = as_int("N", *v);
  if (auto v = take("t_f")) p.t_f = *v;
  if (auto v = take("tau_min")) p.tau_min = *v;
  if (auto v = take("alpha")) p.alpha = *v;
  if (auto v = take("eps")) p.eps = *v;
  if (auto v = take("big_m")) p.big_m = *v;
  if (auto v = take("lower_m")) p.lower_m = *v;
  if (auto v = take("u_max")) p.u_max = *v;
}

ScenarioProblem build_scenario(const RunConfig& cfg, std::map<std::string, double>& ov,
                               std::string& params_json, std::string& regions_json) {
  const LogicMode mode = cfg.formulation == "mpvc" ? LogicMode::mpvc : LogicMode::minlp;
  if (cfg.scenario == "ugv") {
    UgvParams p = cfg.params_path.empty() ? UgvParams{} : load_ugv_params(cfg.params_path);
    apply_overrides(p, ov);
    p.validate();
    auto regions =
        cfg.regions_path.empty() ? ugv_default_regions() : load_polytopes(cfg.regions_path);
    params_json = serialize_params(p);
    regions_json = serialize_polytopes(regions);
    return build_ugv_ocp(p, regions, mode);
  }
  if (cfg.scenario == "pdg") {
    LanderParams p = cfg.params_path.empty() ? LanderParams{} : load_lander_params(cfg.params_path);
    apply_overrides(p, ov);
    p.validate();
    auto regions =
        cfg.regions_path.empty() ? pdg_default_regions() : load_polytopes(cfg.regions_path);
    params_json = serialize_params(p);
    regions_json = serialize_polytopes(regions);
    return build_pdg_ocp(p, regions, mode);
  }
  if (!cfg.regions_path.empty())
    throw std::invalid_argument("the docking scenario takes no region file");
  DockingParams p = cfg.params_path.empty() ? DockingParams{} : load_docking_params(cfg.params_path);
  apply_overrides(p, ov);
  p.validate();
  params_json = serialize_params(p);
  regions_json.clear();
  return build_docking_ocp(p, mode);
}

const std::initializer_list<const char*> kKnownStatuses = {
    "optimal_within_tree", "feasible", "infeasible",       "node_limit",
    "converged",           "stalled",  "never_succeeded",  "iter_cap"};

bool known_status(const std::string& s) {
  for (const char* k : kKnownStatuses)
    if (s == k) return true;
  return false;
}

json record_to_json(const ResultsRecord& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["tool_version"] = r.tool_version;
  j["config_hash"] = r.config_hash;
  json cfg;
  cfg["scenario"] = r.scenario;
  cfg["formulation"] = r.formulation;
  cfg["solver"] = r.solver;
  cfg["seed"] = r.seed;
  cfg["overrides"] = json(r.overrides);
  j["config"] = std::move(cfg);
  json in;
  in["params"] = json::parse(r.params_json);
  in["regions"] = r.regions_json.empty() ? json() : json::parse(r.regions_json);
  j["inputs"] = std::move(in);
  json res;
  res["status"] = r.status;
  res["objective"] = num_or_null(r.objective);
  res["decomposition"] = {{"effort", r.effort},
                          {"indicator", r.indicator},
                          {"rate_penalty", r.rate_penalty},
                          {"slack_penalty", r.slack_penalty}};
  res["final_state"] = r.final_state;
  res["final_mass"] = num_or_null(r.final_mass);
  res["sum_delta"] = r.sum_delta;
  res["region_names"] = r.region_names;
  res["sum_delta_per_region"] = r.sum_delta_per_region;
  res["runtime_sec"] = r.runtime_sec;
  res["solver_steps"] = r.solver_steps;
  j["results"] = std::move(res);
  j["solution"] = r.solution;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  auto one_of = [](const std::string& v, std::initializer_list<const char*> set) {
    for (const char* s : set)
      if (v == s) return true;
    return false;
  };
  if (!one_of(scenario, {"ugv", "pdg", "docking"}))
    throw std::invalid_argument("unknown scenario '" + scenario +
                                "' (expected ugv, pdg, or docking)");
  if (!one_of(formulation, {"minlp", "mpvc"}))
    throw std::invalid_argument("unknown formulation '" + formulation +
                                "' (expected minlp or mpvc)");
  if (!one_of(solver, {"bnb", "enumerate", "homotopy"}))
    throw std::invalid_argument("unknown solver '" + solver +
                                "' (expected bnb, enumerate, or homotopy)");
  const bool needs_mpvc = solver == "homotopy";
  if (needs_mpvc != (formulation == "mpvc"))
    throw std::invalid_argument("solver '" + solver + "' pairs with the " +
                                (needs_mpvc ? "mpvc" : "minlp") + " formulation, not '" +
                                formulation + "'");
  if (out_dir.empty()) throw std::invalid_argument("output directory must not be empty");
  for (const auto& [k, v] : overrides)
    if (!std::isfinite(v)) throw std::invalid_argument("override '" + k + "' is not finite");
}

std::string config_digest(const RunConfig& cfg, const std::string& params_json,
                          const std::string& regions_json) {
  std::string s = cfg.scenario + '\n' + cfg.formulation + '\n' + cfg.solver + '\n' +
                  std::to_string(cfg.seed) + '\n';
  for (const auto& [k, v] : cfg.overrides) s += k + '=' + num17(v) + '\n';
  s += params_json + '\n' + regions_json;
  return fnv1a_hex(s);
}

ResultsRecord run(const RunConfig& cfg) {
  cfg.validate();
  std::map<std::string, double> leftover = cfg.overrides;
  auto take = [&leftover](const char* k) -> std::optional<double> {
    auto it = leftover.find(k);
    if (it == leftover.end()) return std::nullopt;
    double v = it->second;
    leftover.erase(it);
    return v;
  };
  auto tol = take("tol");
  auto wall = take("wall_limit_sec");
  auto node_limit = take("node_limit");
  auto max_outer = take("max_outer");
  const bool homotopy = cfg.solver == "homotopy";
  if (node_limit && homotopy)
    throw std::invalid_argument("override 'node_limit' does not apply to solver 'homotopy'");
  if (max_outer && !homotopy)
    throw std::invalid_argument("override 'max_outer' does not apply to solver '" + cfg.solver +
                                "'");

  ResultsRecord rec;
  rec.scenario = cfg.scenario;
  rec.formulation = cfg.formulation;
  rec.solver = cfg.solver;
  rec.seed = cfg.seed;
  rec.overrides = cfg.overrides;

  ScenarioProblem sp = build_scenario(cfg, leftover, rec.params_json, rec.regions_json);
  if (!leftover.empty())
    throw std::invalid_argument("unknown override '" + leftover.begin()->first +
                                "' for scenario '" + cfg.scenario + "'");
  rec.config_hash = config_digest(cfg, rec.params_json, rec.regions_json);
  rec.region_names = sp.region_names;

  fs::create_directories(cfg.out_dir);
  const std::string stem =
      cfg.scenario + "_" + cfg.formulation + "_" + cfg.solver + "_" + rec.config_hash.substr(0, 8);
  const fs::path out_dir(cfg.out_dir);

  Eigen::VectorXd guess = sp.initial_guess;
  Eigen::VectorXd x;
  const auto t0 = std::chrono::steady_clock::now();
  if (homotopy) {
    HomotopyParams hp;
    hp.tau_min = sp.tau_min;
    hp.indicators = sp.delta_ids;
    if (max_outer) hp.max_outer = as_int("max_outer", *max_outer);
    if (tol) {
      hp.nlp.tol = *tol;
      hp.nlp.constr_tol = *tol;
    }
    if (wall) hp.nlp.wall_limit_sec = *wall;
    HomotopyResult hr = solve_homotopy(sp.nlp, hp, &guess);
    rec.status = to_string(hr.status);
    rec.solver_steps = hr.outer_iterations;
    if (hr.solution.x.size() > 0) {
      x = hr.solution.x;
      rec.objective = hr.solution.objective;
    }
    if (cfg.trace) atomic_write(out_dir / (stem + "_trace.txt"), format_trace(hr.trace));
  } else {
    BnbOptions bo;
    if (node_limit) bo.node_limit = as_int("node_limit", *node_limit);
    if (tol) {
      bo.nlp.tol = *tol;
      bo.nlp.constr_tol = *tol;
      bo.feas_tol = *tol;
    }
    if (wall) bo.wall_limit_sec = *wall;
    if (cfg.trace) bo.node_log_path = (out_dir / (stem + "_nodes.jsonl")).string();
    MinlpSolution ms = cfg.solver == "bnb" ? solve_bnb(sp.nlp, bo, &guess)
                                           : enumerate_exhaustive(sp.nlp, bo, 16, &guess);
    rec.status = to_string(ms.status);
    rec.solver_steps = ms.node_count;
    if (ms.x.size() > 0 && std::isfinite(ms.objective)) {
      x = ms.x;
      rec.objective = ms.objective;
    }
  }
  rec.runtime_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (x.size() == static_cast<Eigen::Index>(sp.nlp.n)) {
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    auto term = [&xs](const Expr& e) { return e.valid() ? eval(e, xs) : 0.0; };
    rec.effort = term(sp.effort_term);
    rec.indicator = term(sp.indicator_term);
    rec.rate_penalty = term(sp.rate_term);
    rec.slack_penalty = term(sp.slack_term);
    rec.final_state.resize(static_cast<std::size_t>(sp.nx));
    for (int i = 0; i < sp.nx; ++i)
      rec.final_state[static_cast<std::size_t>(i)] = x[sp.state_index(sp.horizon, i)];
    if (cfg.scenario == "pdg") rec.final_mass = x[sp.state_index(sp.horizon, 6)];
    if (!sp.delta_ids.empty()) {
      rec.sum_delta_per_region.assign(static_cast<std::size_t>(sp.num_regions), 0.0);
      for (int k = 0; k <= sp.horizon; ++k)
        for (int i = 0; i < sp.num_regions; ++i)
          rec.sum_delta_per_region[static_cast<std::size_t>(i)] += x[sp.delta_index(k, i)];
      for (double s : rec.sum_delta_per_region) rec.sum_delta += s;
    }
    rec.solution.assign(x.data(), x.data() + x.size());
  }

  const fs::path record_path = out_dir / (stem + ".json");
  atomic_write(record_path, record_to_json(rec).dump(2) + "\n");
  json line;
  line["file"] = stem + ".json";
  line["config_hash"] = rec.config_hash;
  line["scenario"] = rec.scenario;
  line["formulation"] = rec.formulation;
  line["solver"] = rec.solver;
  line["status"] = rec.status;
  line["objective"] = num_or_null(rec.objective);
  {
    std::ofstream idx(out_dir / "results_index.jsonl", std::ios::app);
    if (!idx) throw std::runtime_error("cannot append to the results index");
    idx << line.dump() << '\n';
  }
  rec.record_path = record_path.string();
  return rec;
}

ResultsRecord load_record(const std::string& path) {
  auto fail = [&path](const std::string& m) -> void {
    throw std::runtime_error(path + ": " + m);
  };
  std::ifstream f(path);
  if (!f) fail("cannot open");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    fail(e.what());
  }
  ResultsRecord r;
  try {
    if (!j.is_object()) fail("expected a record object");
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kRecordSchemaVersion)
      fail("unsupported schema version " + std::to_string(r.schema_version));
    r.tool_version = j.at("tool_version").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    const json& cfg = j.at("config");
    r.scenario = cfg.at("scenario").get<std::string>();
    r.formulation = cfg.at("formulation").get<std::string>();
    r.solver = cfg.at("solver").get<std::string>();
    r.seed = cfg.at("seed").get<unsigned>();
    for (const auto& [k, v] : cfg.at("overrides").items()) r.overrides[k] = v.get<double>();
    const json& in = j.at("inputs");
    r.params_json = in.at("params").dump(2);
    r.regions_json = in.at("regions").is_null() ? std::string() : in.at("regions").dump(2);
    const json& res = j.at("results");
    r.status = res.at("status").get<std::string>();
    r.objective = null_or_num(res.at("objective"), std::numeric_limits<double>::quiet_NaN());
    const json& dec = res.at("decomposition");
    r.effort = dec.at("effort").get<double>();
    r.indicator = dec.at("indicator").get<double>();
    r.rate_penalty = dec.at("rate_penalty").get<double>();
    r.slack_penalty = dec.at("slack_penalty").get<double>();
    r.final_state = res.at("final_state").get<std::vector<double>>();
    r.final_mass = null_or_num(res.at("final_mass"), std::numeric_limits<double>::quiet_NaN());
    r.sum_delta = res.at("sum_delta").get<double>();
    r.region_names = res.at("region_names").get<std::vector<std::string>>();
    r.sum_delta_per_region = res.at("sum_delta_per_region").get<std::vector<double>>();
    r.runtime_sec = res.at("runtime_sec").get<double>();
    r.solver_steps = res.at("solver_steps").get<int>();
    r.solution = j.at("solution").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(e.what());
  }

  // Semantic checks beyond shape.
  try {
    RunConfig names;
    names.scenario = r.scenario;
    names.formulation = r.formulation;
    names.solver = r.solver;
    names.validate();
    if (r.scenario == "ugv")
      parse_ugv_params(r.params_json);
    else if (r.scenario == "pdg")
      parse_lander_params(r.params_json);
    else
      parse_docking_params(r.params_json);
    if (!r.regions_json.empty()) parse_polytopes(r.regions_json);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  if (!known_status(r.status)) fail("unknown solver status '" + r.status + "'");
  if (r.region_names.size() != r.sum_delta_per_region.size() && !r.sum_delta_per_region.empty())
    fail("per-region sums do not line up with the region names");
  if (std::isfinite(r.objective)) {
    const double parts = r.effort + r.indicator + r.rate_penalty + r.slack_penalty;
    if (std::abs(r.objective - parts) > 1e-6 * std::max(1.0, std::abs(r.objective)))
      fail("objective decomposition does not sum to the objective");
  }
  r.record_path = path;
  return r;
}

ScenarioProblem rebuild_scenario(const ResultsRecord& rec) {
  const LogicMode mode = rec.formulation == "mpvc" ? LogicMode::mpvc : LogicMode::minlp;
  if (rec.scenario == "ugv")
    return build_ugv_ocp(parse_ugv_params(rec.params_json), parse_polytopes(rec.regions_json),
                         mode);
  if (rec.scenario == "pdg")
    return build_pdg_ocp(parse_lander_params(rec.params_json), parse_polytopes(rec.regions_json),
                         mode);
  if (rec.scenario == "docking")
    return build_docking_ocp(parse_docking_params(rec.params_json), mode);
  throw std::invalid_argument("unknown scenario '" + rec.scenario + "'");
}

void emit_plot_data(const ScenarioProblem& sp, const Eigen::VectorXd& x,
                    const std::string& out_dir, const std::string& stem) {
  if (x.size() != static_cast<Eigen::Index>(sp.nlp.n))
    throw std::invalid_argument("solution length does not match the problem");
  std::vector<std::string> state_names, control_names;
  if (sp.scenario == "ugv") {
    state_names = {"px", "py", "theta", "v", "phi"};
    control_names = {"a", "psi"};
  } else if (sp.scenario == "pdg") {
    state_names = {"rx", "ry", "rz", "vx", "vy", "vz", "m", "ux", "uy", "uz"};
    control_names = {"dux", "duy", "duz"};
  } else if (sp.scenario == "docking") {
    state_names = {"px", "py", "pz", "vx", "vy", "vz"};
    control_names = {"ax", "ay", "az"};
  } else {
    throw std::invalid_argument("unknown scenario '" + sp.scenario + "'");
  }
  const bool pdg = sp.scenario == "pdg";
  const char* level_prefix = sp.delta_ids.empty() && !sp.aux_ids.empty() ? "y_" : "delta_";
  const std::vector<int>& levels = sp.delta_ids.empty() ? sp.aux_ids : sp.delta_ids;
  const int R = levels.empty() ? 0 : sp.num_regions;

  auto angle_deg = [](double axis, double norm) {
    if (norm < 1e-9) return 0.0;
    double c = std::clamp(axis / norm, -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
  };

  std::string states = "node,t";
  for (const auto& n : state_names) states += "," + n;
  if (pdg) states += ",vnorm,unorm,glide_deg,point_deg";
  for (int i = 0; i < R; ++i) states += "," + std::string(level_prefix) + sp.region_names[static_cast<std::size_t>(i)];
  states += "\n";
  for (int k = 0; k <= sp.horizon; ++k) {
    states += std::to_string(k) + "," + num17(k * sp.dt);
    for (int i = 0; i < sp.nx; ++i) states += "," + num17(x[sp.state_index(k, i)]);
    if (pdg) {
      auto s = [&](int i) { return x[sp.state_index(k, i)]; };
      const double rnorm = std::sqrt(s(0) * s(0) + s(1) * s(1) + s(2) * s(2));
      const double vnorm = std::sqrt(s(3) * s(3) + s(4) * s(4) + s(5) * s(5));
      const double unorm = std::sqrt(s(7) * s(7) + s(8) * s(8) + s(9) * s(9));
      states += "," + num17(vnorm) + "," + num17(unorm) + "," + num17(angle_deg(s(2), rnorm)) +
                "," + num17(angle_deg(s(9), unorm));
    }
    for (int i = 0; i < R; ++i)
      states += "," + num17(x[levels[static_cast<std::size_t>(k * sp.num_regions + i)]]);
    states += "\n";
  }

  std::string controls = "node,t";
  for (const auto& n : control_names) controls += "," + n;
  controls += "\n";
  for (int k = 0; k < sp.horizon; ++k) {
    controls += std::to_string(k) + "," + num17(k * sp.dt);
    for (int i = 0; i < sp.nu; ++i) controls += "," + num17(x[sp.control_index(k, i)]);
    controls += "\n";
  }

  fs::create_directories(out_dir);
  atomic_write(fs::path(out_dir) / (stem + "_states.csv"), states);
  atomic_write(fs::path(out_dir) / (stem + "_controls.csv"), controls);
}

std::string render_comparison(const std::vector<ResultsRecord>& records) {
  if (records.size() < 2)
    throw std::invalid_argument("comparison needs at least two records");
  for (const auto& r : records)
    if (r.scenario != records.front().scenario)
      throw std::invalid_argument("records mix scenarios: '" + records.front().scenario +
                                  "' vs '" + r.scenario + "'");

  auto fmt = [](double v) -> std::string {
    if (!std::isfinite(v)) return "-";
    char b[32];
    std::snprintf(b, sizeof b, "%.9g", v);
    return b;
  };
  std::vector<std::string> labels;
  for (const auto& r : records) labels.push_back(r.formulation + "/" + r.solver);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int dup = 0;
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (k != i && labels[k] == labels[i]) dup = 1;
    if (dup) labels[i] += "#" + std::to_string(i + 1);
  }

  const ResultsRecord& first = records.front();
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  auto add_row = [&rows, &records](const std::string& name, auto cell) {
    std::vector<std::string> cells;
    for (const auto& r : records) cells.push_back(cell(r));
    rows.emplace_back(name, std::move(cells));
  };
  add_row("status", [](const ResultsRecord& r) { return r.status; });
  add_row("objective", [&fmt](const ResultsRecord& r) { return fmt(r.objective); });
  add_row("d_objective", [&](const ResultsRecord& r) {
    return std::isfinite(r.objective) && std::isfinite(first.objective)
               ? fmt(r.objective - first.objective)
               : std::string("-");
  });
  add_row("effort", [&fmt](const ResultsRecord& r) { return fmt(r.effort); });
  add_row("indicator", [&fmt](const ResultsRecord& r) { return fmt(r.indicator); });
  add_row("rate_penalty", [&fmt](const ResultsRecord& r) { return fmt(r.rate_penalty); });
  add_row("slack_penalty", [&fmt](const ResultsRecord& r) { return fmt(r.slack_penalty); });
  add_row("sum_delta", [&fmt](const ResultsRecord& r) { return fmt(r.sum_delta); });
  add_row("d_sum_delta",
          [&](const ResultsRecord& r) { return fmt(r.sum_delta - first.sum_delta); });
  add_row("final_mass", [&fmt](const ResultsRecord& r) { return fmt(r.final_mass); });
  add_row("runtime_sec", [&fmt](const ResultsRecord& r) { return fmt(r.runtime_sec); });
  add_row("solver_steps",
          [](const ResultsRecord& r) { return std::to_string(r.solver_steps); });

  std::size_t name_w = std::string("metric").size();
  for (const auto& [name, cells] : rows) name_w = std::max(name_w, name.size());
  std::vector<std::size_t> col_w(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    col_w[i] = labels[i].size();
    for (const auto& [name, cells] : rows) col_w[i] = std::max(col_w[i], cells[i].size());
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::string out = "scenario: " + first.scenario + "\n";
  out += pad("metric", name_w);
  for (std::size_t i = 0; i < labels.size(); ++i) out += "  " + pad(labels[i], col_w[i]);
  out += "\n";
  for (const auto& [name, cells] : rows) {
    out += pad(name, name_w);
    for (std::size_t i = 0; i < cells.size(); ++i) out += "  " + pad(cells[i], col_w[i]);
    out += "\n";
  }
  return out;
}

int exit_code(const ResultsRecord& rec) {
  const std::string& s = rec.status;
  if (s == "optimal_within_tree" || s == "feasible" || s == "converged") return 0;
  if (s == "infeasible" || s == "never_succeeded") return 2;
  return 3;
}

}  // namespace trigopt
