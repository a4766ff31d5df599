// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Concrete models and OCP builders: a ground-vehicle monitoring tour where
// rectangular target regions must each be visited at least once, Mars
// powered-descent guidance rewarded for staying inside divert-feasible
// polytopes, and a rendezvous demo whose speed and line-of-sight limits
// switch on inside a docking radius. Each builder emits the same smooth
// problem in two logic encodings: binary indicators with big-M rows (minlp)
// or boxed indicators with relaxable vanishing products (mpvc).

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "trigopt/logic.hpp"
#include "trigopt/ocp.hpp"

namespace trigopt {

// Half-space region. Membership is A xi + b <= 0 componentwise.
struct Polytope {
  std::string name;
  int dim = 0;
  Eigen::MatrixXd A;  // rows x dim
  Eigen::VectorXd b;

  void validate() const;  // throws std::invalid_argument
  bool contains(const Eigen::VectorXd& xi, double tol = 0.0) const;
};

// JSON array of {name, dim, A (array of rows), b} objects. Values
// round-trip bit exactly. Parsing validates every polytope. The load/save
// pair reads and writes files; the parse/serialize pair works on text.
std::vector<Polytope> load_polytopes(const std::string& path);
void save_polytopes(const std::string& path, const std::vector<Polytope>& regions);
std::vector<Polytope> parse_polytopes(const std::string& json_text);
std::string serialize_polytopes(const std::vector<Polytope>& regions);

// Inverted-pyramid position regions: rows (+-cos b, 0, -sin b) and
// (0, +-cos b, -sin b) with offset d - C c folded into b.
std::vector<Polytope> pyramid_regions(double beta_rad,
                                      const std::vector<Eigen::Vector3d>& centers,
                                      const Eigen::Vector4d& d);

struct UgvParams {
  double L = 0.1;              // wheelbase, m
  double a_max = 0.05;         // m/s^2
  double psi_max_deg = 0.5;    // steering rate, deg/s
  double theta_max_deg = 175.0;
  double v_min = 0.1, v_max = 0.8;  // m/s
  double phi_max_deg = 5.0;    // steering angle
  double t_d = 3.8;            // s, so t_f = N t_d = 76 s
  int N = 20;
  Eigen::VectorXd x0 = (Eigen::VectorXd(5) << 0, 0, 0, 0.15, 0).finished();
  Eigen::VectorXd xN = (Eigen::VectorXd(5) << 10, 10, 0, 0.15, 0).finished();
  double w = -38.0;   // per-indicator cost weight (negative: activation pays)
  double M = 12.0;    // big-M for the rectangle rows
  double tau_min = 1e-4;
  // Position box; not part of the published constraint set but required for
  // M to be a certified upper bound of the region rows.
  double pos_lo = -1.0, pos_hi = 11.0;
  int substeps = 4;  // integrator sub-steps per shooting interval

  void validate() const;
};
UgvParams load_ugv_params(const std::string& path);
UgvParams parse_ugv_params(const std::string& json_text);
std::string serialize_params(const UgvParams& p);

struct LanderParams {
  double gamma_gs_deg = 86.0;  // glide-slope cone
  double gamma_p_deg = 40.0;   // pointing cone
  Eigen::Vector3d omega = Eigen::Vector3d(3.5e-3, 0.0, 2.0e-3);  // 1/s
  double g_mars = -3.71;       // signed, enters as g_mars * e_z
  double g_earth = 9.807;
  double I_sp = 225.0;         // s
  double rho_lb = 4971.0, rho_ub = 13258.0;  // thrust magnitude bounds, N
  double m_wet = 1905.0, m_dry = 1505.0;     // kg
  Eigen::Vector3d r0 = Eigen::Vector3d(2000.0, 0.0, 1500.0);  // m
  // Stored in km/h as published; the exact conversions happen in v0()/v_max().
  Eigen::Vector3d v0_kmh = Eigen::Vector3d(288.0, 108.0, -270.0);
  double v_max_kmh = 500.0;
  int N = 50;
  double t_f = 75.0;
  double w0 = 1e-3, w1 = 1e3, w2 = 1e-3;  // mass, indicator, thrust-rate weights
  double tau_min = 1e-3;
  Eigen::Vector3d slack_r_lo = Eigen::Vector3d(-5.0, -5.0, 0.0);
  Eigen::Vector3d slack_r_hi = Eigen::Vector3d(5.0, 5.0, 5.0);
  double slack_v_abs = 0.01;
  // Documented state boxes; they become bounds and feed the per-region M_i
  // interval computation.
  double pos_xy_abs = 3000.0, pos_z_hi = 3000.0;
  // Componentwise thrust-box reading: false keeps -rho_ub <= u <= rho_ub per
  // axis (the norm rows carry rho_lb); true applies the literal
  // rho_lb <= u <= rho_ub per axis, which forbids retrograde thrust.
  bool literal_thrust_box = false;

  Eigen::Vector3d v0() const { return v0_kmh / 3.6; }
  double v_max() const { return v_max_kmh / 3.6; }
  void validate() const;
};
LanderParams load_lander_params(const std::string& path);
LanderParams parse_lander_params(const std::string& json_text);
std::string serialize_params(const LanderParams& p);

struct DockingParams {
  double radius = 2.0;          // trigger sphere around the port, m
  double alpha = 0.25;          // speed funnel slope, 1/s
  double theta_max_deg = 20.0;  // approach-cone half angle
  Eigen::Vector3d e_f = Eigen::Vector3d(-1.0, 0.0, 0.0);  // unit cone axis
  Eigen::Vector3d p_f = Eigen::Vector3d::Zero();          // port position
  Eigen::Vector3d p_start = Eigen::Vector3d(-8.0, 3.0, 0.0);
  Eigen::Vector3d v_start = Eigen::Vector3d(0.2, 0.0, 0.0);
  double standoff = 0.5;  // terminal hold point distance along e_f
  double u_max = 0.2;     // per-axis acceleration bound
  int N = 12;
  double t_f = 24.0;
  double eps = 1e-3;      // strict-activation margin (minlp form)
  double big_m = 80.0, lower_m = 40.0;
  double pos_box = 20.0, v_box = 1.0;
  // Homotopy stop line for the complementarity form. Looser than the boxed
  // indicator scenarios: interior-point iterations grind once the
  // complementarity residual drops much further.
  double tau_min = 0.05;

  void validate() const;
};
DockingParams load_docking_params(const std::string& path);
DockingParams parse_docking_params(const std::string& json_text);
std::string serialize_params(const DockingParams& p);

// Single-track kinematic model, x = (px, py, theta, v, phi), u = (a, psi).
// tan(phi) raises a domain error at the +-90 deg pole.
DynamicsFn ugv_dynamics(double L);

// Variable-mass double integrator in the rotating frame, x = (r, v, m),
// u = thrust. The mass-flow term contains the thrust norm, so derivatives
// raise a domain error when the thrust vanishes (the value itself is fine).
DynamicsFn lander_dynamics(const LanderParams& params);

// The two docking implications for one grid node: inside the trigger sphere
// (H = r - |p - p_f|) the approach speed obeys |v| <= alpha |p - p_f| and
// the position stays in the cone around e_f. mode must be a trigger form.
std::vector<ImplicationSpec> docking_triggers(const std::vector<Expr>& p,
                                              const std::vector<Expr>& v,
                                              const DockingParams& params,
                                              ImplicationMode mode);

enum class LogicMode { minlp, mpvc };
const char* to_string(LogicMode m);

// A built scenario: the problem plus the layout and bookkeeping the solvers,
// the benchmark front end and the tests need. Grid variables come first in
// stage-major order; indicator/auxiliary variables follow node-major.
struct ScenarioProblem {
  NlpProblem nlp;
  std::string scenario;
  LogicMode mode = LogicMode::minlp;
  int nx = 0, nu = 0, horizon = 0, substeps = 1;
  double dt = 0.0;
  int num_regions = 0;
  std::vector<int> delta_ids;  // node-major [k * num_regions + i]; [0,1]-valued
  std::vector<int> aux_ids;    // complementarity auxiliaries (docking mpvc)
  std::vector<std::string> region_names;
  Eigen::VectorXd initial_guess;
  double tau_min = 1e-3;
  // Objective decomposition; invalid Expr means the term is absent (zero).
  // By construction effort + indicator + rate + slack == objective.
  Expr effort_term, indicator_term, rate_term, slack_term;

  int nodes() const { return horizon + 1; }
  int state_index(int k, int i) const { return k * (nx + nu) + i; }
  int control_index(int k, int i) const { return k * (nx + nu) + nx + i; }
  int delta_index(int k, int region) const { return delta_ids[k * num_regions + region]; }
};

// Five rectangles strung along the diagonal between the depot and the goal.
std::vector<Polytope> ugv_default_regions();
// Three pyramids at the published centers with beta = 70 deg, d = 1.
std::vector<Polytope> pdg_default_regions();

ScenarioProblem build_ugv_ocp(const UgvParams& params, const std::vector<Polytope>& regions,
                              LogicMode mode);
ScenarioProblem build_pdg_ocp(const LanderParams& params, const std::vector<Polytope>& regions,
                              LogicMode mode);
ScenarioProblem build_docking_ocp(const DockingParams& params, LogicMode mode);

}  // namespace trigopt
