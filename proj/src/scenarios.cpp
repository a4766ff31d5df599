// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace trigopt {

namespace {

using nlohmann::json;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

json parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

json parse_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string(what) + ": " + e.what());
  }
}

Eigen::VectorXd read_vector(const json& j, const char* key, Eigen::VectorXd def) {
  if (!j.contains(key)) return def;
  const auto& a = j.at(key);
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != def.size())
    throw std::runtime_error(std::string(key) + ": expected an array of " +
                             std::to_string(def.size()) + " numbers");
  for (Eigen::Index i = 0; i < def.size(); ++i) def[i] = a[static_cast<std::size_t>(i)].get<double>();
  return def;
}

Eigen::Vector3d read_vector3(const json& j, const char* key, const Eigen::Vector3d& def) {
  return read_vector(j, key, def);
}

// Membership row A(j,:) xi + b(j) over the node-k state prefix.
Expr region_row(NlpBuilder& b, const Transcription& t, const Polytope& poly, int j, int k) {
  std::vector<Expr> xs;
  std::vector<double> cs;
  xs.reserve(poly.dim);
  cs.reserve(poly.dim);
  for (int c = 0; c < poly.dim; ++c) {
    xs.push_back(b.var(t.state_index(k, c)));
    cs.push_back(poly.A(j, c));
  }
  return affine(xs, cs, poly.b[j]);
}

Expr accumulate(Expr acc, const Expr& term) { return acc.valid() ? acc + term : term; }

void check_regions(const std::vector<Polytope>& regions, int dim_a, int dim_b,
                   const char* what) {
  if (regions.empty()) throw std::invalid_argument(std::string(what) + ": no regions given");
  for (const auto& r : regions) {
    r.validate();
    if (r.dim != dim_a && r.dim != dim_b)
      throw std::invalid_argument(std::string(what) + ": region '" + r.name +
                                  "' has unsupported dimension " + std::to_string(r.dim));
  }
}

}  // namespace

void Polytope::validate() const {
  auto fail = [this](const std::string& msg) {
    throw std::invalid_argument("polytope '" + name + "': " + msg);
  };
  if (dim <= 0) fail("dimension must be positive");
  if (A.rows() < 1) fail("needs at least one face row");
  if (A.cols() != dim) fail("A has " + std::to_string(A.cols()) + " columns, expected " +
                            std::to_string(dim));
  if (b.size() != A.rows()) fail("b length does not match the face count");
  if (!A.allFinite() || !b.allFinite()) fail("non-finite entry");
  for (Eigen::Index j = 0; j < A.rows(); ++j)
    if (A.row(j).norm() == 0.0) fail("face " + std::to_string(j) + " has a zero normal");
}

bool Polytope::contains(const Eigen::VectorXd& xi, double tol) const {
  if (xi.size() != dim)
    throw std::invalid_argument("polytope '" + name + "': point dimension mismatch");
  return ((A * xi + b).array() <= tol).all();
}

namespace {

std::vector<Polytope> polytopes_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw std::runtime_error(ctx + ": expected a top-level array");
  std::vector<Polytope> out;
  out.reserve(j.size());
  for (const auto& jp : j) {
    Polytope p;
    try {
      p.name = jp.value("name", "");
      p.dim = jp.at("dim").get<int>();
      const auto& ja = jp.at("A");
      const auto& jb = jp.at("b");
      if (!ja.is_array() || !jb.is_array())
        throw std::runtime_error("A and b must be arrays");
      p.A.resize(static_cast<Eigen::Index>(ja.size()), p.dim);
      p.b.resize(static_cast<Eigen::Index>(jb.size()));
      for (std::size_t r = 0; r < ja.size(); ++r) {
        if (!ja[r].is_array() || static_cast<int>(ja[r].size()) != p.dim)
          throw std::runtime_error("row " + std::to_string(r) + " of A is not a " +
                                   std::to_string(p.dim) + "-vector");
        for (int c = 0; c < p.dim; ++c)
          p.A(static_cast<Eigen::Index>(r), c) = ja[r][static_cast<std::size_t>(c)].get<double>();
      }
      for (std::size_t r = 0; r < jb.size(); ++r)
        p.b[static_cast<Eigen::Index>(r)] = jb[r].get<double>();
    } catch (const json::exception& e) {
      throw std::runtime_error(ctx + ": " + e.what());
    }
    p.validate();
    out.push_back(std::move(p));
  }
  return out;
}

json polytopes_to_json(const std::vector<Polytope>& regions) {
  json arr = json::array();
  for (const auto& p : regions) {
    p.validate();
    json jp;
    jp["name"] = p.name;
    jp["dim"] = p.dim;
    json rows = json::array();
    for (Eigen::Index r = 0; r < p.A.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < p.A.cols(); ++c) row.push_back(p.A(r, c));
      rows.push_back(std::move(row));
    }
    jp["A"] = std::move(rows);
    json bs = json::array();
    for (Eigen::Index r = 0; r < p.b.size(); ++r) bs.push_back(p.b[r]);
    jp["b"] = std::move(bs);
    arr.push_back(std::move(jp));
  }
  return arr;
}

}  // namespace

std::vector<Polytope> load_polytopes(const std::string& path) {
  return polytopes_from_json(parse_file(path), path);
}

std::vector<Polytope> parse_polytopes(const std::string& json_text) {
  return polytopes_from_json(parse_text(json_text, "regions"), "regions");
}

void save_polytopes(const std::string& path, const std::vector<Polytope>& regions) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << serialize_polytopes(regions) << '\n';
}

std::string serialize_polytopes(const std::vector<Polytope>& regions) {
  return polytopes_to_json(regions).dump(2);
}

std::vector<Polytope> pyramid_regions(double beta_rad,
                                      const std::vector<Eigen::Vector3d>& centers,
                                      const Eigen::Vector4d& d) {
  if (!(beta_rad > 0.0 && beta_rad < std::numbers::pi / 2))
    throw std::invalid_argument("pyramid half-angle must lie in (0, pi/2)");
  const double cb = std::cos(beta_rad), sb = std::sin(beta_rad);
  Eigen::MatrixXd C(4, 3);
  C << cb, 0, -sb, 0, cb, -sb, -cb, 0, -sb, 0, -cb, -sb;
  std::vector<Polytope> out;
  out.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    Polytope p;
    p.name = "pyramid_" + std::to_string(i + 1);
    p.dim = 3;
    p.A = C;
    p.b = d - C * centers[i];
    p.validate();
    out.push_back(std::move(p));
  }
  return out;
}

void UgvParams::validate() const {
  auto req = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("ugv params: ") + msg);
  };
  req(L > 0, "wheelbase must be positive");
  req(a_max > 0 && psi_max_deg > 0, "control bounds must be positive");
  req(theta_max_deg > 0 && theta_max_deg <= 180, "heading bound must lie in (0, 180]");
  req(v_min > 0 && v_max > v_min, "need 0 < v_min < v_max");
  req(phi_max_deg > 0 && phi_max_deg < 90, "steering bound must lie in (0, 90)");
  req(t_d > 0 && N >= 1 && substeps >= 1, "grid must be non-degenerate");
  req(x0.size() == 5 && xN.size() == 5, "boundary states must have 5 components");
  req(w <= 0, "indicator weight must be <= 0 (activation is rewarded)");
  req(M > 0 && tau_min > 0, "M and tau_min must be positive");
  req(pos_lo < pos_hi, "position box is empty");
  for (const auto* x : {&x0, &xN}) {
    req((*x)[0] >= pos_lo && (*x)[0] <= pos_hi && (*x)[1] >= pos_lo && (*x)[1] <= pos_hi,
        "boundary position outside the position box");
    req((*x)[3] >= v_min && (*x)[3] <= v_max, "boundary speed outside [v_min, v_max]");
  }
}

namespace {

UgvParams ugv_from_json(const json& j) {
  UgvParams p;
  p.L = j.value("L", p.L);
  p.a_max = j.value("a_max", p.a_max);
  p.psi_max_deg = j.value("psi_max_deg", p.psi_max_deg);
  p.theta_max_deg = j.value("theta_max_deg", p.theta_max_deg);
  p.v_min = j.value("v_min", p.v_min);
  p.v_max = j.value("v_max", p.v_max);
  p.phi_max_deg = j.value("phi_max_deg", p.phi_max_deg);
  p.t_d = j.value("t_d", p.t_d);
  p.N = j.value("N", p.N);
  p.x0 = read_vector(j, "x0", p.x0);
  p.xN = read_vector(j, "xN", p.xN);
  p.w = j.value("w", p.w);
  p.M = j.value("M", p.M);
  p.tau_min = j.value("tau_min", p.tau_min);
  p.pos_lo = j.value("pos_lo", p.pos_lo);
  p.pos_hi = j.value("pos_hi", p.pos_hi);
  p.substeps = j.value("substeps", p.substeps);
  p.validate();
  return p;
}

json ugv_to_json(const UgvParams& p) {
  json j;
  j["L"] = p.L;
  j["a_max"] = p.a_max;
  j["psi_max_deg"] = p.psi_max_deg;
  j["theta_max_deg"] = p.theta_max_deg;
  j["v_min"] = p.v_min;
  j["v_max"] = p.v_max;
  j["phi_max_deg"] = p.phi_max_deg;
  j["t_d"] = p.t_d;
  j["N"] = p.N;
  j["x0"] = std::vector<double>(p.x0.data(), p.x0.data() + p.x0.size());
  j["xN"] = std::vector<double>(p.xN.data(), p.xN.data() + p.xN.size());
  j["w"] = p.w;
  j["M"] = p.M;
  j["tau_min"] = p.tau_min;
  j["pos_lo"] = p.pos_lo;
  j["pos_hi"] = p.pos_hi;
  j["substeps"] = p.substeps;
  return j;
}

}  // namespace

UgvParams load_ugv_params(const std::string& path) {
  return ugv_from_json(parse_file(path));
}

UgvParams parse_ugv_params(const std::string& json_text) {
  return ugv_from_json(parse_text(json_text, "ugv params"));
}

std::string serialize_params(const UgvParams& p) {
  p.validate();
  return ugv_to_json(p).dump(2);
}

void LanderParams::validate() const {
  auto req = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("lander params: ") + msg);
  };
  req(gamma_gs_deg > 0 && gamma_gs_deg < 90, "glide-slope angle must lie in (0, 90)");
  req(gamma_p_deg > 0 && gamma_p_deg < 90, "pointing angle must lie in (0, 90)");
  req(g_mars < 0, "g_mars is the signed z acceleration and must be negative");
  req(g_earth > 0 && I_sp > 0, "g_earth and I_sp must be positive");
  req(rho_lb > 0 && rho_ub > rho_lb, "need 0 < rho_lb < rho_ub");
  req(m_dry > 0 && m_wet > m_dry, "need 0 < m_dry < m_wet");
  req(N >= 1 && t_f > 0, "grid must be non-degenerate");
  req(w0 >= 0 && w1 >= 0 && w2 >= 0, "weights must be non-negative");
  req(tau_min > 0, "tau_min must be positive");
  req((slack_r_hi - slack_r_lo).minCoeff() > 0, "landing box is empty");
  req(slack_v_abs > 0, "terminal speed tolerance must be positive");
  req(pos_xy_abs > 0 && pos_z_hi > 0 && v_max_kmh > 0, "state boxes must be positive");
  req(std::abs(r0.x()) <= pos_xy_abs && std::abs(r0.y()) <= pos_xy_abs && r0.z() >= 0 &&
          r0.z() <= pos_z_hi,
      "initial position outside the position box");
  req(v0().cwiseAbs().maxCoeff() <= v_max(), "initial velocity outside the speed box");
}

namespace {

LanderParams lander_from_json(const json& j) {
  LanderParams p;
  p.gamma_gs_deg = j.value("gamma_gs_deg", p.gamma_gs_deg);
  p.gamma_p_deg = j.value("gamma_p_deg", p.gamma_p_deg);
  p.omega = read_vector3(j, "omega", p.omega);
  p.g_mars = j.value("g_mars", p.g_mars);
  p.g_earth = j.value("g_earth", p.g_earth);
  p.I_sp = j.value("I_sp", p.I_sp);
  p.rho_lb = j.value("rho_lb", p.rho_lb);
  p.rho_ub = j.value("rho_ub", p.rho_ub);
  p.m_wet = j.value("m_wet", p.m_wet);
  p.m_dry = j.value("m_dry", p.m_dry);
  p.r0 = read_vector3(j, "r0", p.r0);
  p.v0_kmh = read_vector3(j, "v0_kmh", p.v0_kmh);
  p.v_max_kmh = j.value("v_max_kmh", p.v_max_kmh);
  p.N = j.value("N", p.N);
  p.t_f = j.value("t_f", p.t_f);
  p.w0 = j.value("w0", p.w0);
  p.w1 = j.value("w1", p.w1);
  p.w2 = j.value("w2", p.w2);
  p.tau_min = j.value("tau_min", p.tau_min);
  p.slack_r_lo = read_vector3(j, "slack_r_lo", p.slack_r_lo);
  p.slack_r_hi = read_vector3(j, "slack_r_hi", p.slack_r_hi);
  p.slack_v_abs = j.value("slack_v_abs", p.slack_v_abs);
  p.pos_xy_abs = j.value("pos_xy_abs", p.pos_xy_abs);
  p.pos_z_hi = j.value("pos_z_hi", p.pos_z_hi);
  p.literal_thrust_box = j.value("literal_thrust_box", p.literal_thrust_box);
  p.validate();
  return p;
}

json lander_to_json(const LanderParams& p) {
  auto vec3 = [](const Eigen::Vector3d& v) {
    return std::vector<double>{v.x(), v.y(), v.z()};
  };
  json j;
  j["gamma_gs_deg"] = p.gamma_gs_deg;
  j["gamma_p_deg"] = p.gamma_p_deg;
  j["omega"] = vec3(p.omega);
  j["g_mars"] = p.g_mars;
  j["g_earth"] = p.g_earth;
  j["I_sp"] = p.I_sp;
  j["rho_lb"] = p.rho_lb;
  j["rho_ub"] = p.rho_ub;
  j["m_wet"] = p.m_wet;
  j["m_dry"] = p.m_dry;
  j["r0"] = vec3(p.r0);
  j["v0_kmh"] = vec3(p.v0_kmh);
  j["v_max_kmh"] = p.v_max_kmh;
  j["N"] = p.N;
  j["t_f"] = p.t_f;
  j["w0"] = p.w0;
  j["w1"] = p.w1;
  j["w2"] = p.w2;
  j["tau_min"] = p.tau_min;
  j["slack_r_lo"] = vec3(p.slack_r_lo);
  j["slack_r_hi"] = vec3(p.slack_r_hi);
  j["slack_v_abs"] = p.slack_v_abs;
  j["pos_xy_abs"] = p.pos_xy_abs;
  j["pos_z_hi"] = p.pos_z_hi;
  j["literal_thrust_box"] = p.literal_thrust_box;
  return j;
}

}  // namespace

LanderParams load_lander_params(const std::string& path) {
  return lander_from_json(parse_file(path));
}

LanderParams parse_lander_params(const std::string& json_text) {
  return lander_from_json(parse_text(json_text, "lander params"));
}

std::string serialize_params(const LanderParams& p) {
  p.validate();
  return lander_to_json(p).dump(2);
}

void DockingParams::validate() const {
  auto req = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("docking params: ") + msg);
  };
  req(radius > 0, "trigger radius must be positive");
  req(alpha > 0, "funnel slope must be positive");
  req(theta_max_deg > 0 && theta_max_deg < 90, "cone half-angle must lie in (0, 90)");
  req(std::abs(e_f.norm() - 1.0) < 1e-9, "cone axis must be a unit vector");
  req(standoff > 0 && standoff < radius, "hold point must sit inside the trigger sphere");
  req(u_max > 0 && v_box > 0 && pos_box > 0, "bounds must be positive");
  req(N >= 1 && t_f > 0, "grid must be non-degenerate");
  req(eps > 0 && big_m > 0 && lower_m > 0, "logic constants must be positive");
  req(tau_min > 0 && tau_min < 1, "tau_min must lie in (0, 1)");
}

namespace {

DockingParams docking_from_json(const json& j) {
  DockingParams p;
  p.radius = j.value("radius", p.radius);
  p.alpha = j.value("alpha", p.alpha);
  p.theta_max_deg = j.value("theta_max_deg", p.theta_max_deg);
  p.e_f = read_vector3(j, "e_f", p.e_f);
  p.p_f = read_vector3(j, "p_f", p.p_f);
  p.p_start = read_vector3(j, "p_start", p.p_start);
  p.v_start = read_vector3(j, "v_start", p.v_start);
  p.standoff = j.value("standoff", p.standoff);
  p.u_max = j.value("u_max", p.u_max);
  p.N = j.value("N", p.N);
  p.t_f = j.value("t_f", p.t_f);
  p.eps = j.value("eps", p.eps);
  p.big_m = j.value("big_m", p.big_m);
  p.lower_m = j.value("lower_m", p.lower_m);
  p.pos_box = j.value("pos_box", p.pos_box);
  p.v_box = j.value("v_box", p.v_box);
  p.tau_min = j.value("tau_min", p.tau_min);
  p.validate();
  return p;
}

json docking_to_json(const DockingParams& p) {
  auto vec3 = [](const Eigen::Vector3d& v) {
    return std::vector<double>{v.x(), v.y(), v.z()};
  };
  json j;
  j["radius"] = p.radius;
  j["alpha"] = p.alpha;
  j["theta_max_deg"] = p.theta_max_deg;
  j["e_f"] = vec3(p.e_f);
  j["p_f"] = vec3(p.p_f);
  j["p_start"] = vec3(p.p_start);
  j["v_start"] = vec3(p.v_start);
  j["standoff"] = p.standoff;
  j["u_max"] = p.u_max;
  j["N"] = p.N;
  j["t_f"] = p.t_f;
  j["eps"] = p.eps;
  j["big_m"] = p.big_m;
  j["lower_m"] = p.lower_m;
  j["pos_box"] = p.pos_box;
  j["v_box"] = p.v_box;
  j["tau_min"] = p.tau_min;
  return j;
}

}  // namespace

DockingParams load_docking_params(const std::string& path) {
  return docking_from_json(parse_file(path));
}

DockingParams parse_docking_params(const std::string& json_text) {
  return docking_from_json(parse_text(json_text, "docking params"));
}

std::string serialize_params(const DockingParams& p) {
  p.validate();
  return docking_to_json(p).dump(2);
}

DynamicsFn ugv_dynamics(double L) {
  if (!(L > 0)) throw std::invalid_argument("wheelbase must be positive");
  return [L](const std::vector<Expr>& x, const std::vector<Expr>& u) {
    // x = (px, py, theta, v, phi), u = (a, psi)
    return std::vector<Expr>{x[3] * cos(x[2]), x[3] * sin(x[2]),
                             (1.0 / L) * (x[3] * tan(x[4])), u[0], u[1]};
  };
}

DynamicsFn lander_dynamics(const LanderParams& params) {
  params.validate();
  const Eigen::Vector3d w = params.omega;
  const double g = params.g_mars;
  const double flow = 1.0 / (params.g_earth * params.I_sp);  // mass flow per thrust
  return [w, g, flow](const std::vector<Expr>& x, const std::vector<Expr>& u) {
    auto cross = [](const Eigen::Vector3d& a, const std::vector<Expr>& p) {
      return std::vector<Expr>{a.y() * p[2] - a.z() * p[1], a.z() * p[0] - a.x() * p[2],
                               a.x() * p[1] - a.y() * p[0]};
    };
    std::vector<Expr> r{x[0], x[1], x[2]}, v{x[3], x[4], x[5]};
    auto wwr = cross(w, cross(w, r));  // centrifugal
    auto wv = cross(w, v);             // half the Coriolis term
    std::vector<Expr> out;
    out.reserve(7);
    for (int i = 0; i < 3; ++i) out.push_back(v[i]);
    for (int i = 0; i < 3; ++i) {
      Expr a = u[i] / x[6] - wwr[i] - 2.0 * wv[i];
      out.push_back(i == 2 ? a + g : a);
    }
    out.push_back((-flow) * norm2({u[0], u[1], u[2]}));
    return out;
  };
}

std::vector<ImplicationSpec> docking_triggers(const std::vector<Expr>& p,
                                              const std::vector<Expr>& v,
                                              const DockingParams& params,
                                              ImplicationMode mode) {
  if (mode != ImplicationMode::trigger_eps_bigM && mode != ImplicationMode::trigger_mpcc)
    throw std::invalid_argument("docking logic requires a trigger form");
  std::vector<Expr> dp{p[0] - params.p_f.x(), p[1] - params.p_f.y(), p[2] - params.p_f.z()};
  Expr dist = norm2({dp[0], dp[1], dp[2]});
  Expr trigger = params.radius - dist;
  ImplicationSpec funnel;
  funnel.trigger = trigger;
  funnel.body = {norm2({v[0], v[1], v[2]}) - params.alpha * dist};
  funnel.mode = mode;
  funnel.big_m = params.big_m;
  funnel.lower_m = params.lower_m;
  funnel.eps = params.eps;
  funnel.name = "speed_funnel";
  ImplicationSpec cone = funnel;
  Expr along = affine({dp[0], dp[1], dp[2]},
                      {params.e_f.x(), params.e_f.y(), params.e_f.z()}, 0.0);
  cone.body = {std::cos(deg2rad(params.theta_max_deg)) * dist - along};
  cone.name = "approach_cone";
  return {funnel, cone};
}

const char* to_string(LogicMode m) { return m == LogicMode::minlp ? "minlp" : "mpvc"; }

std::vector<Polytope> ugv_default_regions() {
  std::vector<Polytope> out;
  const double hw = 0.8;  // half-width; boxes nearly touch along the diagonal
  for (int i = 1; i <= 5; ++i) {
    const double c = 10.0 * i / 6.0;
    Polytope p;
    p.name = "target_" + std::to_string(i);
    p.dim = 2;
    p.A.resize(4, 2);
    p.A << 1, 0, -1, 0, 0, 1, 0, -1;
    p.b.resize(4);
    p.b << -c - hw, c - hw, -c - hw, c - hw;
    p.validate();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Polytope> pdg_default_regions() {
  return pyramid_regions(deg2rad(70.0),
                         {Eigen::Vector3d(2000, 400, 0), Eigen::Vector3d(1000, 250, 0),
                          Eigen::Vector3d(100, -100, 0)},
                         Eigen::Vector4d::Ones());
}

ScenarioProblem build_ugv_ocp(const UgvParams& params, const std::vector<Polytope>& regions,
                              LogicMode mode) {
  params.validate();
  check_regions(regions, 2, 2, "ugv");

  OcpSpec spec;
  spec.nx = 5;
  spec.nu = 2;
  spec.horizon = params.N;
  spec.dt = params.t_d;
  spec.substeps = params.substeps;
  spec.dynamics = ugv_dynamics(params.L);
  spec.x0 = params.x0;
  const double th = deg2rad(params.theta_max_deg);
  const double ph = deg2rad(params.phi_max_deg);
  const double ps = deg2rad(params.psi_max_deg);
  spec.x_lb = (Eigen::VectorXd(5) << params.pos_lo, params.pos_lo, -th, params.v_min, -ph).finished();
  spec.x_ub = (Eigen::VectorXd(5) << params.pos_hi, params.pos_hi, th, params.v_max, ph).finished();
  spec.u_lb = (Eigen::VectorXd(2) << -params.a_max, -ps).finished();
  spec.u_ub = (Eigen::VectorXd(2) << params.a_max, ps).finished();
  spec.state_names = {"px", "py", "theta", "v", "phi"};
  spec.control_names = {"a", "psi"};

  Transcription t(spec);
  NlpBuilder& b = t.builder();
  const int N = params.N;
  const int R = static_cast<int>(regions.size());
  for (int i = 0; i < 5; ++i) b.fix_var(t.state_index(N, i), params.xN[i]);

  Expr effort;
  for (int k = 0; k < N; ++k) {
    Expr term = sum_sq({b.var(t.control_index(k, 0)), b.var(t.control_index(k, 1))});
    b.add_objective_term(term);
    effort = accumulate(effort, term);
  }

  // region membership indicators at every grid node
  std::vector<int> delta_ids;
  delta_ids.reserve(static_cast<std::size_t>(N + 1) * R);
  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i < R; ++i) {
      ImplicationSpec is;
      is.mode = mode == LogicMode::minlp ? ImplicationMode::indicator_bigM
                                         : ImplicationMode::indicator_vanishing;
      is.big_m = params.M;
      is.weight = -params.w;
      is.name = regions[i].name + "_k" + std::to_string(k);
      for (Eigen::Index j = 0; j < regions[i].A.rows(); ++j)
        is.body.push_back(region_row(b, t, regions[i], static_cast<int>(j), k));
      delta_ids.push_back(compile_implication(b, is).delta);
    }
  }

  // every region must be visited at least once
  for (int i = 0; i < R; ++i) {
    std::vector<Expr> ds;
    std::vector<double> cs;
    for (int k = 0; k <= N; ++k) {
      ds.push_back(b.var(delta_ids[static_cast<std::size_t>(k) * R + i]));
      cs.push_back(-1.0);
    }
    b.add_ineq(affine(ds, cs, 1.0));
  }

  std::vector<Expr> all_d;
  std::vector<double> ws;
  for (int id : delta_ids) {
    all_d.push_back(b.var(id));
    ws.push_back(params.w);
  }

  ScenarioProblem sp;
  sp.scenario = "ugv";
  sp.mode = mode;
  sp.nx = 5;
  sp.nu = 2;
  sp.horizon = N;
  sp.substeps = params.substeps;
  sp.dt = params.t_d;
  sp.num_regions = R;
  sp.delta_ids = delta_ids;
  for (const auto& r : regions) sp.region_names.push_back(r.name);
  sp.tau_min = params.tau_min;
  sp.effort_term = effort;
  sp.indicator_term = affine(all_d, ws, 0.0);
  sp.nlp = t.build();

  Eigen::VectorXd g = Eigen::VectorXd::Zero(sp.nlp.n);
  for (int k = 0; k <= N; ++k) {
    const double a = static_cast<double>(k) / N;
    for (int i = 0; i < 5; ++i)
      g[t.state_index(k, i)] = (1 - a) * params.x0[i] + a * params.xN[i];
  }
  for (int id : delta_ids) g[id] = 1.0;
  sp.initial_guess = g;
  return sp;
}

ScenarioProblem build_pdg_ocp(const LanderParams& params, const std::vector<Polytope>& regions,
                              LogicMode mode) {
  params.validate();
  check_regions(regions, 3, 6, "pdg");

  const double vmax = params.v_max();
  OcpSpec base;
  base.nx = 7;
  base.nu = 3;
  base.horizon = params.N;
  base.dt = params.t_f / params.N;
  base.substeps = 1;
  base.dynamics = lander_dynamics(params);
  base.x0 = (Eigen::VectorXd(7) << params.r0, params.v0(), params.m_wet).finished();
  base.x_lb = (Eigen::VectorXd(7) << -params.pos_xy_abs, -params.pos_xy_abs, 0.0, -vmax,
               -vmax, -vmax, params.m_dry)
                  .finished();
  base.x_ub = (Eigen::VectorXd(7) << params.pos_xy_abs, params.pos_xy_abs, params.pos_z_hi,
               vmax, vmax, vmax, params.m_wet)
                  .finished();
  const double ulo = params.literal_thrust_box ? params.rho_lb : -params.rho_ub;
  base.u_lb = Eigen::VectorXd::Constant(3, ulo);
  base.u_ub = Eigen::VectorXd::Constant(3, params.rho_ub);
  base.state_names = {"rx", "ry", "rz", "vx", "vy", "vz", "m"};
  base.control_names = {"ux", "uy", "uz"};

  // thrust becomes state; the (unbounded) control is its rate
  OcpSpec aug = augment_with_rate_control(base);
  Transcription t(aug);
  NlpBuilder& b = t.builder();
  const int N = params.N;
  const int R = static_cast<int>(regions.size());

  // terminal accuracy enters as bounds on the final node plus a quadratic
  // pull toward the pad in the objective
  for (int i = 0; i < 3; ++i)
    b.set_bounds(t.state_index(N, i), params.slack_r_lo[i], params.slack_r_hi[i]);
  for (int i = 0; i < 3; ++i)
    b.set_bounds(t.state_index(N, 3 + i), -params.slack_v_abs, params.slack_v_abs);

  const double cgs = std::cos(deg2rad(params.gamma_gs_deg));
  const double cp = std::cos(deg2rad(params.gamma_p_deg));
  for (int k = 0; k < N; ++k) {
    Expr ux = b.var(t.state_index(k, 7));
    Expr uy = b.var(t.state_index(k, 8));
    Expr uz = b.var(t.state_index(k, 9));
    Expr un = norm2({ux, uy, uz});
    b.add_ineq(params.rho_lb - un);
    b.add_ineq(un - params.rho_ub);
    b.add_ineq(cp * un - uz);  // thrust pointing cone
    Expr rx = b.var(t.state_index(k, 0));
    Expr ry = b.var(t.state_index(k, 1));
    Expr rz = b.var(t.state_index(k, 2));
    b.add_ineq(cgs * norm2({rx, ry, rz}) - rz);  // glide-slope cone
  }

  // per-region big-M certified by interval arithmetic over an interior node
  // (nodes 0 and N have tighter boxes, so the bound transfers)
  std::vector<double> big_m(static_cast<std::size_t>(R));
  {
    const auto& lo = b.lower_bounds();
    const auto& hi = b.upper_bounds();
    for (int i = 0; i < R; ++i) {
      double m = 1.0;
      for (Eigen::Index j = 0; j < regions[i].A.rows(); ++j)
        m = std::max(m, interval_eval(region_row(b, t, regions[i], static_cast<int>(j), 1),
                                      lo, hi)
                            .hi);
      big_m[static_cast<std::size_t>(i)] = m;
    }
  }

  std::vector<int> delta_ids;
  delta_ids.reserve(static_cast<std::size_t>(N + 1) * R);
  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i < R; ++i) {
      ImplicationSpec is;
      is.mode = mode == LogicMode::minlp ? ImplicationMode::indicator_bigM
                                         : ImplicationMode::indicator_vanishing;
      is.big_m = big_m[static_cast<std::size_t>(i)];
      is.weight = params.w1;
      is.name = regions[i].name + "_k" + std::to_string(k);
      for (Eigen::Index j = 0; j < regions[i].A.rows(); ++j)
        is.body.push_back(region_row(b, t, regions[i], static_cast<int>(j), k));
      delta_ids.push_back(compile_implication(b, is).delta);
    }
  }

  Expr effort = affine({b.var(t.state_index(N, 6))}, {-params.w0}, 0.0);
  b.add_objective_term(effort);
  Expr rate;
  for (int k = 0; k < N; ++k) {
    Expr term = params.w2 * sum_sq({b.var(t.control_index(k, 0)), b.var(t.control_index(k, 1)),
                                    b.var(t.control_index(k, 2))});
    b.add_objective_term(term);
    rate = accumulate(rate, term);
  }
  Expr slack = sum_sq({b.var(t.state_index(N, 0)), b.var(t.state_index(N, 1)),
                       b.var(t.state_index(N, 2))}) +
               sum_sq({b.var(t.state_index(N, 3)), b.var(t.state_index(N, 4)),
                       b.var(t.state_index(N, 5))});
  b.add_objective_term(slack);

  std::vector<Expr> all_d;
  std::vector<double> ws;
  for (int id : delta_ids) {
    all_d.push_back(b.var(id));
    ws.push_back(-params.w1);
  }

  ScenarioProblem sp;
  sp.scenario = "pdg";
  sp.mode = mode;
  sp.nx = 10;
  sp.nu = 3;
  sp.horizon = N;
  sp.substeps = 1;
  sp.dt = params.t_f / params.N;
  sp.num_regions = R;
  sp.delta_ids = delta_ids;
  for (const auto& r : regions) sp.region_names.push_back(r.name);
  sp.tau_min = params.tau_min;
  sp.effort_term = effort;
  sp.indicator_term = affine(all_d, ws, 0.0);
  sp.rate_term = rate;
  sp.slack_term = slack;
  sp.nlp = t.build();

  Eigen::VectorXd g = Eigen::VectorXd::Zero(sp.nlp.n);
  const Eigen::Vector3d v0 = params.v0();
  const double hover = params.m_wet * (-params.g_mars);
  for (int k = 0; k <= N; ++k) {
    const double a = static_cast<double>(k) / N;
    for (int i = 0; i < 3; ++i) g[t.state_index(k, i)] = (1 - a) * params.r0[i];
    for (int i = 0; i < 3; ++i) g[t.state_index(k, 3 + i)] = (1 - a) * v0[i];
    g[t.state_index(k, 6)] = params.m_wet;
    g[t.state_index(k, 9)] = hover;
  }
  for (int id : delta_ids) g[id] = 1.0;
  sp.initial_guess = g;
  return sp;
}

ScenarioProblem build_docking_ocp(const DockingParams& params, LogicMode mode) {
  params.validate();

  OcpSpec spec;
  spec.nx = 6;
  spec.nu = 3;
  spec.horizon = params.N;
  spec.dt = params.t_f / params.N;
  spec.substeps = 1;
  spec.dynamics = [](const std::vector<Expr>& x, const std::vector<Expr>& u) {
    return std::vector<Expr>{x[3], x[4], x[5], u[0], u[1], u[2]};
  };
  spec.x0 = (Eigen::VectorXd(6) << params.p_start, params.v_start).finished();
  spec.x_lb = (Eigen::VectorXd(6) << -params.pos_box, -params.pos_box, -params.pos_box,
               -params.v_box, -params.v_box, -params.v_box)
                  .finished();
  spec.x_ub = -spec.x_lb;
  spec.u_lb = Eigen::VectorXd::Constant(3, -params.u_max);
  spec.u_ub = Eigen::VectorXd::Constant(3, params.u_max);
  spec.state_names = {"px", "py", "pz", "vx", "vy", "vz"};
  spec.control_names = {"ax", "ay", "az"};

  Transcription t(spec);
  NlpBuilder& b = t.builder();
  const int N = params.N;

  // hold point on the cone axis; the approach speed respects the funnel
  const Eigen::Vector3d pN = params.p_f + params.standoff * params.e_f;
  const Eigen::Vector3d vN = -0.8 * params.alpha * params.standoff * params.e_f;
  for (int i = 0; i < 3; ++i) {
    b.fix_var(t.state_index(N, i), pN[i]);
    b.fix_var(t.state_index(N, 3 + i), vN[i]);
  }

  Expr effort;
  for (int k = 0; k < N; ++k) {
    Expr term = sum_sq({b.var(t.control_index(k, 0)), b.var(t.control_index(k, 1)),
                        b.var(t.control_index(k, 2))});
    b.add_objective_term(term);
    effort = accumulate(effort, term);
  }

  const ImplicationMode im = mode == LogicMode::minlp ? ImplicationMode::trigger_eps_bigM
                                                      : ImplicationMode::trigger_mpcc;
  std::vector<int> delta_ids, aux_ids;
  for (int k = 0; k <= N; ++k) {
    std::vector<Expr> p{b.var(t.state_index(k, 0)), b.var(t.state_index(k, 1)),
                        b.var(t.state_index(k, 2))};
    std::vector<Expr> v{b.var(t.state_index(k, 3)), b.var(t.state_index(k, 4)),
                        b.var(t.state_index(k, 5))};
    for (auto& is : docking_triggers(p, v, params, im)) {
      is.name += "_k" + std::to_string(k);
      auto rec = compile_implication(b, is);
      if (rec.delta >= 0) delta_ids.push_back(rec.delta);
      if (rec.y >= 0) aux_ids.push_back(rec.y);
    }
  }

  ScenarioProblem sp;
  sp.scenario = "docking";
  sp.mode = mode;
  sp.nx = 6;
  sp.nu = 3;
  sp.horizon = N;
  sp.substeps = 1;
  sp.dt = params.t_f / params.N;
  sp.num_regions = 2;
  sp.delta_ids = delta_ids;  // empty in the complementarity form
  sp.aux_ids = aux_ids;
  sp.region_names = {"speed_funnel", "approach_cone"};
  sp.tau_min = params.tau_min;
  sp.effort_term = effort;
  sp.nlp = t.build();

  Eigen::VectorXd g = Eigen::VectorXd::Zero(sp.nlp.n);
  for (int k = 0; k <= N; ++k) {
    const double a = static_cast<double>(k) / N;
    Eigen::Vector3d pk = (1 - a) * params.p_start + a * pN;
    Eigen::Vector3d vk = (1 - a) * params.v_start + a * vN;
    for (int i = 0; i < 3; ++i) {
      g[t.state_index(k, i)] = pk[i];
      g[t.state_index(k, 3 + i)] = vk[i];
    }
    const double h = params.radius - (pk - params.p_f).norm();
    const int gate = 2 * k;
    if (!delta_ids.empty()) {
      g[delta_ids[gate]] = g[delta_ids[gate + 1]] = h > 0 ? 1.0 : 0.0;
    } else {
      g[aux_ids[gate]] = g[aux_ids[gate + 1]] = std::max(h, 0.0);
    }
  }
  sp.initial_guess = g;
  return sp;
}

}  // namespace trigopt
