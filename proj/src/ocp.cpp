// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/ocp.hpp"

#include <cmath>
#include <stdexcept>

namespace trigopt {

namespace {

std::vector<Expr> axpy(const std::vector<Expr>& x, double a, const std::vector<Expr>& k) {
  std::vector<Expr> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.push_back(affine({x[i], k[i]}, {1.0, a}, 0.0));
  return out;
}

std::vector<Expr> rk4_substep(const DynamicsFn& f, const std::vector<Expr>& x,
                              const std::vector<Expr>& u, double h) {
  auto k1 = f(x, u);
  auto k2 = f(axpy(x, 0.5 * h, k1), u);
  auto k3 = f(axpy(x, 0.5 * h, k2), u);
  auto k4 = f(axpy(x, h, k3), u);
  std::vector<Expr> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.push_back(affine({x[i], k1[i], k2[i], k3[i], k4[i]},
                         {1.0, h / 6.0, h / 3.0, h / 3.0, h / 6.0}, 0.0));
  return out;
}

// symbolic-step variants for free final time
std::vector<Expr> axpy(const std::vector<Expr>& x, const Expr& ah, const std::vector<Expr>& k) {
  std::vector<Expr> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(x[i] + ah * k[i]);
  return out;
}

std::vector<Expr> rk4_substep(const DynamicsFn& f, const std::vector<Expr>& x,
                              const std::vector<Expr>& u, const Expr& h) {
  auto k1 = f(x, u);
  auto k2 = f(axpy(x, 0.5 * h, k1), u);
  auto k3 = f(axpy(x, 0.5 * h, k2), u);
  auto k4 = f(axpy(x, h, k3), u);
  std::vector<Expr> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.push_back(
        x[i] + h * affine({k1[i], k2[i], k3[i], k4[i]},
                          {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}, 0.0));
  return out;
}

}  // namespace

std::vector<Expr> rk4_step(const DynamicsFn& f, std::vector<Expr> x,
                           const std::vector<Expr>& u, double h, int substeps) {
  if (substeps < 1) throw std::invalid_argument("rk4_step: substeps must be >= 1");
  const double hs = h / substeps;
  for (int s = 0; s < substeps; ++s) x = rk4_substep(f, x, u, hs);
  return x;
}

std::vector<Expr> rk4_step(const DynamicsFn& f, std::vector<Expr> x,
                           const std::vector<Expr>& u, const Expr& h, int substeps) {
  if (substeps < 1) throw std::invalid_argument("rk4_step: substeps must be >= 1");
  const Expr hs = (1.0 / substeps) * h;
  for (int s = 0; s < substeps; ++s) x = rk4_substep(f, x, u, hs);
  return x;
}

OcpSpec augment_with_rate_control(const OcpSpec& s) {
  if (s.rate_augmented)
    throw std::invalid_argument("augment_with_rate_control: spec is already augmented");
  if (s.nu <= 0 || !s.dynamics)
    throw std::invalid_argument("augment_with_rate_control: spec needs controls and dynamics");

  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int nx = s.nx, nu = s.nu;

  OcpSpec a = s;
  a.rate_augmented = true;
  a.nx = nx + nu;
  a.nu = nu;

  DynamicsFn base = s.dynamics;
  a.dynamics = [base, nx, nu](const std::vector<Expr>& xt, const std::vector<Expr>& mu) {
    std::vector<Expr> x(xt.begin(), xt.begin() + nx);
    std::vector<Expr> u(xt.begin() + nx, xt.end());
    auto dx = base(x, u);
    for (int i = 0; i < nu; ++i) dx.push_back(mu[i]);
    return dx;
  };

  a.x0.resize(nx + nu);
  a.x0.head(nx) = s.x0;
  a.x0.tail(nu).setConstant(nan);  // initial thrust level is a free decision

  auto stack = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& us, double fill) {
    Eigen::VectorXd out(nx + nu);
    out.head(nx) = xs.size() == nx ? xs : Eigen::VectorXd::Constant(nx, fill);
    out.tail(nu) = us.size() == nu ? us : Eigen::VectorXd::Constant(nu, fill);
    return out;
  };
  if (s.x_lb.size() == nx || s.u_lb.size() == nu) a.x_lb = stack(s.x_lb, s.u_lb, -inf);
  if (s.x_ub.size() == nx || s.u_ub.size() == nu) a.x_ub = stack(s.x_ub, s.u_ub, inf);
  a.u_lb.resize(0);  // the rate control is unbounded by default
  a.u_ub.resize(0);

  if (static_cast<int>(s.state_names.size()) == nx &&
      static_cast<int>(s.control_names.size()) == nu) {
    a.state_names = s.state_names;
    a.state_names.insert(a.state_names.end(), s.control_names.begin(), s.control_names.end());
    a.control_names.clear();
    for (const auto& n : s.control_names) a.control_names.push_back("d" + n);
  } else {
    a.state_names.clear();
    a.control_names.clear();
  }
  return a;
}

Transcription::Transcription(const OcpSpec& spec) : spec_(spec) {
  const int nx = spec_.nx, nu = spec_.nu, N = spec_.horizon;
  if (nx <= 0 || N <= 0 || spec_.dt <= 0.0 || !spec_.dynamics)
    throw std::invalid_argument("Transcription: incomplete problem specification");
  if (spec_.x0.size() != nx)
    throw std::invalid_argument("Transcription: x0 has wrong size");
  if (spec_.free_tf && !(spec_.tf_lb > 0.0 && spec_.tf_ub > spec_.tf_lb))
    throw std::invalid_argument("Transcription: free t_f needs bounds 0 < tf_lb < tf_ub");

  const double inf = std::numeric_limits<double>::infinity();
  auto xlb = [&](int i) { return spec_.x_lb.size() == nx ? spec_.x_lb[i] : -inf; };
  auto xub = [&](int i) { return spec_.x_ub.size() == nx ? spec_.x_ub[i] : inf; };
  auto ulb = [&](int i) { return spec_.u_lb.size() == nu ? spec_.u_lb[i] : -inf; };
  auto uub = [&](int i) { return spec_.u_ub.size() == nu ? spec_.u_ub[i] : inf; };
  auto xname = [&](int i) {
    return static_cast<int>(spec_.state_names.size()) == nx ? spec_.state_names[i]
                                                            : "x" + std::to_string(i);
  };
  auto uname = [&](int i) {
    return static_cast<int>(spec_.control_names.size()) == nu ? spec_.control_names[i]
                                                              : "u" + std::to_string(i);
  };

  xids_.resize(static_cast<std::size_t>(N + 1) * nx);
  uids_.resize(static_cast<std::size_t>(N) * nu);
  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i < nx; ++i)
      xids_[static_cast<std::size_t>(k) * nx + i] =
          b_.add_var(xlb(i), xub(i), xname(i) + "_" + std::to_string(k));
    if (k < N)
      for (int i = 0; i < nu; ++i)
        uids_[static_cast<std::size_t>(k) * nu + i] =
            b_.add_var(ulb(i), uub(i), uname(i) + "_" + std::to_string(k));
  }

  if (spec_.free_tf) tf_id_ = b_.add_var(spec_.tf_lb, spec_.tf_ub, "t_f");

  // pin the initial state (NaN entries stay free decisions)
  for (int i = 0; i < nx; ++i)
    if (!std::isnan(spec_.x0[i])) b_.fix_var(state_index(0, i), spec_.x0[i]);

  // shooting defects x_{k+1} - phi(x_k, u_k) = 0
  for (int k = 0; k < N; ++k) {
    auto xk = state(k);
    auto uk = control(k);
    auto xn = spec_.free_tf
                  ? rk4_step(spec_.dynamics, xk, uk, (1.0 / N) * b_.var(tf_id_), spec_.substeps)
                  : rk4_step(spec_.dynamics, xk, uk, spec_.dt, spec_.substeps);
    auto xkp1 = state(k + 1);
    for (int i = 0; i < nx; ++i) b_.add_eq(xkp1[i] - xn[i]);
  }
}

int Transcription::state_index(int k, int i) const {
  return xids_.at(static_cast<std::size_t>(k) * spec_.nx + i);
}

int Transcription::control_index(int k, int i) const {
  return uids_.at(static_cast<std::size_t>(k) * spec_.nu + i);
}

std::vector<Expr> Transcription::state(int k) const {
  std::vector<Expr> out;
  out.reserve(spec_.nx);
  for (int i = 0; i < spec_.nx; ++i) out.push_back(b_.var(state_index(k, i)));
  return out;
}

std::vector<Expr> Transcription::control(int k) const {
  std::vector<Expr> out;
  out.reserve(spec_.nu);
  for (int i = 0; i < spec_.nu; ++i) out.push_back(b_.var(control_index(k, i)));
  return out;
}

Eigen::MatrixXd rollout(const DynamicsFn& f, int nx, int nu, const Eigen::VectorXd& x0,
                        const Eigen::MatrixXd& U, double dt, int substeps) {
  const int N = static_cast<int>(U.cols());
  if (U.rows() != nu && !(nu == 0 && U.rows() == 0))
    throw std::invalid_argument("rollout: control matrix has wrong row count");

  // symbolic one-step map over placeholder variables [x; u]
  std::vector<Expr> xs, us;
  for (int i = 0; i < nx; ++i) xs.push_back(Expr::variable(i));
  for (int i = 0; i < nu; ++i) us.push_back(Expr::variable(nx + i));
  auto step = rk4_step(f, xs, us, dt, substeps);

  Eigen::MatrixXd X(nx, N + 1);
  X.col(0) = x0;
  std::vector<double> vals(static_cast<std::size_t>(nx + nu));
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < nx; ++i) vals[i] = X(i, k);
    for (int i = 0; i < nu; ++i) vals[nx + i] = U(i, k);
    for (int i = 0; i < nx; ++i) X(i, k + 1) = eval(step[i], vals);
  }
  return X;
}

}  // namespace trigopt
