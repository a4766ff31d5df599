// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Primal-dual interior-point method with a monotone (Fiacco-McCormick)
// barrier schedule, l1 merit line search, inertia-corrected sparse LDL^T
// steps, and an l1 feasibility restoration phase that doubles as the local
// infeasibility certifier.

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "trigopt/nlp.hpp"

namespace trigopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFixedTol = 1e-12;
constexpr double kKappaEps = 10.0;    // barrier subproblem tolerance factor
constexpr double kKappaMu = 0.2;      // linear barrier reduction
constexpr double kThetaMu = 1.5;      // superlinear barrier reduction
constexpr double kKappaSigma = 1e10;  // bound-multiplier safeguard box
constexpr double kArmijo = 1e-4;

struct Workvecs {
  TapeWork tw;
  std::vector<double> g;      // dense gradient buffer, max_support
  std::vector<double> h;      // dense Hessian buffer, max_support^2
};

double sd_scale(double dual_l1, std::size_t count) {
  double avg = count ? dual_l1 / static_cast<double>(count) : 0.0;
  return std::max(100.0, avg) / 100.0;
}

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
}
double l1_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<1>() : 0.0; }

class Ipm {
 public:
  Ipm(const NlpProblem& p, const SolveOptions& opts, const Eigen::VectorXd& lb,
      const Eigen::VectorXd& ub)
      : p_(p), opts_(opts), lb_(lb), ub_(ub), c_(p.compiled()) {
    nfull_ = p_.n;
    for (int i = 0; i < nfull_; ++i) {
      if (ub_[i] - lb_[i] <= kFixedTol) {
        free_of_.push_back(-1);
      } else {
        free_of_.push_back(static_cast<int>(free_.size()));
        free_.push_back(i);
      }
    }
    nfree_ = static_cast<int>(free_.size());
    mE_ = static_cast<int>(c_->eq_tapes.size());
    mI_ = static_cast<int>(c_->ineq_tapes.size());
    N_ = nfree_ + mI_;
    m_ = mE_ + mI_;
    wl_.assign(N_, -kInf);
    wu_.assign(N_, kInf);
    for (int k = 0; k < nfree_; ++k) {
      wl_[k] = lb_[free_[k]];
      wu_[k] = ub_[free_[k]];
    }
    for (int k = 0; k < mI_; ++k) wl_[nfree_ + k] = 0.0;
    work_.g.resize(c_->max_support);
    work_.h.resize(c_->max_support * c_->max_support);
  }

  NlpSolution run(const Eigen::VectorXd* x0);

 private:
  struct Eval {
    double f = 0.0;
    Eigen::VectorXd gf;      // objective gradient, free vars
    Eigen::VectorXd cE, cI;  // raw constraint values
    bool ok = false;
  };

  Eigen::VectorXd full_point(const Eigen::VectorXd& w) const {
    Eigen::VectorXd x(nfull_);
    for (int i = 0; i < nfull_; ++i) x[i] = free_of_[i] < 0 ? 0.5 * (lb_[i] + ub_[i]) : 0.0;
    for (int k = 0; k < nfree_; ++k) x[free_[k]] = w[k];
    return x;
  }

  bool eval_point(const Eigen::VectorXd& w, Eval& e, bool with_grad);
  void eval_jacobian(const Eigen::VectorXd& x);
  bool eval_hessian_values(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  double barrier(const Eigen::VectorXd& w, double f) const;
  Eigen::VectorXd barrier_grad(const Eigen::VectorXd& w, const Eigen::VectorXd& gf) const;
  Eigen::VectorXd constraint_vec(const Eval& e, const Eigen::VectorXd& w) const;

  NlpSolution finish(SolveStatus st, const Eigen::VectorXd& w, const Eval& e);
  bool restoration(Eigen::VectorXd& w, Eval& e, NlpSolution* out, SolveStatus* st);

  const NlpProblem& p_;
  SolveOptions opts_;
  Eigen::VectorXd lb_, ub_;
  std::shared_ptr<const CompiledNlp> c_;
  Workvecs work_;

  int nfull_ = 0, nfree_ = 0, mE_ = 0, mI_ = 0, N_ = 0, m_ = 0;
  std::vector<int> free_;     // free slot -> var id
  std::vector<int> free_of_;  // var id -> free slot or -1
  std::vector<double> wl_, wu_;

  // iteration state shared between helpers
  Eigen::VectorXd y_, zl_, zu_;
  double mu_ = 0.1;
  std::vector<Eigen::Triplet<double>> jac_trip_;  // rows 0..m-1, cols free
  Eigen::VectorXd hess_vals_;                     // aligned with pattern COO
  Eigen::MatrixXd bfgs_;                          // quasi-Newton approximation
  int iters_ = 0;
  int resto_count_ = 0;
  double delta_w_last_ = 0.0;
  std::vector<double> trace_;
};

bool Ipm::eval_point(const Eigen::VectorXd& w, Eval& e, bool with_grad) {
  Eigen::VectorXd x = full_point(w);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  e.ok = false;
  try {
    e.f = c_->obj_bias;
    if (with_grad) e.gf = Eigen::VectorXd::Zero(nfree_);
    for (std::size_t t = 0; t < c_->obj_tapes.size(); ++t) {
      const Tape& tape = c_->obj_tapes[t];
      double v;
      if (with_grad) {
        v = tape.gradient(xs, work_.tw, work_.g.data());
        for (int i = 0; i < tape.nin(); ++i) {
          int fs = free_of_[tape.support()[i]];
          if (fs >= 0) e.gf[fs] += c_->obj_weights[t] * work_.g[i];
        }
      } else {
        v = tape.value(xs, work_.tw);
      }
      e.f += c_->obj_weights[t] * v;
    }
    e.cE.resize(mE_);
    for (int j = 0; j < mE_; ++j) e.cE[j] = c_->eq_tapes[j].value(xs, work_.tw);
    e.cI.resize(mI_);
    for (int j = 0; j < mI_; ++j) e.cI[j] = c_->ineq_tapes[j].value(xs, work_.tw);
  } catch (const DomainError&) {
    return false;
  }
  if (!std::isfinite(e.f) || !e.cE.allFinite() || !e.cI.allFinite()) return false;
  if (with_grad && !e.gf.allFinite()) return false;
  e.ok = true;
  return true;
}

void Ipm::eval_jacobian(const Eigen::VectorXd& x) {
  jac_trip_.clear();
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  for (int j = 0; j < mE_; ++j) {
    const Tape& tape = c_->eq_tapes[j];
    tape.gradient(xs, work_.tw, work_.g.data());
    for (int i = 0; i < tape.nin(); ++i) {
      int fs = free_of_[tape.support()[i]];
      if (fs >= 0) jac_trip_.emplace_back(j, fs, work_.g[i]);
    }
  }
  for (int j = 0; j < mI_; ++j) {
    const Tape& tape = c_->ineq_tapes[j];
    tape.gradient(xs, work_.tw, work_.g.data());
    for (int i = 0; i < tape.nin(); ++i) {
      int fs = free_of_[tape.support()[i]];
      if (fs >= 0) jac_trip_.emplace_back(mE_ + j, fs, work_.g[i]);
    }
  }
}

bool Ipm::eval_hessian_values(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  hess_vals_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c_->hess_row.size()));
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  auto add_element = [&](const Tape& tape, const std::vector<int>& scatter, double weight) {
    if (weight == 0.0 || tape.nin() == 0) return;
    const int s = tape.nin();
    tape.hessian(xs, work_.tw, work_.g.data(), work_.h.data());
    int idx = 0;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j <= i; ++j) hess_vals_[scatter[idx++]] += weight * work_.h[i * s + j];
  };
  try {
    for (std::size_t t = 0; t < c_->obj_tapes.size(); ++t)
      add_element(c_->obj_tapes[t], c_->obj_scatter[t], c_->obj_weights[t]);
    for (int j = 0; j < mE_; ++j) add_element(c_->eq_tapes[j], c_->eq_scatter[j], y[j]);
    for (int j = 0; j < mI_; ++j)
      add_element(c_->ineq_tapes[j], c_->ineq_scatter[j], y[mE_ + j]);
  } catch (const DomainError&) {
    return false;
  }
  return hess_vals_.allFinite();
}

double Ipm::barrier(const Eigen::VectorXd& w, double f) const {
  double phi = f;
  for (int i = 0; i < N_; ++i) {
    if (std::isfinite(wl_[i])) {
      double g = w[i] - wl_[i];
      if (g <= 0.0) return kInf;
      phi -= mu_ * std::log(g);
    }
    if (std::isfinite(wu_[i])) {
      double g = wu_[i] - w[i];
      if (g <= 0.0) return kInf;
      phi -= mu_ * std::log(g);
    }
  }
  return phi;
}

Eigen::VectorXd Ipm::barrier_grad(const Eigen::VectorXd& w, const Eigen::VectorXd& gf) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(N_);
  g.head(nfree_) = gf;
  for (int i = 0; i < N_; ++i) {
    if (std::isfinite(wl_[i])) g[i] -= mu_ / (w[i] - wl_[i]);
    if (std::isfinite(wu_[i])) g[i] += mu_ / (wu_[i] - w[i]);
  }
  return g;
}

Eigen::VectorXd Ipm::constraint_vec(const Eval& e, const Eigen::VectorXd& w) const {
  Eigen::VectorXd c(m_);
  c.head(mE_) = e.cE;
  for (int k = 0; k < mI_; ++k) c[mE_ + k] = e.cI[k] + w[nfree_ + k];
  return c;
}

NlpSolution Ipm::finish(SolveStatus st, const Eigen::VectorXd& w, const Eval& e) {
  NlpSolution sol;
  sol.x = full_point(w);
  sol.objective = e.ok ? e.f : std::numeric_limits<double>::quiet_NaN();
  sol.status = st;
  sol.iterations = iters_;
  sol.y_eq = y_.size() ? Eigen::VectorXd(y_.head(mE_)) : Eigen::VectorXd::Zero(mE_);
  sol.lam_ineq = Eigen::VectorXd::Zero(mI_);
  if (y_.size())
    for (int k = 0; k < mI_; ++k) sol.lam_ineq[k] = std::max(0.0, y_[mE_ + k]);
  sol.z_lo = Eigen::VectorXd::Zero(nfull_);
  sol.z_up = Eigen::VectorXd::Zero(nfull_);
  for (int k = 0; k < nfree_; ++k) {
    sol.z_lo[free_[k]] = zl_.size() ? zl_[k] : 0.0;
    sol.z_up[free_[k]] = zu_.size() ? zu_[k] : 0.0;
  }
  sol.used_quasi_newton = opts_.quasi_newton;
  try {
    sol.constraint_violation = constraint_violation(p_, sol.x);
    sol.kkt = kkt_residual(p_, sol);
  } catch (const DomainError&) {
    sol.constraint_violation = kInf;
    sol.kkt = {kInf, kInf, kInf};
  }
  sol.trace_objective = trace_;
  return sol;
}

NlpSolution Ipm::run(const Eigen::VectorXd* x0) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  auto out_of_time = [&] {
    return opts_.wall_limit_sec > 0.0 &&
           std::chrono::duration<double>(clock::now() - t_start).count() > opts_.wall_limit_sec;
  };

  // ---- initial point -------------------------------------------------
  Eigen::VectorXd w(N_);
  for (int k = 0; k < nfree_; ++k) {
    double l = wl_[k], u = wu_[k];
    double v = x0 && x0->size() == nfull_ ? (*x0)[free_[k]] : 0.0;
    if (!x0 || x0->size() != nfull_) {
      if (std::isfinite(l) && std::isfinite(u)) v = 0.5 * (l + u);
      else if (std::isfinite(l)) v = l + 1.0;
      else if (std::isfinite(u)) v = u - 1.0;
    }
    if (std::isfinite(l) && std::isfinite(u)) {
      double push = std::min(1e-2 * std::max(1.0, std::abs(l)), 1e-2 * (u - l));
      double push_u = std::min(1e-2 * std::max(1.0, std::abs(u)), 1e-2 * (u - l));
      v = std::min(std::max(v, l + push), u - push_u);
    } else if (std::isfinite(l)) {
      v = std::max(v, l + 1e-2 * std::max(1.0, std::abs(l)));
    } else if (std::isfinite(u)) {
      v = std::min(v, u - 1e-2 * std::max(1.0, std::abs(u)));
    }
    w[k] = v;
  }

  Eval e;
  if (!eval_point(w, e, true)) return finish(SolveStatus::numeric_failure, w, e);
  for (int k = 0; k < mI_; ++k) w[nfree_ + k] = std::max(-e.cI[k], 1e-2);

  mu_ = opts_.mu0;
  y_ = Eigen::VectorXd::Zero(m_);
  zl_ = Eigen::VectorXd::Zero(N_);
  zu_ = Eigen::VectorXd::Zero(N_);
  for (int i = 0; i < N_; ++i) {
    if (std::isfinite(wl_[i])) zl_[i] = std::min(1e4, mu_ / (w[i] - wl_[i]));
    if (std::isfinite(wu_[i])) zu_[i] = std::min(1e4, mu_ / (wu_[i] - w[i]));
  }
  if (opts_.quasi_newton) bfgs_ = Eigen::MatrixXd::Identity(nfree_, nfree_);

  double nu = 1.0;  // l1 penalty weight
  int ls_failures = 0;

  const double mu_min = std::max(1e-12, opts_.tol / 100.0);

  for (iters_ = 0; iters_ < opts_.max_iter; ++iters_) {
    if (out_of_time()) return finish(SolveStatus::max_iter, w, e);

    Eigen::VectorXd x = full_point(w);
    eval_jacobian(x);
    Eigen::VectorXd cvec = constraint_vec(e, w);

    // dual residual: grad f + J^T y - z_l + z_u over w
    Eigen::VectorXd rd = Eigen::VectorXd::Zero(N_);
    rd.head(nfree_) = e.gf;
    for (int k = 0; k < mI_; ++k) rd[nfree_ + k] = y_[mE_ + k];
    for (const auto& t : jac_trip_) rd[t.col()] += y_[t.row()] * t.value();
    rd -= zl_;
    rd += zu_;

    double comp0 = 0.0, comp_mu = 0.0;
    std::size_t nbound = 0;
    for (int i = 0; i < N_; ++i) {
      if (std::isfinite(wl_[i])) {
        double c0 = zl_[i] * (w[i] - wl_[i]);
        comp0 = std::max(comp0, std::abs(c0));
        comp_mu = std::max(comp_mu, std::abs(c0 - mu_));
        ++nbound;
      }
      if (std::isfinite(wu_[i])) {
        double c0 = zu_[i] * (wu_[i] - w[i]);
        comp0 = std::max(comp0, std::abs(c0));
        comp_mu = std::max(comp_mu, std::abs(c0 - mu_));
        ++nbound;
      }
    }
    double sd = sd_scale(l1_norm(y_) + l1_norm(zl_) + l1_norm(zu_),
                         static_cast<std::size_t>(m_) + 2 * static_cast<std::size_t>(N_));
    double sc = sd_scale(l1_norm(zl_) + l1_norm(zu_), nbound);
    double rd_inf = inf_norm(rd);
    double rp_inf = inf_norm(cvec);
    double e0 = std::max({rd_inf / sd, rp_inf, comp0 / sc});
    double emu = std::max({rd_inf / sd, rp_inf, comp_mu / sc});

    if (opts_.record_trace) trace_.push_back(e.f);
    if (opts_.verbosity > 0)
      std::printf("ipm %4d f=%.8e rp=%.2e rd=%.2e mu=%.1e\n", iters_, e.f, rp_inf, rd_inf, mu_);

    if (e0 <= opts_.tol && rp_inf <= opts_.constr_tol)
      return finish(SolveStatus::optimal, w, e);

    if (emu <= kKappaEps * mu_ && mu_ > mu_min)
      mu_ = std::max(mu_min, std::min(kKappaMu * mu_, std::pow(mu_, kThetaMu)));

    // ---- KKT assembly -------------------------------------------------
    const int dim = N_ + m_;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(c_->hess_row.size() + jac_trip_.size() + static_cast<std::size_t>(dim) + mI_);
    double delta_c = std::max(1e-11, 1e-8 * std::pow(mu_, 0.25));
    bool hess_ok = true;
    if (opts_.quasi_newton) {
      for (int i = 0; i < nfree_; ++i)
        for (int j = 0; j <= i; ++j)
          if (bfgs_(i, j) != 0.0) trip.emplace_back(i, j, bfgs_(i, j));
    } else {
      hess_ok = eval_hessian_values(x, y_);
      if (hess_ok) {
        for (std::size_t k = 0; k < c_->hess_row.size(); ++k) {
          int fi = free_of_[c_->hess_row[k]];
          int fj = free_of_[c_->hess_col[k]];
          if (fi >= 0 && fj >= 0 && hess_vals_[static_cast<Eigen::Index>(k)] != 0.0)
            trip.emplace_back(fi, fj, hess_vals_[static_cast<Eigen::Index>(k)]);
        }
      }
    }
    if (!hess_ok) return finish(SolveStatus::numeric_failure, w, e);
    // barrier curvature on the diagonal
    std::vector<double> sigma(N_, 0.0);
    for (int i = 0; i < N_; ++i) {
      if (std::isfinite(wl_[i])) sigma[i] += zl_[i] / (w[i] - wl_[i]);
      if (std::isfinite(wu_[i])) sigma[i] += zu_[i] / (wu_[i] - w[i]);
    }
    for (const auto& t : jac_trip_) trip.emplace_back(N_ + t.row(), t.col(), t.value());
    for (int k = 0; k < mI_; ++k) trip.emplace_back(N_ + mE_ + k, nfree_ + k, 1.0);

    Eigen::VectorXd rhs(dim);
    rhs.head(N_) = -(barrier_grad(w, e.gf));
    for (const auto& t : jac_trip_) rhs[t.col()] -= y_[t.row()] * t.value();
    for (int k = 0; k < mI_; ++k) rhs[nfree_ + k] -= y_[mE_ + k];
    rhs.tail(m_) = -cvec;

    Eigen::VectorXd step;
    double delta_w = 0.0;
    bool solved = false;
    Eigen::SparseMatrix<double> K(dim, dim);
    for (int attempt = 0; attempt < 30 && !solved; ++attempt) {
      std::vector<Eigen::Triplet<double>> t2 = trip;
      for (int i = 0; i < N_; ++i) t2.emplace_back(i, i, sigma[i] + delta_w);
      for (int r = 0; r < m_; ++r) t2.emplace_back(N_ + r, N_ + r, -delta_c);
      K.setFromTriplets(t2.begin(), t2.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
      ldlt.compute(K);
      bool ok = ldlt.info() == Eigen::Success;
      int pos = 0, neg = 0, bad = 0;
      if (ok) {
        const auto& D = ldlt.vectorD();
        for (Eigen::Index i = 0; i < D.size(); ++i) {
          double d = D[i];
          if (!std::isfinite(d) || d == 0.0) ++bad;
          else if (d > 0.0) ++pos;
          else ++neg;
        }
        ok = bad == 0 && pos == N_ && neg == m_;
      }
      if (ok) {
        step = ldlt.solve(rhs);
        ok = step.allFinite();
      }
      if (ok) {
        solved = true;
        delta_w_last_ = delta_w;
      } else {
        delta_w = delta_w == 0.0
                      ? (delta_w_last_ == 0.0 ? 1e-4 : std::max(1e-20, delta_w_last_ / 3.0))
                      : delta_w * 10.0;
        if (delta_w > 1e40) break;
      }
    }
    if (!solved) return finish(SolveStatus::numeric_failure, w, e);

    Eigen::VectorXd dw = step.head(N_);
    Eigen::VectorXd dy = step.tail(m_);

    // bound-multiplier steps
    Eigen::VectorXd dzl = Eigen::VectorXd::Zero(N_), dzu = Eigen::VectorXd::Zero(N_);
    for (int i = 0; i < N_; ++i) {
      if (std::isfinite(wl_[i]))
        dzl[i] = (mu_ - zl_[i] * dw[i]) / (w[i] - wl_[i]) - zl_[i];
      if (std::isfinite(wu_[i]))
        dzu[i] = (mu_ + zu_[i] * dw[i]) / (wu_[i] - w[i]) - zu_[i];
    }

    double tau = std::max(0.99, 1.0 - mu_);
    double alpha_max = 1.0, alpha_z = 1.0;
    for (int i = 0; i < N_; ++i) {
      if (std::isfinite(wl_[i]) && dw[i] < 0.0)
        alpha_max = std::min(alpha_max, -tau * (w[i] - wl_[i]) / dw[i]);
      if (std::isfinite(wu_[i]) && dw[i] > 0.0)
        alpha_max = std::min(alpha_max, tau * (wu_[i] - w[i]) / dw[i]);
      if (dzl[i] < 0.0) alpha_z = std::min(alpha_z, -tau * zl_[i] / dzl[i]);
      if (dzu[i] < 0.0) alpha_z = std::min(alpha_z, -tau * zu_[i] / dzu[i]);
    }

    // ---- l1 merit line search -----------------------------------------
    double c_l1 = l1_norm(cvec);
    Eigen::VectorXd gphi = barrier_grad(w, e.gf);
    double pred = gphi.dot(dw);
    if (c_l1 > 1e-14) {
      double req = pred > 0.0 ? pred / (0.5 * c_l1) : 0.0;
      double ydual = inf_norm(y_ + dy);
      nu = std::max({nu, 1.2 * req, 1.01 * ydual + 1e-4});
    }
    double descent = pred - nu * c_l1;
    double merit0 = barrier(w, e.f) + nu * c_l1;

    double alpha = alpha_max;
    bool accepted = false;
    Eval etrial;
    Eigen::VectorXd wtrial;
    for (int bt = 0; bt < 40 && !accepted; ++bt) {
      wtrial = w + alpha * dw;
      if (eval_point(wtrial, etrial, true)) {
        double merit = barrier(wtrial, etrial.f) + nu * l1_norm(constraint_vec(etrial, wtrial));
        if (std::isfinite(merit) &&
            merit <= merit0 + kArmijo * alpha * std::min(descent, 0.0)) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
      if (alpha < 1e-12) break;
    }

    if (!accepted) {
      ++ls_failures;
      if (inf_norm(cvec) > opts_.constr_tol && opts_.allow_restoration) {
        NlpSolution failed;
        SolveStatus st;
        if (restoration(w, e, &failed, &st)) {
          // restored: reset slacks and duals, continue from the new point
          for (int k = 0; k < mI_; ++k) w[nfree_ + k] = std::max(-e.cI[k], 1e-2);
          y_.setZero();
          for (int i = 0; i < N_; ++i) {
            double gl = std::isfinite(wl_[i]) ? w[i] - wl_[i] : 1.0;
            double gu = std::isfinite(wu_[i]) ? wu_[i] - w[i] : 1.0;
            zl_[i] = std::isfinite(wl_[i]) ? std::min(1e4, mu_ / gl) : 0.0;
            zu_[i] = std::isfinite(wu_[i]) ? std::min(1e4, mu_ / gu) : 0.0;
          }
          nu = 1.0;
          ls_failures = 0;
          continue;
        }
        return failed;
      }
      if (ls_failures >= 3) return finish(SolveStatus::numeric_failure, w, e);
      // feasible but stuck: shrink mu and retry
      mu_ = std::max(mu_min, 0.1 * mu_);
      continue;
    }
    ls_failures = 0;

    // Damped BFGS on the Lagrangian gradient, multipliers held at new values.
    if (opts_.quasi_newton) {
      Eigen::VectorXd y_new = y_ + alpha * dy;
      Eigen::VectorXd gl_old = e.gf;
      for (const auto& t : jac_trip_) gl_old[t.col()] += y_new[t.row()] * t.value();
      eval_jacobian(full_point(wtrial));
      Eigen::VectorXd gl_new = etrial.gf;
      for (const auto& t : jac_trip_) gl_new[t.col()] += y_new[t.row()] * t.value();
      Eigen::VectorXd sk = (wtrial - w).head(nfree_);
      Eigen::VectorXd yk = gl_new - gl_old;
      double sBs = sk.dot(bfgs_ * sk);
      double sy = sk.dot(yk);
      if (sBs > 1e-16 && sk.norm() > 1e-14) {
        double theta = sy >= 0.2 * sBs ? 1.0 : 0.8 * sBs / (sBs - sy);
        Eigen::VectorXd r = theta * yk + (1.0 - theta) * (bfgs_ * sk);
        bfgs_ -= (bfgs_ * sk) * (sk.transpose() * bfgs_) / sBs;
        bfgs_ += r * r.transpose() / sk.dot(r);
      }
    }

    w = wtrial;
    e = etrial;
    y_ += alpha * dy;
    zl_ += alpha_z * dzl;
    zu_ += alpha_z * dzu;
    for (int i = 0; i < N_; ++i) {
      if (std::isfinite(wl_[i])) {
        double g = w[i] - wl_[i];
        zl_[i] = std::min(std::max(zl_[i], mu_ / (kKappaSigma * g)), kKappaSigma * mu_ / g);
      }
      if (std::isfinite(wu_[i])) {
        double g = wu_[i] - w[i];
        zu_[i] = std::min(std::max(zu_[i], mu_ / (kKappaSigma * g)), kKappaSigma * mu_ / g);
      }
    }
  }
  return finish(SolveStatus::max_iter, w, e);
}

// Runs the l1 restoration NLP. Returns true when the point was restored and
// the main loop should continue; fills *out and returns false on a definitive
// outcome (local infeasibility certificate or numeric failure).
bool Ipm::restoration(Eigen::VectorXd& w, Eval& e, NlpSolution* out, SolveStatus* st) {
  ++resto_count_;
  if (resto_count_ > 4) {
    *out = finish(SolveStatus::numeric_failure, w, e);
    *st = SolveStatus::numeric_failure;
    return false;
  }
  Eigen::VectorXd x_ref = full_point(w);
  double entry_viol = std::max(e.cE.size() ? e.cE.lpNorm<Eigen::Infinity>() : 0.0,
                               e.cI.size() ? e.cI.maxCoeff() : 0.0);

  NlpBuilder b;
  for (int i = 0; i < nfull_; ++i) b.add_var(lb_[i], ub_[i]);
  const double zeta = std::min(1e-3, std::sqrt(std::max(mu_, 1e-10)));
  for (int k = 0; k < nfree_; ++k) {
    int i = free_[k];
    double d = 1.0 / std::max(1.0, std::abs(x_ref[i]));
    b.add_objective_term(0.5 * zeta * d * square(b.var(i) - x_ref[i]));
  }
  std::vector<int> pv, nv, qv;
  for (int j = 0; j < mE_; ++j) {
    int pj = b.add_var(0.0, kInf);
    int nj = b.add_var(0.0, kInf);
    pv.push_back(pj);
    nv.push_back(nj);
    b.add_objective_term(b.var(pj) + b.var(nj));
    b.add_eq(p_.eq[j] - b.var(pj) + b.var(nj));
  }
  for (int j = 0; j < mI_; ++j) {
    int qj = b.add_var(0.0, kInf);
    qv.push_back(qj);
    b.add_objective_term(b.var(qj));
    b.add_ineq(p_.ineq[j] - b.var(qj));
  }
  NlpProblem rp = b.build();

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(rp.n);
  x0.head(nfull_) = x_ref;
  for (int j = 0; j < mE_; ++j) {
    x0[pv[j]] = std::max(e.cE[j], 0.0) + 1e-3;
    x0[nv[j]] = x0[pv[j]] - e.cE[j];
  }
  for (int j = 0; j < mI_; ++j) x0[qv[j]] = std::max(e.cI[j], 0.0) + 1e-3;

  SolveOptions ro;
  ro.tol = std::max(opts_.tol, 1e-8);
  ro.constr_tol = ro.tol;
  ro.max_iter = 400;
  ro.allow_restoration = false;
  ro.retry_quasi_newton = false;
  ro.quasi_newton = opts_.quasi_newton;
  NlpSolution rsol = solve_nlp(rp, ro, &x0);

  if (rsol.status == SolveStatus::numeric_failure) {
    *out = finish(SolveStatus::numeric_failure, w, e);
    *st = SolveStatus::numeric_failure;
    return false;
  }

  Eigen::VectorXd x_new = rsol.x.head(nfull_);
  double viol = 0.0;
  {
    Eigen::VectorXd wtmp = w;
    for (int k = 0; k < nfree_; ++k) wtmp[k] = x_new[free_[k]];
    Eval etmp;
    if (eval_point(wtmp, etmp, true)) {
      viol = std::max(etmp.cE.size() ? etmp.cE.lpNorm<Eigen::Infinity>() : 0.0,
                      etmp.cI.size() ? etmp.cI.maxCoeff() : 0.0);
      if (viol < std::max(0.9 * entry_viol, opts_.constr_tol)) {
        w = wtmp;
        e = etmp;
        return true;
      }
      // Restoration converged without reaching feasibility: certificate.
      if (rsol.status == SolveStatus::optimal) {
        e = etmp;
        Eigen::VectorXd wfin = wtmp;
        *out = finish(SolveStatus::locally_infeasible, wfin, e);
        out->certified_infeasibility = viol;
        out->restoration_stationarity = rsol.kkt.stationarity;
        *st = SolveStatus::locally_infeasible;
        return false;
      }
    }
  }
  *out = finish(SolveStatus::numeric_failure, w, e);
  *st = SolveStatus::numeric_failure;
  return false;
}

}  // namespace

NlpSolution solve_nlp(const NlpProblem& p, const SolveOptions& opts, const Eigen::VectorXd* x0,
                      const Eigen::VectorXd* lb_override, const Eigen::VectorXd* ub_override) {
  Eigen::VectorXd lb = lb_override ? *lb_override : p.lb;
  Eigen::VectorXd ub = ub_override ? *ub_override : p.ub;
  if (lb.size() != p.n || ub.size() != p.n)
    throw std::invalid_argument("solve_nlp: bound size mismatch");
  Ipm ipm(p, opts, lb, ub);
  NlpSolution sol = ipm.run(x0);
  if (sol.status == SolveStatus::numeric_failure && opts.retry_quasi_newton &&
      !opts.quasi_newton) {
    SolveOptions o2 = opts;
    o2.quasi_newton = true;
    o2.retry_quasi_newton = false;
    Ipm ipm2(p, o2, lb, ub);
    NlpSolution sol2 = ipm2.run(x0);
    sol2.iterations += sol.iterations;
    if (sol2.status == SolveStatus::optimal || sol2.status == SolveStatus::locally_infeasible)
      return sol2;
    return sol.kkt.worst() <= sol2.kkt.worst() ? sol : sol2;
  }
  return sol;
}

}  // namespace trigopt
