// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/expr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <unordered_map>

namespace trigopt {

namespace {

std::atomic<std::uint64_t> g_next_id{1};

NodePtr make_node(ExprNode n) {
  n.id = g_next_id.fetch_add(1, std::memory_order_relaxed);
  return std::make_shared<const ExprNode>(std::move(n));
}

Expr unary(Op op, const Expr& a) {
  ExprNode n;
  n.op = op;
  n.args = {a.ptr()};
  return Expr(make_node(std::move(n)));
}

bool all_const(std::span<const Expr> parts) {
  return std::all_of(parts.begin(), parts.end(), [](const Expr& e) { return e.is_const(); });
}

}  // namespace

Expr Expr::constant(double v) {
  ExprNode n;
  n.op = Op::Const;
  n.value = v;
  return Expr(make_node(std::move(n)));
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("variable index must be nonnegative");
  ExprNode n;
  n.op = Op::Var;
  n.var = index;
  return Expr(make_node(std::move(n)));
}

std::vector<int> Expr::support() const {
  std::set<int> vars;
  std::unordered_map<const ExprNode*, bool> seen;
  std::vector<const ExprNode*> stack{node_.get()};
  while (!stack.empty()) {
    const ExprNode* n = stack.back();
    stack.pop_back();
    if (!n || seen.count(n)) continue;
    seen[n] = true;
    if (n->op == Op::Var) vars.insert(n->var);
    for (const auto& a : n->args) stack.push_back(a.get());
  }
  return {vars.begin(), vars.end()};
}

Expr affine(std::span<const Expr> parts, std::span<const double> coeffs, double bias) {
  if (parts.size() != coeffs.size()) throw std::invalid_argument("affine: size mismatch");
  ExprNode n;
  n.op = Op::Sum;
  n.bias = bias;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (coeffs[i] == 0.0) continue;
    if (parts[i].is_const()) {
      n.bias += coeffs[i] * parts[i].const_value();
      continue;
    }
    // Fold nested sums one level so long chains built with += stay shallow.
    const ExprNode& pn = parts[i].node();
    if (pn.op == Op::Sum) {
      n.bias += coeffs[i] * pn.bias;
      for (std::size_t j = 0; j < pn.args.size(); ++j) {
        n.args.push_back(pn.args[j]);
        n.coeffs.push_back(coeffs[i] * pn.coeffs[j]);
      }
    } else {
      n.args.push_back(parts[i].ptr());
      n.coeffs.push_back(coeffs[i]);
    }
  }
  if (n.args.empty()) return Expr::constant(n.bias);
  if (n.args.size() == 1 && n.coeffs[0] == 1.0 && n.bias == 0.0) return Expr(n.args[0]);
  return Expr(make_node(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) {
  const Expr parts[] = {a, b};
  const double c[] = {1.0, 1.0};
  return affine(parts, c, 0.0);
}

Expr operator-(const Expr& a, const Expr& b) {
  const Expr parts[] = {a, b};
  const double c[] = {1.0, -1.0};
  return affine(parts, c, 0.0);
}

Expr operator-(const Expr& a) {
  if (a.is_const()) return Expr::constant(-a.const_value());
  return unary(Op::Neg, a);
}

Expr operator*(double c, const Expr& a) {
  const Expr parts[] = {a};
  const double cs[] = {c};
  return affine(parts, cs, 0.0);
}

Expr operator+(const Expr& a, double c) {
  const Expr parts[] = {a};
  const double cs[] = {1.0};
  return affine(parts, cs, c);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const()) return a.const_value() * b;
  if (b.is_const()) return b.const_value() * a;
  ExprNode n;
  n.op = Op::Mul;
  n.args = {a.ptr(), b.ptr()};
  return Expr(make_node(std::move(n)));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_const()) return a / b.const_value();
  return a * pow(b, -1.0);
}

Expr pow(const Expr& a, double exponent) {
  if (exponent == 1.0) return a;
  if (exponent == 0.0) return Expr::constant(1.0);
  if (a.is_const()) return Expr::constant(std::pow(a.const_value(), exponent));
  ExprNode n;
  n.op = Op::Pow;
  n.value = exponent;
  n.args = {a.ptr()};
  return Expr(make_node(std::move(n)));
}

Expr sin(const Expr& a) {
  return a.is_const() ? Expr::constant(std::sin(a.const_value())) : unary(Op::Sin, a);
}
Expr cos(const Expr& a) {
  return a.is_const() ? Expr::constant(std::cos(a.const_value())) : unary(Op::Cos, a);
}
Expr tan(const Expr& a) {
  return a.is_const() ? Expr::constant(std::tan(a.const_value())) : unary(Op::Tan, a);
}
Expr exp(const Expr& a) {
  return a.is_const() ? Expr::constant(std::exp(a.const_value())) : unary(Op::Exp, a);
}
Expr sqrt(const Expr& a) {
  if (a.is_const()) {
    if (a.const_value() < 0.0) throw DomainError("sqrt of negative constant");
    return Expr::constant(std::sqrt(a.const_value()));
  }
  return unary(Op::Sqrt, a);
}

Expr square(const Expr& a) { return pow(a, 2.0); }

Expr sum_sq(std::span<const Expr> parts) {
  if (parts.empty()) return Expr::constant(0.0);
  if (all_const(parts)) {
    double s = 0.0;
    for (const auto& p : parts) s += p.const_value() * p.const_value();
    return Expr::constant(s);
  }
  ExprNode n;
  n.op = Op::SumSq;
  for (const auto& p : parts) n.args.push_back(p.ptr());
  return Expr(make_node(std::move(n)));
}

Expr norm2(std::span<const Expr> parts) {
  if (parts.empty()) return Expr::constant(0.0);
  if (all_const(parts)) {
    double s = 0.0;
    for (const auto& p : parts) s += p.const_value() * p.const_value();
    return Expr::constant(std::sqrt(s));
  }
  ExprNode n;
  n.op = Op::Norm;
  for (const auto& p : parts) n.args.push_back(p.ptr());
  return Expr(make_node(std::move(n)));
}

namespace {

double eval_rec(const ExprNode* n, std::span<const double> x,
                std::unordered_map<const ExprNode*, double>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  double v = 0.0;
  switch (n->op) {
    case Op::Const: v = n->value; break;
    case Op::Var:
      if (n->var >= static_cast<int>(x.size())) throw std::out_of_range("eval: point too short");
      v = x[n->var];
      break;
    case Op::Sum: {
      v = n->bias;
      for (std::size_t i = 0; i < n->args.size(); ++i)
        v += n->coeffs[i] * eval_rec(n->args[i].get(), x, memo);
      break;
    }
    case Op::Mul:
      v = eval_rec(n->args[0].get(), x, memo) * eval_rec(n->args[1].get(), x, memo);
      break;
    case Op::Pow: v = std::pow(eval_rec(n->args[0].get(), x, memo), n->value); break;
    case Op::Neg: v = -eval_rec(n->args[0].get(), x, memo); break;
    case Op::Sin: v = std::sin(eval_rec(n->args[0].get(), x, memo)); break;
    case Op::Cos: v = std::cos(eval_rec(n->args[0].get(), x, memo)); break;
    case Op::Tan: {
      double a = eval_rec(n->args[0].get(), x, memo);
      if (std::abs(std::cos(a)) < kTanGuard) throw DomainError("tan evaluated at a pole");
      v = std::tan(a);
      break;
    }
    case Op::Exp: v = std::exp(eval_rec(n->args[0].get(), x, memo)); break;
    case Op::Sqrt: {
      double a = eval_rec(n->args[0].get(), x, memo);
      if (a < 0.0) throw DomainError("sqrt of negative value");
      v = std::sqrt(a);
      break;
    }
    case Op::SumSq: {
      for (const auto& arg : n->args) {
        double a = eval_rec(arg.get(), x, memo);
        v += a * a;
      }
      break;
    }
    case Op::Norm: {
      for (const auto& arg : n->args) {
        double a = eval_rec(arg.get(), x, memo);
        v += a * a;
      }
      v = std::sqrt(v);
      break;
    }
  }
  memo[n] = v;
  return v;
}

Interval iv(double a, double b) { return {std::min(a, b), std::max(a, b)}; }

Interval iv_mul(Interval a, Interval b) {
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {std::min(std::min(p1, p2), std::min(p3, p4)),
          std::max(std::max(p1, p2), std::max(p3, p4))};
}

Interval iv_sq(Interval a) {
  double l2 = a.lo * a.lo, h2 = a.hi * a.hi;
  if (a.lo <= 0.0 && a.hi >= 0.0) return {0.0, std::max(l2, h2)};
  return {std::min(l2, h2), std::max(l2, h2)};
}

constexpr double kPi = 3.14159265358979323846;

// Range of sin over [lo, hi].
Interval iv_sin(Interval a) {
  if (a.hi - a.lo >= 2.0 * kPi) return {-1.0, 1.0};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  // peaks at pi/2 + 2k*pi, troughs at -pi/2 + 2k*pi
  double k0 = std::ceil((a.lo - kPi / 2) / (2 * kPi));
  if (kPi / 2 + 2 * kPi * k0 <= a.hi) hi = 1.0;
  double k1 = std::ceil((a.lo + kPi / 2) / (2 * kPi));
  if (-kPi / 2 + 2 * kPi * k1 <= a.hi) lo = -1.0;
  return {lo, hi};
}

Interval iv_rec(const ExprNode* n, std::span<const double> xlo, std::span<const double> xhi,
                std::unordered_map<const ExprNode*, Interval>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  constexpr double inf = std::numeric_limits<double>::infinity();
  Interval v{};
  switch (n->op) {
    case Op::Const: v = {n->value, n->value}; break;
    case Op::Var: v = {xlo[n->var], xhi[n->var]}; break;
    case Op::Sum: {
      v = {n->bias, n->bias};
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        Interval a = iv_rec(n->args[i].get(), xlo, xhi, memo);
        double c = n->coeffs[i];
        v.lo += c >= 0 ? c * a.lo : c * a.hi;
        v.hi += c >= 0 ? c * a.hi : c * a.lo;
      }
      break;
    }
    case Op::Mul:
      v = iv_mul(iv_rec(n->args[0].get(), xlo, xhi, memo),
                 iv_rec(n->args[1].get(), xlo, xhi, memo));
      break;
    case Op::Pow: {
      Interval a = iv_rec(n->args[0].get(), xlo, xhi, memo);
      double p = n->value;
      double ip;
      bool integer = std::modf(p, &ip) == 0.0;
      if (p == 2.0) {
        v = iv_sq(a);
      } else if (integer && p > 0) {
        if (std::fmod(p, 2.0) == 0.0)
          v = a.lo <= 0 && a.hi >= 0
                  ? Interval{0.0, std::max(std::pow(a.lo, p), std::pow(a.hi, p))}
                  : iv(std::pow(a.lo, p), std::pow(a.hi, p));
        else
          v = {std::pow(a.lo, p), std::pow(a.hi, p)};
      } else if (a.lo > 0.0) {
        v = iv(std::pow(a.lo, p), std::pow(a.hi, p));
      } else if (integer && p < 0 && (a.hi < 0.0)) {
        v = iv(std::pow(a.lo, p), std::pow(a.hi, p));
      } else {
        v = {-inf, inf};  // crosses a singularity or fractional power of negatives
      }
      break;
    }
    case Op::Neg: {
      Interval a = iv_rec(n->args[0].get(), xlo, xhi, memo);
      v = {-a.hi, -a.lo};
      break;
    }
    case Op::Sin: v = iv_sin(iv_rec(n->args[0].get(), xlo, xhi, memo)); break;
    case Op::Cos: {
      Interval a = iv_rec(n->args[0].get(), xlo, xhi, memo);
      v = iv_sin({a.lo + kPi / 2, a.hi + kPi / 2});
      break;
    }
    case Op::Tan: {
      Interval a = iv_rec(n->args[0].get(), xlo, xhi, memo);
      double k = std::ceil((a.lo - kPi / 2) / kPi);
      if (kPi / 2 + kPi * k <= a.hi)
        v = {-inf, inf};
      else
        v = {std::tan(a.lo), std::tan(a.hi)};
      break;
    }
    case Op::Exp: {
      Interval a = iv_rec(n->args[0].get(), xlo, xhi, memo);
      v = {std::exp(a.lo), std::exp(a.hi)};
      break;
    }
    case Op::Sqrt: {
      Interval a = iv_rec(n->args[0].get(), xlo, xhi, memo);
      if (a.hi < 0.0) throw DomainError("sqrt over a fully negative interval");
      v = {std::sqrt(std::max(0.0, a.lo)), std::sqrt(std::max(0.0, a.hi))};
      break;
    }
    case Op::SumSq: {
      v = {0.0, 0.0};
      for (const auto& arg : n->args) {
        Interval a = iv_sq(iv_rec(arg.get(), xlo, xhi, memo));
        v.lo += a.lo;
        v.hi += a.hi;
      }
      break;
    }
    case Op::Norm: {
      v = {0.0, 0.0};
      for (const auto& arg : n->args) {
        Interval a = iv_sq(iv_rec(arg.get(), xlo, xhi, memo));
        v.lo += a.lo;
        v.hi += a.hi;
      }
      v = {std::sqrt(v.lo), std::sqrt(v.hi)};
      break;
    }
  }
  memo[n] = v;
  return v;
}

void collect_rec(const NodePtr& n, double w, TermList& out) {
  switch (n->op) {
    case Op::Const: out.bias += w * n->value; return;
    case Op::Neg: collect_rec(n->args[0], -w, out); return;
    case Op::Sum: {
      out.bias += w * n->bias;
      for (std::size_t i = 0; i < n->args.size(); ++i)
        collect_rec(n->args[i], w * n->coeffs[i], out);
      return;
    }
    default:
      out.weights.push_back(w);
      out.roots.push_back(Expr(n));
      return;
  }
}

}  // namespace

double eval(const Expr& e, std::span<const double> x) {
  std::unordered_map<const ExprNode*, double> memo;
  return eval_rec(&e.node(), x, memo);
}

Interval interval_eval(const Expr& e, std::span<const double> lo, std::span<const double> hi) {
  std::unordered_map<const ExprNode*, Interval> memo;
  return iv_rec(&e.node(), lo, hi, memo);
}

TermList collect_terms(const Expr& e) {
  TermList out;
  collect_rec(e.ptr(), 1.0, out);
  return out;
}

}  // namespace trigopt
