// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors

#include "trigopt/tape.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace trigopt {

namespace {

struct CompileCtx {
  std::unordered_map<const ExprNode*, int> slot;
  std::unordered_map<int, int> var_slot;
};

}  // namespace

Tape Tape::compile(const Expr& root) {
  Tape t;
  t.support_ = root.support();
  CompileCtx ctx;
  for (std::size_t i = 0; i < t.support_.size(); ++i)
    ctx.var_slot[t.support_[i]] = static_cast<int>(i);
  int next = static_cast<int>(t.support_.size());

  // Post-order emission with an explicit stack.
  std::vector<std::pair<const ExprNode*, bool>> stack{{&root.node(), false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (ctx.slot.count(n)) continue;
    if (n->op == Op::Var) {
      ctx.slot[n] = ctx.var_slot.at(n->var);
      continue;
    }
    if (!expanded) {
      stack.push_back({n, true});
      for (const auto& a : n->args) {
        if (!ctx.slot.count(a.get())) stack.push_back({a.get(), false});
      }
      continue;
    }
    Instr ins;
    ins.op = n->op;
    ins.out = next++;
    switch (n->op) {
      case Op::Const: ins.p = n->value; break;
      case Op::Pow:
        ins.p = n->value;
        ins.a = ctx.slot.at(n->args[0].get());
        break;
      case Op::Mul:
        ins.a = ctx.slot.at(n->args[0].get());
        ins.b = ctx.slot.at(n->args[1].get());
        break;
      case Op::Sum: {
        ins.p = n->bias;
        ins.argpos = static_cast<int>(t.argslots_.size());
        ins.nargs = static_cast<int>(n->args.size());
        for (std::size_t i = 0; i < n->args.size(); ++i) {
          t.argslots_.push_back(ctx.slot.at(n->args[i].get()));
          t.coeffs_.push_back(n->coeffs[i]);
        }
        break;
      }
      case Op::SumSq:
      case Op::Norm: {
        ins.argpos = static_cast<int>(t.argslots_.size());
        ins.nargs = static_cast<int>(n->args.size());
        for (const auto& a : n->args) {
          t.argslots_.push_back(ctx.slot.at(a.get()));
          t.coeffs_.push_back(0.0);  // keeps argslots_/coeffs_ index-aligned
        }
        break;
      }
      default: ins.a = ctx.slot.at(n->args[0].get()); break;
    }
    ctx.slot[n] = ins.out;
    t.code_.push_back(ins);
  }
  t.out_ = ctx.slot.at(&root.node());
  t.nslots_ = static_cast<std::size_t>(next);
  return t;
}

void Tape::load_inputs(std::span<const double> x, TapeWork& ws) const {
  ws.fit(nslots_);
  for (std::size_t i = 0; i < support_.size(); ++i) ws.w[i] = x[support_[i]];
}

void Tape::forward(TapeWork& ws) const {
  auto& w = ws.w;
  for (const Instr& I : code_) {
    switch (I.op) {
      case Op::Const: w[I.out] = I.p; break;
      case Op::Sum: {
        double v = I.p;
        for (int k = 0; k < I.nargs; ++k) v += coeffs_[I.argpos + k] * w[argslots_[I.argpos + k]];
        w[I.out] = v;
        break;
      }
      case Op::Mul: w[I.out] = w[I.a] * w[I.b]; break;
      case Op::Pow: w[I.out] = std::pow(w[I.a], I.p); break;
      case Op::Neg: w[I.out] = -w[I.a]; break;
      case Op::Sin: w[I.out] = std::sin(w[I.a]); break;
      case Op::Cos: w[I.out] = std::cos(w[I.a]); break;
      case Op::Tan:
        if (std::abs(std::cos(w[I.a])) < kTanGuard) throw DomainError("tan evaluated at a pole");
        w[I.out] = std::tan(w[I.a]);
        break;
      case Op::Exp: w[I.out] = std::exp(w[I.a]); break;
      case Op::Sqrt:
        if (w[I.a] < 0.0) throw DomainError("sqrt of negative value");
        w[I.out] = std::sqrt(w[I.a]);
        break;
      case Op::SumSq: {
        double v = 0.0;
        for (int k = 0; k < I.nargs; ++k) {
          double a = w[argslots_[I.argpos + k]];
          v += a * a;
        }
        w[I.out] = v;
        break;
      }
      case Op::Norm: {
        double v = 0.0;
        for (int k = 0; k < I.nargs; ++k) {
          double a = w[argslots_[I.argpos + k]];
          v += a * a;
        }
        w[I.out] = std::sqrt(v);
        break;
      }
      case Op::Var: break;
    }
  }
}

void Tape::forward_tangent(TapeWork& ws) const {
  auto& w = ws.w;
  auto& wd = ws.wd;
  for (const Instr& I : code_) {
    switch (I.op) {
      case Op::Const: wd[I.out] = 0.0; break;
      case Op::Sum: {
        double v = 0.0;
        for (int k = 0; k < I.nargs; ++k) v += coeffs_[I.argpos + k] * wd[argslots_[I.argpos + k]];
        wd[I.out] = v;
        break;
      }
      case Op::Mul: wd[I.out] = wd[I.a] * w[I.b] + w[I.a] * wd[I.b]; break;
      case Op::Pow: wd[I.out] = I.p * std::pow(w[I.a], I.p - 1.0) * wd[I.a]; break;
      case Op::Neg: wd[I.out] = -wd[I.a]; break;
      case Op::Sin: wd[I.out] = std::cos(w[I.a]) * wd[I.a]; break;
      case Op::Cos: wd[I.out] = -std::sin(w[I.a]) * wd[I.a]; break;
      case Op::Tan: wd[I.out] = (1.0 + w[I.out] * w[I.out]) * wd[I.a]; break;
      case Op::Exp: wd[I.out] = w[I.out] * wd[I.a]; break;
      case Op::Sqrt:
        if (w[I.a] < kNormGuard) throw DomainError("sqrt derivative at guarded zero");
        wd[I.out] = wd[I.a] / (2.0 * w[I.out]);
        break;
      case Op::SumSq: {
        double v = 0.0;
        for (int k = 0; k < I.nargs; ++k) {
          int s = argslots_[I.argpos + k];
          v += 2.0 * w[s] * wd[s];
        }
        wd[I.out] = v;
        break;
      }
      case Op::Norm: {
        if (w[I.out] < kNormGuard) throw DomainError("norm derivative at guarded zero");
        double v = 0.0;
        for (int k = 0; k < I.nargs; ++k) {
          int s = argslots_[I.argpos + k];
          v += w[s] * wd[s];
        }
        wd[I.out] = v / w[I.out];
        break;
      }
      case Op::Var: break;
    }
  }
}

void Tape::reverse(TapeWork& ws, bool second_order) const {
  auto& w = ws.w;
  auto& wd = ws.wd;
  auto& b = ws.b;
  auto& bd = ws.bd;
  for (auto it = code_.rbegin(); it != code_.rend(); ++it) {
    const Instr& I = *it;
    double bo = b[I.out];
    double bdo = second_order ? bd[I.out] : 0.0;
    if (bo == 0.0 && bdo == 0.0) continue;
    switch (I.op) {
      case Op::Const: break;
      case Op::Sum:
        for (int k = 0; k < I.nargs; ++k) {
          int s = argslots_[I.argpos + k];
          double c = coeffs_[I.argpos + k];
          b[s] += bo * c;
          if (second_order) bd[s] += bdo * c;
        }
        break;
      case Op::Mul:
        b[I.a] += bo * w[I.b];
        b[I.b] += bo * w[I.a];
        if (second_order) {
          bd[I.a] += bdo * w[I.b] + bo * wd[I.b];
          bd[I.b] += bdo * w[I.a] + bo * wd[I.a];
        }
        break;
      case Op::Pow: {
        double d = I.p * std::pow(w[I.a], I.p - 1.0);
        b[I.a] += bo * d;
        if (second_order)
          bd[I.a] += bdo * d + bo * I.p * (I.p - 1.0) * std::pow(w[I.a], I.p - 2.0) * wd[I.a];
        break;
      }
      case Op::Neg:
        b[I.a] -= bo;
        if (second_order) bd[I.a] -= bdo;
        break;
      case Op::Sin: {
        double d = std::cos(w[I.a]);
        b[I.a] += bo * d;
        if (second_order) bd[I.a] += bdo * d - bo * std::sin(w[I.a]) * wd[I.a];
        break;
      }
      case Op::Cos: {
        double d = -std::sin(w[I.a]);
        b[I.a] += bo * d;
        if (second_order) bd[I.a] += bdo * d - bo * std::cos(w[I.a]) * wd[I.a];
        break;
      }
      case Op::Tan: {
        double d = 1.0 + w[I.out] * w[I.out];
        b[I.a] += bo * d;
        if (second_order) bd[I.a] += bdo * d + bo * 2.0 * w[I.out] * wd[I.out];
        break;
      }
      case Op::Exp: {
        double d = w[I.out];
        b[I.a] += bo * d;
        if (second_order) bd[I.a] += bdo * d + bo * wd[I.out];
        break;
      }
      case Op::Sqrt: {
        if (w[I.a] < kNormGuard) throw DomainError("sqrt derivative at guarded zero");
        double d = 0.5 / w[I.out];
        b[I.a] += bo * d;
        if (second_order) bd[I.a] += bdo * d - bo * 0.5 * wd[I.out] / (w[I.out] * w[I.out]);
        break;
      }
      case Op::SumSq:
        for (int k = 0; k < I.nargs; ++k) {
          int s = argslots_[I.argpos + k];
          b[s] += bo * 2.0 * w[s];
          if (second_order) bd[s] += bdo * 2.0 * w[s] + bo * 2.0 * wd[s];
        }
        break;
      case Op::Norm: {
        double r = w[I.out];
        if (r < kNormGuard) throw DomainError("norm derivative at guarded zero");
        double rd = second_order ? wd[I.out] : 0.0;
        for (int k = 0; k < I.nargs; ++k) {
          int s = argslots_[I.argpos + k];
          double d = w[s] / r;
          b[s] += bo * d;
          if (second_order) bd[s] += bdo * d + bo * (wd[s] / r - w[s] * rd / (r * r));
        }
        break;
      }
      case Op::Var: break;
    }
  }
}

double Tape::value(std::span<const double> x, TapeWork& ws) const {
  load_inputs(x, ws);
  forward(ws);
  return ws.w[out_];
}

double Tape::gradient(std::span<const double> x, TapeWork& ws, double* g) const {
  load_inputs(x, ws);
  forward(ws);
  std::fill(ws.b.begin(), ws.b.begin() + nslots_, 0.0);
  ws.b[out_] = 1.0;
  reverse(ws, false);
  for (int i = 0; i < nin(); ++i) g[i] = ws.b[i];
  return ws.w[out_];
}

double Tape::hessian(std::span<const double> x, TapeWork& ws, double* g, double* h) const {
  const int m = nin();
  load_inputs(x, ws);
  forward(ws);
  for (int j = 0; j < m; ++j) {
    std::fill(ws.wd.begin(), ws.wd.begin() + nslots_, 0.0);
    ws.wd[j] = 1.0;
    forward_tangent(ws);
    std::fill(ws.b.begin(), ws.b.begin() + nslots_, 0.0);
    std::fill(ws.bd.begin(), ws.bd.begin() + nslots_, 0.0);
    ws.b[out_] = 1.0;
    reverse(ws, true);
    if (j == 0)
      for (int i = 0; i < m; ++i) g[i] = ws.b[i];
    for (int i = 0; i < m; ++i) h[i * m + j] = ws.bd[i];
  }
  // enforce exact symmetry against round-off asymmetry in the sweeps
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double s = 0.5 * (h[i * m + j] + h[j * m + i]);
      h[i * m + j] = s;
      h[j * m + i] = s;
    }
  return ws.w[out_];
}

}  // namespace trigopt
