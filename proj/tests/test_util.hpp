// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testutil {

// Centered finite differences with per-coordinate scaled step.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h0 = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double h = h0 * std::max(1.0, std::abs(x[i]));
    double xi = x[i];
    x[i] = xi + h;
    double fp = f(x);
    x[i] = xi - h;
    double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace testutil
