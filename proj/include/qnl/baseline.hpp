// Copyright 2026 The qnl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Classical Newton iteration x <- x - damping * J(x)^{-1} f(x), used as the
 * comparator for the refinement stage and as an independent root oracle.
 */

#pragma once

#include <cmath>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "qnl/error.hpp"
#include "qnl/polysys.hpp"
#include "qnl/rational.hpp"

namespace qnl {

struct NewtonConfig {
  double tol_residual = 1e-12;
  int max_iters = 50;
  double damping = 1.0;
};

struct NewtonIterate {
  std::vector<double> point;
  double max_residual;
};

struct NewtonResult {
  std::vector<double> solution;
  std::vector<NewtonIterate> trace;
  int iterations = 0;
  /// max_i |f_i| at the solution, evaluated exactly on its double values.
  Rational exact_max_residual;
  bool verified = false;
};

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
/// Throws SingularJacobianError when a pivot falls below 1e-12.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    }
    if (std::abs(A[piv][col]) < 1e-12) throw SingularJacobianError("singular Jacobian (pivot below 1e-12)");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
    x[i] = s / A[i][i];
  }
  return x;
}

namespace detail {

inline std::string render_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
  os << ")";
  return os.str();
}

}  // namespace detail

inline NewtonResult newton_solve(const PolynomialSystem& sys, std::span<const double> x0,
                                 const NewtonConfig& config = {}) {
  const std::size_t n = sys.n();
  if (x0.size() != n) throw Error("start point length does not match variable count");
  if (!(config.tol_residual > 0)) throw Error("tol_residual must be positive");
  auto J = jacobian(sys);
  std::vector<double> x(x0.begin(), x0.end());
  NewtonResult out;

  auto residuals = [&](std::span<const double> p) {
    std::vector<double> f;
    for (const auto& eq : sys.equations()) f.push_back(eq.evaluate_double(p));
    return f;
  };
  auto max_abs = [](const std::vector<double>& v) {
    double m = 0;
    for (double d : v) m = std::max(m, std::abs(d));
    return m;
  };

  std::vector<double> f = residuals(x);
  out.trace.push_back({x, max_abs(f)});
  while (out.trace.back().max_residual >= config.tol_residual) {
    if (out.iterations >= config.max_iters) {
      std::ostringstream os;
      os << "Newton did not converge in " << config.max_iters << " iterations; residual trace:";
      for (const auto& it : out.trace) os << " " << it.max_residual;
      throw NonConvergenceError(os.str());
    }
    std::vector<std::vector<double>> A(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) A[i][j] = J[i][j].evaluate_double(x);
    }
    std::vector<double> step;
    try {
      step = solve_linear(std::move(A), f);
    } catch (const SingularJacobianError&) {
      throw SingularJacobianError("singular Jacobian at iterate " + std::to_string(out.iterations) + " " +
                                  detail::render_point(x));
    }
    for (std::size_t j = 0; j < n; ++j) x[j] -= config.damping * step[j];
    for (double v : x) {
      if (!std::isfinite(v)) throw NonConvergenceError("Newton iterate diverged to a non-finite value");
    }
    ++out.iterations;
    f = residuals(x);
    out.trace.push_back({x, max_abs(f)});
  }
  out.solution = x;
  std::vector<Rational> exact;
  for (double v : x) exact.push_back(from_double(v));
  Rational worst = 0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, abs(evaluate(sys, i, exact)));
  out.exact_max_residual = worst;
  out.verified = worst < from_double(config.tol_residual);
  return out;
}

}  // namespace qnl
