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
 * Refinement of a coarse candidate by gradient descent on F = sum_i f_i^2,
 * with gradients either exact (analytic) or estimated by simulating
 * phase-kickback gradient estimation over a small grid around the point.
 *
 * Gradient estimation. Each variable j gets a g-qubit offset register y_j
 * in uniform superposition over a window of width L centred on x*, grid
 * spacing delta = L / 2^g. The oracle kicks back the phase
 *
 *     phi(y) = 2 pi * 2^g / (s L) * F(x* + delta (y - 2^{g-1})),
 *
 * which is linear in y_j with slope 2 pi (dF/dx_j) / s to first order. An
 * inverse QFT on y_j then peaks at k_j = 2^g (dF/dx_j) / s, read in signed
 * form (k >= 2^{g-1} means k - 2^g), so the estimate is k_j * s / 2^g with
 * resolution s / 2^g and range [-s/2, s/2).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnl/error.hpp"
#include "qnl/polysys.hpp"
#include "qnl/rational.hpp"
#include "qnl/statesim.hpp"

namespace qnl {

/// Largest g * n the gradient simulation will attempt.
inline constexpr int kGradientQubitCap = 20;

struct GradientConfig {
  int grid_bits = 6;
  Rational window = pow2(-6);
  /// Derivative bound s; chosen per call from interval bounds when unset.
  std::optional<Rational> derivative_bound;
  /// log2 of the kickback register size N'. Cost accounting only: phases are
  /// applied as exact complex exponentials.
  int phase_bits = 6;
  Rational alpha = pow2(-11);
  int max_iters = 32;
  Rational tol_gradnorm = pow2(-13);
  int accuracy_bits = 13;
  /// Extra fractional bits kept on iterates beyond accuracy_bits.
  int guard_bits = 16;
};

enum class GradientSource { analytic, quantum_sim };

inline std::string to_string(GradientSource s) {
  return s == GradientSource::analytic ? "analytic" : "quantum";
}

/// F with its gradient and Hessian as explicit polynomials.
class Objective {
 public:
  explicit Objective(const PolynomialSystem& sys) : sys_(&sys), F_(sum_of_squares(sys)) {
    const std::size_t n = sys.n();
    for (std::size_t j = 0; j < n; ++j) grad_.push_back(F_.derivative(j));
    hess_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) hess_[j].push_back(grad_[j].derivative(k));
    }
    jac_ = jacobian(sys);
  }

  const PolynomialSystem& system() const noexcept { return *sys_; }
  std::size_t n() const noexcept { return sys_->n(); }

  Rational value(std::span<const Rational> x) const { return evaluate_F(*sys_, x); }

  std::vector<Rational> gradient(std::span<const Rational> x) const {
    const std::size_t n = sys_->n();
    std::vector<Rational> f;
    for (const auto& eq : sys_->equations()) f.push_back(eq.evaluate(x));
    std::vector<Rational> g(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (f[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) g[j] += 2 * f[i] * jac_[i][j].evaluate(x);
    }
    return g;
  }

  double value_double(std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& eq : sys_->equations()) {
      double v = eq.evaluate_double(x);
      acc += v * v;
    }
    return acc;
  }

  static Box window_box(std::span<const Rational> x, const Rational& window) {
    Box box;
    for (const auto& xj : x) box.push_back({xj - window / 2, xj + window / 2});
    return box;
  }

  /// sup over the box of |dF/dx_j|, per j.
  std::vector<Rational> gradient_bounds(const Box& box) const {
    std::vector<Rational> out;
    for (const auto& p : grad_) out.push_back(bound_abs(p, box));
    return out;
  }

  /// C_j = sum_k sup over the box of |d2F / dx_j dx_k|.
  std::vector<Rational> curvature_bounds(const Box& box) const {
    std::vector<Rational> out;
    for (const auto& row : hess_) {
      Rational c = 0;
      for (const auto& p : row) c += bound_abs(p, box);
      out.push_back(c);
    }
    return out;
  }

  const Polynomial& polynomial() const noexcept { return F_; }

 private:
  const PolynomialSystem* sys_;
  Polynomial F_;
  std::vector<Polynomial> grad_;
  std::vector<std::vector<Polynomial>> hess_;
  std::vector<std::vector<Polynomial>> jac_;
};

struct GradientEstimate {
  std::vector<Rational> estimate;
  /// Signed modal QFT outcome per register.
  std::vector<std::int64_t> outcomes;
  std::vector<double> modal_probability;
  Rational derivative_bound;
  /// Modal outcome at the edge of the signed range, or the window bound on
  /// |dF/dx_j| reaching s/2: the estimate may have wrapped around.
  bool wraparound_warning = false;
};

/// Smallest power of two s with s/2 > bound.
inline Rational auto_derivative_bound(const Rational& bound) {
  Rational s = 1;
  while (!(s / 2 > bound)) s *= 2;
  while (s / 4 > bound && s > pow2(-30)) s /= 2;
  return s;
}

/// Simulated gradient estimation of an arbitrary scalar function `fn`
/// (double(std::span<const double>)) around x_star.
template <typename Fn>
GradientEstimate jordan_gradient_of(Fn&& fn, std::span<const Rational> x_star, int grid_bits, const Rational& window,
                                    const Rational& derivative_bound) {
  const std::size_t n = x_star.size();
  if (grid_bits < 1) throw Error("grid_bits must be >= 1");
  if (static_cast<int>(n) * grid_bits > kGradientQubitCap) {
    throw CapExceededError("gradient grid needs " + std::to_string(n * grid_bits) + " qubits, cap is " +
                           std::to_string(kGradientQubitCap));
  }
  if (window <= 0 || derivative_bound <= 0) throw Error("window and derivative bound must be positive");

  std::vector<Register> regs;
  for (std::size_t j = 0; j < n; ++j) regs.push_back({"y" + std::to_string(j), grid_bits});
  QuantumState state{RegisterLayout(std::move(regs))};

  const std::size_t per = std::size_t{1} << grid_bits;
  const double delta = to_double(window) / static_cast<double>(per);
  const double scale = 2.0 * std::numbers::pi * static_cast<double>(per) / to_double(derivative_bound * window);
  const double amp = 1.0 / std::sqrt(static_cast<double>(state.size()));
  std::vector<double> center;
  for (const auto& x : x_star) center.push_back(to_double(x));
  const double f0 = fn(std::span<const double>(center));

  std::vector<double> point(n);
  for (std::size_t idx = 0; idx < state.size(); ++idx) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t y = (idx >> (grid_bits * (n - 1 - j))) & (per - 1);
      point[j] = center[j] + delta * (static_cast<double>(y) - static_cast<double>(per / 2));
    }
    // Phase relative to F(x*) drops a global phase and keeps the argument small.
    state[idx] = std::polar(amp, scale * (fn(std::span<const double>(point)) - f0));
  }

  GradientEstimate out;
  out.derivative_bound = derivative_bound;
  for (std::size_t j = 0; j < n; ++j) apply_qft(state, "y" + std::to_string(j), /*inverse=*/true);
  const std::int64_t half = static_cast<std::int64_t>(per / 2);
  for (std::size_t j = 0; j < n; ++j) {
    auto p = marginal(state, "y" + std::to_string(j));
    auto it = std::max_element(p.begin(), p.end());
    auto k = static_cast<std::int64_t>(it - p.begin());
    if (k >= half) k -= static_cast<std::int64_t>(per);
    out.outcomes.push_back(k);
    out.modal_probability.push_back(*it);
    if (k <= -half + 1 || k >= half - 1) out.wraparound_warning = true;
    out.estimate.push_back(Rational(BigInt(k)) * derivative_bound / Rational(BigInt(per)));
  }
  return out;
}

/// Gradient estimate of F for a system at x_star.
inline GradientEstimate jordan_gradient(const Objective& objective, std::span<const Rational> x_star,
                                        const GradientConfig& config) {
  Box box = Objective::window_box(x_star, config.window);
  auto bounds = objective.gradient_bounds(box);
  Rational worst = *std::max_element(bounds.begin(), bounds.end());
  Rational s = config.derivative_bound.value_or(auto_derivative_bound(worst));
  auto fn = [&](std::span<const double> x) { return objective.value_double(x); };
  GradientEstimate est = jordan_gradient_of(fn, x_star, config.grid_bits, config.window, s);
  if (!(s / 2 > worst)) est.wraparound_warning = true;
  return est;
}

inline GradientEstimate jordan_gradient(const PolynomialSystem& sys, std::span<const Rational> x_star,
                                        const GradientConfig& config) {
  return jordan_gradient(Objective(sys), x_star, config);
}

/// x - alpha * gradient (alpha is the step magnitude).
inline std::vector<Rational> descent_step(std::span<const Rational> x, std::span<const Rational> gradient,
                                          const Rational& alpha) {
  if (x.size() != gradient.size()) throw Error("point and gradient lengths differ");
  std::vector<Rational> out;
  for (std::size_t j = 0; j < x.size(); ++j) out.push_back(x[j] - alpha * gradient[j]);
  return out;
}

struct RefineIterate {
  std::vector<Rational> point;
  Rational F;
  std::vector<Rational> gradient;
};

struct RefineTrace {
  std::vector<RefineIterate> iterates;
  bool converged = false;
  int iterations_used = 0;
  /// Step size after any divergence-guard halving.
  Rational final_alpha;
  bool wraparound_warning = false;
};

struct RefineResult {
  /// Final iterate floored onto the 2^-accuracy_bits grid.
  std::vector<Rational> solution;
  RefineTrace trace;
};

inline Rational max_abs(std::span<const Rational> v) {
  Rational m = 0;
  for (const auto& x : v) m = std::max(m, abs(x));
  return m;
}

/// Descent until ||grad||_inf < tol or max_iters steps. If F rises three
/// steps in a row alpha is halved once; a further rise stops the run
/// unconverged.
inline RefineResult refine(const PolynomialSystem& sys, std::span<const Rational> x0, const GradientConfig& config,
                           GradientSource source = GradientSource::analytic) {
  if (x0.size() != sys.n()) throw Error("start point length does not match variable count");
  const Objective objective(sys);
  const int work_bits = config.accuracy_bits + config.guard_bits;
  RefineResult result;
  RefineTrace& trace = result.trace;
  Rational alpha = config.alpha;
  bool halved = false;
  int rises = 0;
  Rational window = config.window;

  std::vector<Rational> x;
  for (const auto& v : x0) x.push_back(floor_to_grid(v, work_bits));
  Rational F = objective.value(x);
  for (int it = 0;; ++it) {
    std::vector<Rational> g;
    // Quantum readout consistent with a zero gradient at the tolerance.
    bool indistinguishable = false;
    if (source == GradientSource::analytic) {
      g = objective.gradient(x);
    } else {
      // Small readouts mean s is dominated by the window's curvature term:
      // zoom the window (s follows it) until the outcomes use a quarter of
      // the signed range or the readout uncertainty is under the tolerance.
      // The uncertainty per component is s/2^(g-1) plus the slope spread
      // C_j * L/2 across the window.
      for (;;) {
        GradientConfig local = config;
        local.window = window;
        auto est = jordan_gradient(objective, x, local);
        if (est.wraparound_warning && !config.derivative_bound) {
          // A tight automatic bound puts the readout on the edge; retry with one more octave.
          local.derivative_bound = est.derivative_bound * 2;
          est = jordan_gradient(objective, x, local);
        }
        trace.wraparound_warning = trace.wraparound_warning || est.wraparound_warning;
        g = std::move(est.estimate);
        auto C = objective.curvature_bounds(Objective::window_box(x, window));
        Rational worst = 0;
        bool within = true;
        for (std::size_t j = 0; j < g.size(); ++j) {
          Rational u = est.derivative_bound / pow2(config.grid_bits - 1) + C[j] * window / 2;
          worst = std::max(worst, u);
          within = within && abs(g[j]) <= u;
        }
        indistinguishable = within && worst < config.tol_gradnorm;
        std::int64_t reach = 0;
        for (auto k : est.outcomes) reach = std::max<std::int64_t>(reach, k < 0 ? -k : k);
        if (config.derivative_bound || window <= pow2(-work_bits)) break;
        if (4 * reach >= (std::int64_t{1} << config.grid_bits) || worst < config.tol_gradnorm) break;
        window /= 2;
      }
    }
    trace.iterates.push_back({x, F, g});
    if (max_abs(g) < config.tol_gradnorm || indistinguishable) {
      trace.converged = true;
      break;
    }
    if (it >= config.max_iters) break;

    std::vector<Rational> next = descent_step(x, g, alpha);
    for (auto& v : next) v = floor_to_grid(v, work_bits);
    Rational F_next = objective.value(next);
    x = std::move(next);
    trace.iterations_used = it + 1;
    bool rose = F_next > F;
    F = F_next;
    if (!rose) {
      rises = 0;
      continue;
    }
    if (halved) {
      trace.iterates.push_back({x, F, objective.gradient(x)});
      break;
    }
    if (++rises == 3) {
      alpha /= 2;
      halved = true;
      rises = 0;
    }
  }
  trace.final_alpha = alpha;
  for (const auto& v : x) result.solution.push_back(floor_to_grid(v, config.accuracy_bits));
  return result;
}

}  // namespace qnl
