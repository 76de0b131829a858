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
 * Check oracle and the ancilla-interference marking operator.
 *
 * For each equation i the circuit computes the residual f_i(x) into a zero
 * register, runs the check oracle into a second zero register, applies
 * M_j (a Toffoli from control j_i and the check bit onto the (|0>-|1>)/sqrt2
 * kickback ancilla), and uncomputes both registers. Control i then carries
 * (|0> + (-1)^{check_i(x)} |1>)/sqrt2 and a final Hadamard on the controls
 * sends every branch with a failing check away from |0...0>.
 *
 * `mark_faithful` runs that gate sequence on a dense vector; `mark_collapsed`
 * applies its net effect (a projector onto the marked basis states) directly.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "qnl/error.hpp"
#include "qnl/fixedpoint.hpp"
#include "qnl/polysys.hpp"
#include "qnl/statesim.hpp"

namespace qnl {

/// Thread count for embarrassingly parallel per-basis loops. Results never
/// depend on it.
struct ExecPolicy {
  unsigned threads = 1;
};

inline const std::string kRangeHint =
    "no grid point passes every check; change the range of the initial registers (--int-bits) or loosen the "
    "threshold";

class MarkingSpec {
 public:
  MarkingSpec(FixedFormat variable_format, ResultFormat result_format, int threshold_log2)
      : vars_(variable_format), result_(result_format), threshold_log2_(threshold_log2) {
    if (vars_.is_signed()) throw Error("variable registers are unsigned");
  }

  /// Threshold given as lambda: the leading lambda integer bits of |residual|
  /// must be zero, i.e. tau = 2^(result integer bits - lambda).
  static MarkingSpec from_lambda(FixedFormat vars, ResultFormat result, int lambda) {
    return MarkingSpec(vars, result, result.format().integer_bits() - lambda);
  }

  const FixedFormat& variable_format() const noexcept { return vars_; }
  const ResultFormat& result_format() const noexcept { return result_; }
  int threshold_log2() const noexcept { return threshold_log2_; }
  int lambda() const noexcept { return result_.format().integer_bits() - threshold_log2_; }
  Rational tau() const { return pow2(threshold_log2_); }

  /// |q| / 2^frac < 2^rho, on the scaled residual q.
  bool passes_scaled(std::int64_t q) const {
    std::uint64_t mag = q < 0 ? static_cast<std::uint64_t>(-(q + 1)) + 1 : static_cast<std::uint64_t>(q);
    int e = threshold_log2_ + result_.format().fractional_bits();
    if (e < 0) return mag == 0;
    if (e >= 63) return true;
    return mag < (std::uint64_t{1} << e);
  }

 private:
  FixedFormat vars_;
  ResultFormat result_;
  int threshold_log2_;
};

/// 0 when |decode(residual)| < tau, else 1.
inline int check_oracle(const BitWord& residual, const MarkingSpec& spec) {
  return abs(decode(residual)) < spec.tau() ? 0 : 1;
}

struct MarkReport {
  std::uint64_t marked_count = 0;
  std::uint64_t total_states = 0;
  /// Squared norm of the marked branch before renormalization.
  double success_probability = 0.0;

  Rational uniform_success_ratio() const { return Rational(BigInt(marked_count), BigInt(total_states)); }
};

namespace detail {

inline std::vector<std::uint64_t> split_index(std::uint64_t index, std::size_t n, int bits) {
  std::vector<std::uint64_t> raws(n);
  std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  for (std::size_t j = 0; j < n; ++j) raws[n - 1 - j] = (index >> (bits * j)) & mask;
  return raws;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 4096) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Per-basis-state check outcomes over the whole variable grid.
class MarkingTable {
 public:
  MarkingTable(const PolynomialSystem& sys, const MarkingSpec& spec, ExecPolicy policy = {})
      : n_(sys.n()), bits_(spec.variable_format().total_bits()) {
    if (static_cast<long>(n_) * bits_ > RegisterLayout::kDefaultQubitCap) {
      throw CapExceededError("enumerating " + std::to_string(n_ * bits_) + " variable qubits exceeds the cap of " +
                             std::to_string(RegisterLayout::kDefaultQubitCap));
    }
    std::vector<ResidualOracle> oracles;
    for (std::size_t i = 0; i < n_; ++i) {
      oracles.emplace_back(sys, i, spec.variable_format(), spec.result_format());
    }
    std::size_t total = std::size_t{1} << (n_ * bits_);
    checks_.assign(total * n_, 0);
    detail::parallel_for(total, policy.threads, [&](std::size_t idx) {
      auto raws = detail::split_index(idx, n_, bits_);
      for (std::size_t i = 0; i < n_; ++i) {
        checks_[idx * n_ + i] = spec.passes_scaled(oracles[i].evaluate_scaled(raws)) ? 0 : 1;
      }
    });
    marked_.assign(total, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      bool all = true;
      for (std::size_t i = 0; i < n_; ++i) all = all && checks_[idx * n_ + i] == 0;
      marked_[idx] = all ? 1 : 0;
      if (all) ++count_;
    }
  }

  std::size_t n() const noexcept { return n_; }
  int bits() const noexcept { return bits_; }
  std::size_t total_states() const noexcept { return marked_.size(); }
  std::uint64_t marked_count() const noexcept { return count_; }
  bool marked(std::size_t index) const { return marked_[index] != 0; }
  int check(std::size_t index, std::size_t eq) const { return checks_[index * n_ + eq]; }
  const std::vector<std::uint8_t>& flags() const noexcept { return marked_; }

 private:
  std::size_t n_;
  int bits_;
  std::vector<std::uint8_t> checks_;
  std::vector<std::uint8_t> marked_;
  std::uint64_t count_ = 0;
};

/// Brute force over the grid with the rational oracle and check_oracle: the
/// reference that MarkingTable is tested against. Basis order.
inline std::vector<std::vector<std::uint64_t>> marked_set(const PolynomialSystem& sys, const MarkingSpec& spec) {
  const std::size_t n = sys.n();
  const FixedFormat& vars = spec.variable_format();
  const int bits = vars.total_bits();
  if (static_cast<long>(n) * bits > RegisterLayout::kDefaultQubitCap) {
    throw CapExceededError("enumerating " + std::to_string(n * bits) + " variable qubits exceeds the cap of " +
                           std::to_string(RegisterLayout::kDefaultQubitCap));
  }
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<BitWord> words(n, BitWord{0, vars});
  for (std::size_t idx = 0; idx < (std::size_t{1} << (n * bits)); ++idx) {
    auto raws = detail::split_index(idx, n, bits);
    for (std::size_t j = 0; j < n; ++j) words[j] = make_word(raws[j], vars);
    bool all = true;
    for (std::size_t i = 0; i < n && all; ++i) {
      all = check_oracle(eval_oracle(sys, i, words, spec.result_format()), spec) == 0;
    }
    if (all) out.push_back(std::move(raws));
  }
  return out;
}

/// Fast-path marked points from a table, same order as marked_set.
inline std::vector<std::vector<std::uint64_t>> marked_points(const MarkingTable& table) {
  std::vector<std::vector<std::uint64_t>> out;
  for (std::size_t idx = 0; idx < table.total_states(); ++idx) {
    if (table.marked(idx)) out.push_back(detail::split_index(idx, table.n(), table.bits()));
  }
  return out;
}

inline std::vector<Rational> decode_point(std::span<const std::uint64_t> raws, const FixedFormat& vars) {
  std::vector<Rational> xs;
  for (auto r : raws) xs.push_back(decode(make_word(r, vars)));
  return xs;
}

/// Layout of the variable registers x0..x{n-1}.
inline RegisterLayout variable_layout(std::size_t n, int bits) {
  std::vector<Register> regs;
  for (std::size_t j = 0; j < n; ++j) regs.push_back({"x" + std::to_string(j), bits});
  return RegisterLayout(std::move(regs));
}

inline std::set<std::string> variable_names(std::size_t n) {
  std::set<std::string> s;
  for (std::size_t j = 0; j < n; ++j) s.insert("x" + std::to_string(j));
  return s;
}

struct MarkedState {
  QuantumState state;
  MarkReport report;
};

/// Net action of marking + Hadamard + projecting the controls onto |0...0>:
/// keep the amplitudes of marked basis states, renormalize.
inline MarkedState mark_collapsed(const QuantumState& state, const MarkingTable& table) {
  if (state.size() != table.total_states()) throw Error("state is not over the variable registers");
  std::vector<Complex> out(state.size());
  double p = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (table.marked(i)) {
      out[i] = state[i];
      p += std::norm(state[i]);
    }
  }
  MarkReport report{table.marked_count(), table.total_states(), p};
  if (p <= kZeroProbability) throw EmptyBranchError(kRangeHint);
  double r = 1.0 / std::sqrt(p);
  for (auto& a : out) a *= r;
  return {QuantumState(state.layout(), std::move(out)), report};
}

inline MarkedState mark_collapsed(const QuantumState& state, const PolynomialSystem& sys, const MarkingSpec& spec,
                                  ExecPolicy policy = {}) {
  return mark_collapsed(state, MarkingTable(sys, spec, policy));
}

// ---------------------------------------------------------------------------
// Faithful circuit

inline const std::string kCheckRegister = "check";
inline const std::string kAncillaRegister = "ancilla";
inline const std::string kControlRegister = "controls";

/// Control i sits at bit n-1-i of the controls register so that control 0
/// is its leftmost qubit.
inline int control_bit(std::size_t n, std::size_t i) { return static_cast<int>(n - 1 - i); }

struct FaithfulResult {
  /// Full state after the final Hadamard on the controls (before projection).
  QuantumState state;
  MarkReport report;
};

namespace detail {

// Kickback ancilla and controls for the gate sequence; the residual register
// is carried per branch in `residual` (U_f only ever permutes basis values
// controlled on x, so it stays a basis value in every branch).
struct FaithfulRun {
  // Applies the per-equation sequence to `state`; `point_of` maps a basis
  // index to its variable-grid index.
  template <typename PointOf, typename ResidualOf>
  static void run(QuantumState& state, std::size_t n, PointOf&& point_of, ResidualOf&& residual_of,
                  const MarkingSpec& spec) {
    const auto& layout = state.layout();
    // Kickback ancilla (|0>-|1>)/sqrt2 and controls in |+>^n.
    apply_x(state, kAncillaRegister, 0);
    apply_qft(state, kAncillaRegister);
    apply_hadamard(state, kControlRegister);

    int check_shift = layout.shift(kCheckRegister);
    std::size_t check_mask = std::size_t{1} << check_shift;
    std::vector<std::int64_t> residual;  // scratch register, per branch point
    for (std::size_t i = 0; i < n; ++i) {
      // U_f: residual register |0> -> |f_i(x)>.
      std::size_t branches = state.size();
      residual.assign(branches, 0);
      for (std::size_t b = 0; b < branches; ++b) residual[b] ^= residual_of(point_of(b), i);
      // U_fbar: check register |0> -> |check(f_i(x))>.
      auto flip_check = [&](std::size_t b) {
        return spec.passes_scaled(residual[b & ~check_mask]) ? b : (b ^ check_mask);
      };
      apply_permutation(state, flip_check);
      // sum_j M_j |j><j|: M_1 XORs the check bit into the ancilla, M_0 = I.
      apply_controlled_x(state, {{kControlRegister, control_bit(n, i)}, {kCheckRegister, 0}},
                         {kAncillaRegister, 0});
      // U_fbar^-1 then U_f^-1.
      apply_permutation(state, flip_check);
      for (std::size_t b = 0; b < branches; ++b) residual[b] ^= residual_of(point_of(b), i);
      for (std::size_t b = 0; b < branches; ++b) {
        if (residual[b] != 0) throw ConsistencyError("residual register not restored to |0>");
        if ((b & check_mask) && std::abs(state[b]) > 1e-12) {
          throw ConsistencyError("check register not restored to |0>");
        }
      }
    }
    apply_hadamard(state, kControlRegister);
  }
};

inline std::vector<Register> scratch_registers(std::size_t n) {
  return {{kCheckRegister, 1}, {kAncillaRegister, 1}, {kControlRegister, static_cast<int>(n)}};
}

}  // namespace detail

/// Literal gate sequence over uniform variable registers. Layout:
/// x0..x{n-1}, check, ancilla, controls.
inline FaithfulResult mark_faithful(const PolynomialSystem& sys, const MarkingSpec& spec, ExecPolicy policy = {}) {
  const std::size_t n = sys.n();
  const int bits = spec.variable_format().total_bits();
  std::vector<Register> regs = variable_layout(n, bits).registers();
  for (auto& r : detail::scratch_registers(n)) regs.push_back(r);
  RegisterLayout layout(std::move(regs));
  QuantumState state = init_uniform(layout, variable_names(n));

  MarkingTable table(sys, spec, policy);
  std::vector<ResidualOracle> oracles;
  for (std::size_t i = 0; i < n; ++i) oracles.emplace_back(sys, i, spec.variable_format(), spec.result_format());
  const int scratch_bits = 2 + static_cast<int>(n);
  auto point_of = [&](std::size_t b) { return b >> scratch_bits; };
  auto residual_of = [&](std::size_t x, std::size_t i) {
    return oracles[i].evaluate_scaled(detail::split_index(x, n, bits));
  };
  detail::FaithfulRun::run(state, n, point_of, residual_of, spec);

  double p = 0.0;
  for (std::size_t b = 0; b < state.size(); ++b) {
    if (layout.value(b, kControlRegister) == 0) p += std::norm(state[b]);
  }
  return {std::move(state), MarkReport{table.marked_count(), table.total_states(), p}};
}

/// Same gate sequence for one variable basis state; returns the state of
/// (check, ancilla, controls). Scales to any grid size.
inline QuantumState mark_faithful_basis(const PolynomialSystem& sys, const MarkingSpec& spec,
                                        std::span<const std::uint64_t> raws) {
  const std::size_t n = sys.n();
  if (raws.size() != n) throw Error("point length does not match variable count");
  QuantumState state(RegisterLayout(detail::scratch_registers(n)));
  std::vector<ResidualOracle> oracles;
  for (std::size_t i = 0; i < n; ++i) oracles.emplace_back(sys, i, spec.variable_format(), spec.result_format());
  std::vector<std::int64_t> residuals;
  for (std::size_t i = 0; i < n; ++i) residuals.push_back(oracles[i].evaluate_scaled(raws));
  detail::FaithfulRun::run(
      state, n, [](std::size_t) { return std::size_t{0}; },
      [&](std::size_t, std::size_t i) { return residuals[i]; }, spec);
  return state;
}

/// Ideal post-projection state: marked variable amplitudes (x) |0>_check
/// (x) kickback ancilla (x) |0...0>_controls.
inline QuantumState expected_projected(const QuantumState& collapsed_vars, std::size_t n) {
  QuantumState scratch(RegisterLayout(detail::scratch_registers(n)));
  apply_x(scratch, kAncillaRegister, 0);
  apply_qft(scratch, kAncillaRegister);
  return tensor(collapsed_vars, scratch);
}

}  // namespace qnl
