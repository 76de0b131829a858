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
 * Amplitude amplification of the marked branch, and repeat-until-success
 * sampling as the unamplified alternative.
 *
 * The marked state lives in span{|x>|phi_x>}: every variable basis value x
 * carries a fixed scratch/control factor phi_x, and phi_x has controls |0>
 * exactly when x is marked. U0 and U1 both preserve that form, so the
 * reflections act on the variable-register coefficients alone; the state
 * passed around here is that coefficient vector.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qnl/error.hpp"
#include "qnl/marking.hpp"
#include "qnl/statesim.hpp"

namespace qnl {

enum class AmplifyMode { exact_count, fixed_sqrt_lambda, repeat_until_success };

inline std::string to_string(AmplifyMode m) {
  switch (m) {
    case AmplifyMode::exact_count: return "exact";
    case AmplifyMode::fixed_sqrt_lambda: return "sqrt-lambda";
    case AmplifyMode::repeat_until_success: return "repeat";
  }
  return "?";
}

struct AmplifySpec {
  AmplifyMode mode = AmplifyMode::exact_count;
  int lambda = 0;
  /// Attempt cap per accepted shot (resampling and repeat mode).
  int max_iterations = 1000;
  std::uint64_t seed = 0x5eed;
};

/// One U1 * U0 pair: phase-flip marked amplitudes, then reflect about |Psi>.
inline void grover_step(QuantumState& state, const std::vector<std::uint8_t>& marked, const QuantumState& reference) {
  if (marked.size() != state.size() || reference.size() != state.size()) {
    throw Error("grover_step operands disagree on dimension");
  }
  auto& a = state.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (marked[i]) a[i] = -a[i];
  }
  Complex overlap = inner_product(reference, state);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= 2.0 * overlap * reference[i];
}

inline double marked_probability(const QuantumState& state, const std::vector<std::uint8_t>& marked) {
  double p = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (marked[i]) p += std::norm(state[i]);
  }
  return p;
}

/// floor(pi / (4 asin(sqrt(M/T)))), the step count maximizing success.
inline int optimal_iterations(std::uint64_t marked_count, std::uint64_t total_states) {
  if (marked_count == 0) throw EmptyBranchError(kRangeHint);
  if (marked_count > total_states) throw Error("marked count exceeds the number of states");
  double theta = std::asin(std::sqrt(static_cast<double>(marked_count) / static_cast<double>(total_states)));
  return std::max(0, static_cast<int>(std::floor(std::numbers::pi / (4.0 * theta))));
}

/// round(sqrt(2^lambda)).
inline int sqrt_lambda_iterations(int lambda) {
  return static_cast<int>(std::llround(std::sqrt(std::ldexp(1.0, std::max(0, lambda)))));
}

/// Closed form sin^2((2k+1) theta), sin theta = sqrt(M/T).
inline double grover_success_probability(std::uint64_t marked_count, std::uint64_t total_states, int k) {
  double theta = std::asin(std::sqrt(static_cast<double>(marked_count) / static_cast<double>(total_states)));
  double s = std::sin((2.0 * k + 1.0) * theta);
  return s * s;
}

/// Per-state amplitudes after k steps from the uniform state, computed as a
/// rotation in span{marked, unmarked}.
struct RotationAmplitudes {
  Complex marked;
  Complex unmarked;
};

inline RotationAmplitudes grover_rotation(std::uint64_t marked_count, std::uint64_t total_states, int k) {
  const double M = static_cast<double>(marked_count);
  const double T = static_cast<double>(total_states);
  // Coordinates on the normalized good/bad vectors.
  double good = std::sqrt(M / T);
  double bad = std::sqrt((T - M) / T);
  const double ref_good = good, ref_bad = bad;
  for (int step = 0; step < k; ++step) {
    good = -good;
    double overlap = ref_good * good + ref_bad * bad;
    good -= 2.0 * overlap * ref_good;
    bad -= 2.0 * overlap * ref_bad;
  }
  RotationAmplitudes r{0.0, 0.0};
  if (M > 0) r.marked = good / std::sqrt(M);
  if (T - M > 0) r.unmarked = bad / std::sqrt(T - M);
  return r;
}

/// Uniform-start amplification via the two-dimensional rotation.
inline void amplify_by_rotation(QuantumState& state, const std::vector<std::uint8_t>& marked, int k) {
  std::uint64_t M = 0;
  for (auto f : marked) M += f;
  auto r = grover_rotation(M, marked.size(), k);
  for (std::size_t i = 0; i < state.size(); ++i) state[i] = marked[i] ? r.marked : r.unmarked;
}

struct SearchResult {
  std::uint64_t marked_count = 0;
  std::uint64_t total_states = 0;
  int iterations = 0;
  /// Marked-branch probability before any step and after each step.
  std::vector<double> success_trace;
  double final_success_probability = 0.0;
  /// Accepted samples: raw grid values per variable.
  std::vector<std::vector<std::uint64_t>> samples;
  /// Draws rejected by the control-register check.
  std::uint64_t discards = 0;
  /// Total draws per accepted shot (repeat mode; 1 + discards otherwise).
  std::vector<std::uint64_t> trials;
};

/// Uniform init, marking, amplification and post-selected sampling.
inline SearchResult run_search(const PolynomialSystem& sys, const MarkingSpec& marking, const AmplifySpec& amp,
                               int shots, ExecPolicy policy = {}) {
  if (shots < 1) throw Error("shots must be >= 1");
  const int bits = marking.variable_format().total_bits();
  MarkingTable table(sys, marking, policy);
  SearchResult out;
  out.marked_count = table.marked_count();
  out.total_states = table.total_states();
  if (out.marked_count == 0) throw EmptyBranchError(kRangeHint);

  const auto& flags = table.flags();
  QuantumState reference = init_uniform(variable_layout(sys.n(), bits), variable_names(sys.n()));
  QuantumState state = reference;

  switch (amp.mode) {
    case AmplifyMode::exact_count: out.iterations = optimal_iterations(out.marked_count, out.total_states); break;
    case AmplifyMode::fixed_sqrt_lambda: out.iterations = sqrt_lambda_iterations(amp.lambda); break;
    case AmplifyMode::repeat_until_success: out.iterations = 0; break;
  }
  out.success_trace.push_back(marked_probability(state, flags));
  for (int k = 0; k < out.iterations; ++k) {
    grover_step(state, flags, reference);
    out.success_trace.push_back(marked_probability(state, flags));
  }
  out.final_success_probability = out.success_trace.back();

  // A draw is accepted when its control register reads |0...0>, which happens
  // exactly for marked x.
  BornSampler sampler(state, amp.seed);
  for (int s = 0; s < shots; ++s) {
    std::uint64_t draws = 0;
    for (;;) {
      if (draws >= static_cast<std::uint64_t>(amp.max_iterations)) {
        throw ExhaustionError("no marked outcome within " + std::to_string(amp.max_iterations) + " draws");
      }
      ++draws;
      std::size_t idx = sampler.next();
      if (flags[idx]) {
        out.samples.push_back(detail::split_index(idx, sys.n(), bits));
        break;
      }
      ++out.discards;
    }
    out.trials.push_back(draws);
  }
  return out;
}

/// Distinct samples with multiplicities, in basis order.
inline std::map<std::vector<std::uint64_t>, int> tally(const std::vector<std::vector<std::uint64_t>>& samples) {
  std::map<std::vector<std::uint64_t>, int> t;
  for (const auto& s : samples) ++t[s];
  return t;
}

}  // namespace qnl
