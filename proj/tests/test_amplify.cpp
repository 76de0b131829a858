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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "qnl/amplify.hpp"
#include "test_support.hpp"

namespace qnl {
namespace {

using testing::random_system;
using testing::worked_system;

MarkingSpec spec_for(const PolynomialSystem& sys, int bits, int ints, int threshold_log2) {
  FixedFormat vars(bits, ints);
  return MarkingSpec(vars, ResultFormat::for_system(sys, vars), threshold_log2);
}

std::vector<std::uint8_t> flags_with(std::size_t total, std::initializer_list<std::size_t> marked) {
  std::vector<std::uint8_t> f(total, 0);
  for (auto i : marked) f[i] = 1;
  return f;
}

TEST(GroverStep, ThreeQubitsOneMarked) {
  QuantumState ref = init_uniform(RegisterLayout({{"x", 3}}), {"x"});
  auto flags = flags_with(8, {5});
  QuantumState s = ref;
  for (int k = 1; k <= 6; ++k) {
    grover_step(s, flags, ref);
    EXPECT_NEAR(marked_probability(s, flags), grover_success_probability(1, 8, k), 1e-12);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
  }
  QuantumState two = ref;
  grover_step(two, flags, ref);
  grover_step(two, flags, ref);
  const double theta = std::asin(1.0 / std::sqrt(8.0));
  EXPECT_NEAR(marked_probability(two, flags), std::pow(std::sin(5 * theta), 2), 1e-12);
  EXPECT_NEAR(marked_probability(two, flags), 0.9453, 5e-5);
}

TEST(GroverStep, ZeroStepsAndAllMarked) {
  QuantumState ref = init_uniform(RegisterLayout({{"x", 3}}), {"x"});
  EXPECT_NEAR(marked_probability(ref, flags_with(8, {1})), 1.0 / 8, 1e-15);
  auto all = std::vector<std::uint8_t>(8, 1);
  QuantumState s = ref;
  for (int k = 0; k < 3; ++k) {
    grover_step(s, all, ref);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(std::norm(s[i]), 1.0 / 8, 1e-12);
  }
  EXPECT_THROW(grover_step(s, std::vector<std::uint8_t>(4, 0), ref), Error);
}

TEST(OptimalIterations, Examples) {
  EXPECT_EQ(optimal_iterations(1, 8), 2);
  EXPECT_EQ(optimal_iterations(8, 8), 0);
  EXPECT_EQ(optimal_iterations(1, 1u << 3), 2);
  EXPECT_EQ(optimal_iterations(1, 1u << 18), 402);
  EXPECT_THROW(optimal_iterations(0, 8), EmptyBranchError);
  EXPECT_THROW(optimal_iterations(9, 8), Error);
  EXPECT_EQ(sqrt_lambda_iterations(3), 3);
  EXPECT_EQ(sqrt_lambda_iterations(0), 1);
  EXPECT_EQ(sqrt_lambda_iterations(12), 64);
}

TEST(Rotation, AgreesWithFullVectorPath) {
  for (std::uint64_t T : {8u, 64u, 256u}) {
    for (std::uint64_t M : {std::uint64_t{1}, std::uint64_t{3}, T / 4}) {
      std::vector<std::uint8_t> flags(T, 0);
      for (std::uint64_t i = 0; i < M; ++i) flags[(i * 37) % T] = 1;
      int bits = std::countr_zero(T);
      QuantumState ref = init_uniform(RegisterLayout({{"x", bits}}), {"x"});
      QuantumState full = ref;
      for (int k = 0; k <= 2 * optimal_iterations(M, T); ++k) {
        QuantumState rot = ref;
        amplify_by_rotation(rot, flags, k);
        ASSERT_LE(max_abs_difference(full, rot), 1e-12) << T << " " << M << " " << k;
        grover_step(full, flags, ref);
      }
    }
  }
}

TEST(RunSearch, SquareSamplesAreTheRoot) {
  PolynomialSystem sys = parse_system("x0^2 - 4");
  AmplifySpec amp{AmplifyMode::exact_count, 0, 1000, 5};
  SearchResult r = run_search(sys, spec_for(sys, 3, 3, 0), amp, 100);
  EXPECT_EQ(r.marked_count, 1u);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_NEAR(r.final_success_probability, grover_success_probability(1, 8, 2), 1e-12);
  ASSERT_EQ(r.samples.size(), 100u);
  for (const auto& s : r.samples) EXPECT_EQ(s, std::vector<std::uint64_t>{2});
  std::uint64_t draws = 0;
  for (auto t : r.trials) draws += t;
  EXPECT_EQ(draws, 100 + r.discards);
  EXPECT_EQ(r.success_trace.size(), 3u);
}

TEST(RunSearch, WorkedSamplesConcentrateOnCandidate) {
  PolynomialSystem sys = worked_system();
  SearchResult r = run_search(sys, spec_for(sys, 6, 3, 1), AmplifySpec{}, 20);
  EXPECT_EQ(r.iterations, 402);
  EXPECT_GT(r.final_success_probability, 0.9999);
  for (const auto& s : r.samples) EXPECT_EQ(s, (std::vector<std::uint64_t>{22, 26, 25}));
}

TEST(RunSearch, FrequenciesFollowBornRule) {
  // Marked points share one amplitude, so post-selected frequencies are
  // uniform over the marked set.
  PolynomialSystem sys = parse_system("x0^2 - 4\nx1 - 1");
  MarkingSpec spec = spec_for(sys, 3, 3, 2);
  auto marked = marked_set(sys, spec);
  ASSERT_EQ(marked.size(), 10u);  // x0 in {1, 2}, x1 in {0..4}
  const int shots = 5000;
  SearchResult r = run_search(sys, spec, AmplifySpec{AmplifyMode::fixed_sqrt_lambda, 4, 1000, 9}, shots);
  auto counts = tally(r.samples);
  EXPECT_EQ(counts.size(), marked.size());
  const double p = 1.0 / static_cast<double>(marked.size());
  const double sigma = std::sqrt(shots * p * (1 - p));
  for (const auto& m : marked) EXPECT_LE(std::abs(counts[m] - shots * p), 4 * sigma);
}

TEST(RunSearch, SupportInsideMarkedSet) {
  std::mt19937_64 rng(17);
  int ran = 0;
  for (int trial = 0; trial < 20; ++trial) {
    PolynomialSystem sys = random_system(rng, 2, 3);
    MarkingSpec spec = spec_for(sys, 3, 2, 2);
    auto marked = marked_set(sys, spec);
    if (marked.empty()) {
      EXPECT_THROW(run_search(sys, spec, AmplifySpec{}, 5), EmptyBranchError);
      continue;
    }
    ++ran;
    std::set<std::vector<std::uint64_t>> allowed(marked.begin(), marked.end());
    SearchResult r = run_search(sys, spec, AmplifySpec{AmplifyMode::exact_count, 0, 100000, 3}, 50);
    for (const auto& s : r.samples) EXPECT_TRUE(allowed.count(s));
  }
  EXPECT_GE(ran, 5);
}

TEST(RunSearch, RepeatUntilSuccessIsGeometric) {
  PolynomialSystem sys = parse_system("x0^2 - 4");
  MarkingSpec spec = spec_for(sys, 3, 3, 0);
  const int shots = 4000;
  AmplifySpec amp{AmplifyMode::repeat_until_success, 0, 10000, 2024};
  SearchResult r = run_search(sys, spec, amp, shots);
  EXPECT_EQ(r.iterations, 0);
  double mean = 0;
  for (auto t : r.trials) mean += static_cast<double>(t);
  mean /= shots;
  // Geometric with p = 1/8: variance 56, standard error sqrt(56 / shots).
  EXPECT_NEAR(mean, 8.0, 4 * std::sqrt(56.0 / shots));
  SearchResult again = run_search(sys, spec, amp, shots);
  EXPECT_EQ(again.trials, r.trials);
  EXPECT_EQ(again.samples, r.samples);
}

TEST(RunSearch, DrawCapRaisesExhaustion) {
  PolynomialSystem sys = parse_system("x0^2 - 4");
  AmplifySpec amp{AmplifyMode::repeat_until_success, 0, 1, 1};
  EXPECT_THROW(run_search(sys, spec_for(sys, 3, 3, 0), amp, 200), ExhaustionError);
  EXPECT_THROW(run_search(sys, spec_for(sys, 3, 3, 0), AmplifySpec{}, 0), Error);
}

TEST(Modes, Names) {
  EXPECT_EQ(to_string(AmplifyMode::exact_count), "exact");
  EXPECT_EQ(to_string(AmplifyMode::fixed_sqrt_lambda), "sqrt-lambda");
  EXPECT_EQ(to_string(AmplifyMode::repeat_until_success), "repeat");
}

}  // namespace
}  // namespace qnl
