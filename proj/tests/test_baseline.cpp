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
#include <string>

#include "qnl/baseline.hpp"
#include "qnl/gradient.hpp"
#include "test_support.hpp"

namespace qnl {
namespace {

using testing::kWorkedRoot;
using testing::worked_candidate;
using testing::worked_system;

std::vector<double> as_doubles(const std::vector<Rational>& x) {
  std::vector<double> out;
  for (const auto& v : x) out.push_back(to_double(v));
  return out;
}

TEST(SolveLinear, TwoByTwo) {
  auto x = solve_linear({{2, 1}, {1, 3}}, {3, 5});
  EXPECT_NEAR(x[0], 0.8, 1e-15);
  EXPECT_NEAR(x[1], 1.4, 1e-15);
}

TEST(SolveLinear, PivotsOnZeroDiagonal) {
  auto x = solve_linear({{0, 1}, {1, 0}}, {2, 3});
  EXPECT_DOUBLE_EQ(x[0], 3);
  EXPECT_DOUBLE_EQ(x[1], 2);
}

TEST(SolveLinear, SingularThrows) {
  EXPECT_THROW(solve_linear({{1, 2}, {2, 4}}, {1, 2}), SingularJacobianError);
}

TEST(Newton, SquareFromThree) {
  auto sys = parse_system("x0^2 - 4");
  std::vector<double> x0 = {3};
  NewtonResult r = newton_solve(sys, x0);
  EXPECT_NEAR(r.solution[0], 2.0, 1e-10);
  EXPECT_LE(r.iterations, 6);
  EXPECT_TRUE(r.verified);
  EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations + 1));
  EXPECT_DOUBLE_EQ(r.trace.front().max_residual, 5.0);
}

TEST(Newton, WorkedSystemFromCandidate) {
  NewtonResult r = newton_solve(worked_system(), as_doubles(worked_candidate()));
  ASSERT_EQ(r.solution.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r.solution[j], kWorkedRoot[j], 5e-5);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_DOUBLE_EQ(r.trace.front().max_residual, 1.234375);
  EXPECT_LT(r.trace.back().max_residual, 1e-12);
  EXPECT_TRUE(r.verified);
}

TEST(Newton, WorkedSystemFromOrigin) {
  std::vector<double> x0 = {0, 0, 0};
  NewtonResult r = newton_solve(worked_system(), x0);
  EXPECT_EQ(r.iterations, 31);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r.solution[j], kWorkedRoot[j], 5e-5);
}

TEST(Newton, QuadraticConvergenceNearRoot) {
  NewtonResult r = newton_solve(worked_system(), as_doubles(worked_candidate()));
  int checked = 0;
  for (std::size_t k = 0; k + 1 < r.trace.size(); ++k) {
    double a = r.trace[k].max_residual;
    double b = r.trace[k + 1].max_residual;
    if (a >= 1 || b <= 1e-12) continue;
    EXPECT_GE(std::abs(std::log(b)), 2 * std::abs(std::log(a))) << "step " << k;
    ++checked;
  }
  EXPECT_GE(checked, 1);
}

TEST(Newton, SingularJacobianNamesIterate) {
  auto sys = parse_system("x0^2 - 4");
  std::vector<double> x0 = {0};
  try {
    newton_solve(sys, x0);
    FAIL() << "expected SingularJacobianError";
  } catch (const SingularJacobianError& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("iterate 0"), std::string::npos) << what;
    EXPECT_NE(what.find("(0)"), std::string::npos) << what;
  }
}

TEST(Newton, NoRealRootDoesNotConverge) {
  auto sys = parse_system("x0^2 + 1");
  std::vector<double> x0 = {0.3};
  NewtonConfig cfg;
  cfg.max_iters = 20;
  EXPECT_THROW(newton_solve(sys, x0, cfg), NonConvergenceError);
}

TEST(Newton, RejectsBadArguments) {
  auto sys = parse_system("x0^2 - 4");
  std::vector<double> wrong = {1, 2};
  EXPECT_THROW(newton_solve(sys, wrong), Error);
  std::vector<double> x0 = {3};
  NewtonConfig cfg;
  cfg.tol_residual = 0;
  EXPECT_THROW(newton_solve(sys, x0, cfg), Error);
}

TEST(Newton, DampedStillConverges) {
  auto sys = parse_system("x0^2 - 4");
  std::vector<double> x0 = {3};
  NewtonConfig cfg;
  cfg.damping = 0.5;
  cfg.max_iters = 100;
  NewtonResult r = newton_solve(sys, x0, cfg);
  EXPECT_NEAR(r.solution[0], 2.0, 1e-10);
  EXPECT_GT(r.iterations, 6);
}

TEST(Newton, AgreesWithRefine) {
  auto sys = worked_system();
  NewtonResult n = newton_solve(sys, as_doubles(worked_candidate()));
  RefineResult r = refine(sys, worked_candidate(), GradientConfig{});
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(to_double(r.solution[j]), n.solution[j], 1e-3);
}

}  // namespace
}  // namespace qnl
