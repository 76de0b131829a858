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
 * Pipeline orchestration behind the `qnl` command line tool. Each command
 * returns a JSON result document (schema in schemas/result.schema.json);
 * exact rationals are rendered as decimal strings with `precision`
 * fractional digits.
 */

#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qnl/amplify.hpp"
#include "qnl/baseline.hpp"
#include "qnl/error.hpp"
#include "qnl/fixedpoint.hpp"
#include "qnl/gradient.hpp"
#include "qnl/marking.hpp"
#include "qnl/polysys.hpp"
#include "qnl/resources.hpp"

namespace qnl::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kUsage = 1, kNoSolution = 2, kCapExceeded = 3, kSolverFailure = 4 };

/// Maps a library error to the tool's exit code.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const EmptyBranchError*>(&e)) return kNoSolution;
  if (dynamic_cast<const CapExceededError*>(&e)) return kCapExceeded;
  if (dynamic_cast<const SingularJacobianError*>(&e) || dynamic_cast<const NonConvergenceError*>(&e) ||
      dynamic_cast<const ExhaustionError*>(&e))
    return kSolverFailure;
  return kUsage;
}

struct RunConfig {
  std::string system_text;
  int bits = 6;
  int int_bits = 3;
  std::optional<int> lambda;
  std::optional<int> threshold_log2;
  AmplifyMode amplify = AmplifyMode::exact_count;
  int shots = 100;
  std::uint64_t seed = 20240601;
  int max_draws = 100000;
  GradientConfig gradient;
  GradientSource gradient_source = GradientSource::analytic;
  /// Newton start; the first marked candidate when unset.
  std::optional<std::vector<Rational>> start;
  NewtonConfig newton;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  int precision = 10;
  bool include_timing = true;
};

inline PolynomialSystem load_system(const RunConfig& config) { return parse_system(config.system_text); }

/// Rejects configurations that break a module invariant.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw Error("invalid configuration: " + m); };
  if (c.bits < 1 || c.bits > 26) fail("--bits must be in [1, 26]");
  if (c.int_bits < 1 || c.int_bits > c.bits) fail("--int-bits must be in [1, --bits]");
  if (c.lambda && c.threshold_log2) fail("give at most one of --lambda and --threshold-log2");
  if (c.shots < 1) fail("--shots must be >= 1");
  if (c.max_draws < 1) fail("--max-draws must be >= 1");
  if (c.gradient.grid_bits < 1) fail("--grid-bits must be >= 1");
  if (c.gradient.window <= 0) fail("--window must be positive");
  if (c.gradient.alpha <= 0) fail("--alpha must be positive");
  if (c.gradient.max_iters < 0) fail("--max-iters must be >= 0");
  if (c.gradient.accuracy_bits < 0) fail("--accuracy-bits must be >= 0");
  if (c.gradient.derivative_bound && *c.gradient.derivative_bound <= 0) fail("--derivative-bound must be positive");
  if (c.precision < 0 || c.precision > 40) fail("--precision must be in [0, 40]");
  if (c.newton.damping <= 0 || c.newton.damping > 1) fail("--damping must be in (0, 1]");
}

inline MarkingSpec marking_spec(const PolynomialSystem& sys, const RunConfig& c) {
  FixedFormat vars(c.bits, c.int_bits);
  ResultFormat result = ResultFormat::for_system(sys, vars);
  if (c.threshold_log2) return MarkingSpec(vars, result, *c.threshold_log2);
  int lambda = c.lambda.value_or(static_cast<int>(sys.h()) * c.int_bits);
  return MarkingSpec::from_lambda(vars, result, lambda);
}

inline void check_cap(const PolynomialSystem& sys, const RunConfig& c) {
  if (static_cast<long>(sys.n()) * c.bits > RegisterLayout::kDefaultQubitCap) {
    throw CapExceededError("N*n = " + std::to_string(sys.n() * c.bits) + " exceeds the simulation cap of " +
                           std::to_string(RegisterLayout::kDefaultQubitCap) + " qubits");
  }
}

// ---------------------------------------------------------------------------
// Rendering

inline json decimals(std::span<const Rational> v, int precision) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_decimal(x, precision));
  return a;
}

inline json bit_strings(std::span<const std::uint64_t> raws, const FixedFormat& vars) {
  json a = json::array();
  for (auto r : raws) a.push_back(render_bits(make_word(r, vars)));
  return a;
}

inline json system_json(const PolynomialSystem& sys) {
  json eqs = json::array();
  for (const auto& eq : sys.equations()) eqs.push_back(to_string(eq));
  return {{"n", sys.n()},
          {"h", sys.h()},
          {"t", sys.t()},
          {"equations", eqs},
          {"unreferenced_variables", sys.unreferenced_variables()}};
}

inline json marking_json(const MarkingSpec& spec, int precision) {
  const auto& rf = spec.result_format().format();
  return {{"bits", spec.variable_format().total_bits()},
          {"int_bits", spec.variable_format().integer_bits()},
          {"lambda", spec.lambda()},
          {"threshold_log2", spec.threshold_log2()},
          {"tau", to_decimal(spec.tau(), precision)},
          {"result_format", {{"total_bits", rf.total_bits()}, {"integer_bits", rf.integer_bits()}, {"signed", true}}}};
}

inline json gradient_config_json(const GradientConfig& g, GradientSource source, int precision) {
  return {{"source", to_string(source)},
          {"grid_bits", g.grid_bits},
          {"window", to_decimal(g.window, precision)},
          {"derivative_bound", g.derivative_bound ? json(to_decimal(*g.derivative_bound, precision)) : json("auto")},
          {"phase_bits", g.phase_bits},
          {"alpha", to_decimal(g.alpha, precision)},
          {"max_iters", g.max_iters},
          {"tol_gradnorm", to_decimal(g.tol_gradnorm, precision)},
          {"accuracy_bits", g.accuracy_bits}};
}

inline json resources_json(const ResourceParams& p) {
  ResourceEstimate e = estimate_operations(p);
  return {{"params",
           {{"n", p.n}, {"t", p.t}, {"h", p.h}, {"N", p.N}, {"m", p.m}, {"l", p.l}, {"lambda", p.lambda}, {"c", p.c}}},
          {"search_ops", e.search_ops},
          {"refine_ops", e.refine_ops},
          {"total_ops", e.total_ops},
          {"total_qubits", e.total_qubits},
          {"newton_ops_per_iter", e.newton_ops_per_iter},
          {"newton_crossover_n", newton_crossover(p)},
          {"convention", "big-O constants fixed to 1"}};
}

inline ResourceParams resource_params(const PolynomialSystem& sys, const RunConfig& c, const MarkingSpec& spec) {
  return ResourceParams::from_system(sys, c.bits, c.int_bits, c.gradient.accuracy_bits, c.gradient.max_iters > 0 ? c.gradient.max_iters : 1,
                                     static_cast<std::uint64_t>(std::max(0, spec.lambda())));
}

inline json refine_json(const RefineResult& r, const PolynomialSystem& sys, int precision) {
  json trace = json::array();
  for (const auto& it : r.trace.iterates) {
    trace.push_back({{"point", decimals(it.point, precision)},
                     {"F", to_decimal(it.F, precision)},
                     {"grad_norm", to_decimal(max_abs(it.gradient), precision)}});
  }
  std::vector<Rational> residuals;
  for (std::size_t i = 0; i < sys.n(); ++i) residuals.push_back(evaluate(sys, i, r.solution));
  return {{"solution", decimals(r.solution, precision)},
          {"residuals", decimals(residuals, precision)},
          {"max_residual", to_decimal(max_abs(residuals), precision)},
          {"converged", r.trace.converged},
          {"iterations_used", r.trace.iterations_used},
          {"final_alpha", to_decimal(r.trace.final_alpha, precision)},
          {"wraparound_warning", r.trace.wraparound_warning},
          {"trace", trace}};
}

template <typename Body>
json timed(bool include_timing, Body&& body) {
  auto t0 = std::chrono::steady_clock::now();
  json doc = body();
  if (include_timing) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    doc["timing"] = {{"seconds", secs}};
  }
  return doc;
}

inline json header(const std::string& command, const RunConfig& c) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"precision", c.precision}};
}

// ---------------------------------------------------------------------------
// Commands

/// Full pipeline: mark, amplify, sample, refine every distinct candidate.
inline json cmd_solve(const RunConfig& c) {
  validate(c);
  return timed(c.include_timing, [&] {
    PolynomialSystem sys = load_system(c);
    check_cap(sys, c);
    MarkingSpec spec = marking_spec(sys, c);
    AmplifySpec amp{c.amplify, spec.lambda(), c.max_draws, c.seed};
    SearchResult search = run_search(sys, spec, amp, c.shots, ExecPolicy{c.threads});

    json doc = header("solve", c);
    doc["system"] = system_json(sys);
    doc["config"] = {{"marking", marking_json(spec, c.precision)},
                     {"amplify", to_string(c.amplify)},
                     {"shots", c.shots},
                     {"seed", c.seed},
                     {"gradient", gradient_config_json(c.gradient, c.gradient_source, c.precision)}};

    const FixedFormat& vars = spec.variable_format();
    json samples = json::array();
    auto counts = tally(search.samples);
    for (const auto& [raws, count] : counts) {
      samples.push_back({{"point", decimals(decode_point(raws, vars), c.precision)},
                         {"bits", bit_strings(raws, vars)},
                         {"count", count}});
    }
    double mean_trials = 0;
    for (auto t : search.trials) mean_trials += static_cast<double>(t);
    mean_trials /= static_cast<double>(search.trials.size());
    doc["search"] = {{"marked_count", search.marked_count},
                     {"total_states", search.total_states},
                     {"marked_fraction", to_decimal(Rational(BigInt(search.marked_count), BigInt(search.total_states)), c.precision)},
                     {"iterations", search.iterations},
                     {"success_trace", search.success_trace},
                     {"final_success_probability", search.final_success_probability},
                     {"discards", search.discards},
                     {"mean_trials", mean_trials},
                     {"samples", samples}};

    json candidates = json::array();
    for (const auto& [raws, count] : counts) {
      std::vector<Rational> start = decode_point(raws, vars);
      RefineResult r = refine(sys, start, c.gradient, c.gradient_source);
      json cand = refine_json(r, sys, c.precision);
      cand["start"] = decimals(start, c.precision);
      cand["start_bits"] = bit_strings(raws, vars);
      candidates.push_back(std::move(cand));
    }
    doc["candidates"] = candidates;
    doc["resources"] = resources_json(resource_params(sys, c, spec));
    return doc;
  });
}

/// Brute-force marked set.
inline json cmd_marked_set(const RunConfig& c) {
  validate(c);
  return timed(c.include_timing, [&] {
    PolynomialSystem sys = load_system(c);
    check_cap(sys, c);
    MarkingSpec spec = marking_spec(sys, c);
    MarkingTable table(sys, spec, ExecPolicy{c.threads});
    json doc = header("marked-set", c);
    doc["system"] = system_json(sys);
    doc["config"] = {{"marking", marking_json(spec, c.precision)}};
    json points = json::array();
    for (const auto& raws : marked_points(table)) {
      points.push_back({{"raw", raws},
                        {"point", decimals(decode_point(raws, spec.variable_format()), c.precision)},
                        {"bits", bit_strings(raws, spec.variable_format())}});
    }
    doc["marked_count"] = table.marked_count();
    doc["total_states"] = table.total_states();
    doc["points"] = points;
    return doc;
  });
}

inline json cmd_estimate(const RunConfig& c) {
  validate(c);
  return timed(c.include_timing, [&] {
    PolynomialSystem sys = load_system(c);
    MarkingSpec spec = marking_spec(sys, c);
    json doc = header("estimate", c);
    doc["system"] = system_json(sys);
    doc["resources"] = resources_json(resource_params(sys, c, spec));
    return doc;
  });
}

inline json cmd_newton(const RunConfig& c) {
  validate(c);
  return timed(c.include_timing, [&] {
    PolynomialSystem sys = load_system(c);
    std::vector<Rational> start;
    if (c.start) {
      start = *c.start;
      if (start.size() != sys.n()) throw Error("--start needs " + std::to_string(sys.n()) + " coordinates");
    } else {
      check_cap(sys, c);
      MarkingSpec spec = marking_spec(sys, c);
      MarkingTable table(sys, spec, ExecPolicy{c.threads});
      auto pts = marked_points(table);
      if (pts.empty()) throw EmptyBranchError(kRangeHint);
      start = decode_point(pts.front(), spec.variable_format());
    }
    std::vector<double> x0;
    for (const auto& v : start) x0.push_back(to_double(v));
    NewtonResult r = newton_solve(sys, x0, c.newton);

    json doc = header("newton", c);
    doc["system"] = system_json(sys);
    doc["start"] = decimals(start, c.precision);
    std::vector<Rational> exact;
    for (double v : r.solution) exact.push_back(from_double(v));
    json trace = json::array();
    for (const auto& it : r.trace) trace.push_back({{"point", it.point}, {"max_residual", it.max_residual}});
    std::ostringstream resid;
    resid.precision(6);
    resid << std::scientific << to_double(r.exact_max_residual);
    doc["converged"] = true;
    doc["iterations"] = r.iterations;
    doc["solution"] = decimals(exact, c.precision);
    doc["exact_max_residual"] = resid.str();
    doc["verified"] = r.verified;
    doc["trace"] = trace;
    return doc;
  });
}

}  // namespace qnl::cli
