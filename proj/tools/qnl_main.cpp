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

// qnl: command line front end. Subcommands solve, marked-set, estimate and
// newton read a system file and write a JSON result document.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qnl/cli.hpp"

namespace {

using qnl::Rational;
using qnl::cli::RunConfig;

Rational parse_rational_flag(const std::string& text, const std::string& flag) {
  try {
    return qnl::parse_rational(text);
  } catch (const std::exception&) {
    throw CLI::ValidationError(flag, "expected a rational literal, got '" + text + "'");
  }
}

std::vector<Rational> parse_point(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational_flag(item, "--start"));
  if (out.empty()) throw CLI::ValidationError("--start", "empty point");
  return out;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw qnl::Error("cannot read system file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Flags {
  std::string system_path;
  std::string out_path;
  std::string window, alpha, tol_gradnorm, derivative_bound, start;
  std::string amplify = "exact";
  std::string gradient = "analytic";
  std::optional<int> lambda, threshold_log2;
  bool no_timing = false;
};

void add_common(CLI::App* sub, RunConfig& c, Flags& f) {
  sub->add_option("system", f.system_path, "System file, one equation per line ('-' for stdin)")->required();
  sub->add_option("--bits,-N", c.bits, "Bits per variable register")->capture_default_str();
  sub->add_option("--int-bits,-m", c.int_bits, "Integer bits per variable register")->capture_default_str();
  sub->add_option("--lambda", f.lambda, "Marking precision lambda (default h*m)");
  sub->add_option("--threshold-log2", f.threshold_log2, "Check threshold tau = 2^rho; overrides the lambda default");
  sub->add_option("--threads", c.threads, "Worker threads for marking")->capture_default_str();
  sub->add_option("--precision", c.precision, "Fractional digits in decimal output")->capture_default_str();
  sub->add_option("--out,-o", f.out_path, "Write the JSON document here instead of stdout");
  sub->add_flag("--no-timing", f.no_timing, "Omit the timing block");
}

void add_refine(CLI::App* sub, RunConfig& c, Flags& f) {
  sub->add_option("--amplify", f.amplify, "Iteration schedule")
      ->check(CLI::IsMember({"exact", "sqrt-lambda", "repeat"}))
      ->capture_default_str();
  sub->add_option("--shots", c.shots, "Accepted samples to draw")->capture_default_str();
  sub->add_option("--seed", c.seed, "Sampler seed")->capture_default_str();
  sub->add_option("--max-draws", c.max_draws, "Draw cap per accepted sample")->capture_default_str();
  sub->add_option("--gradient", f.gradient, "Gradient source")
      ->check(CLI::IsMember({"analytic", "quantum"}))
      ->capture_default_str();
  sub->add_option("--grid-bits", c.gradient.grid_bits, "Gradient grid bits g per coordinate")->capture_default_str();
  sub->add_option("--window", f.window, "Gradient window half-width L (rational)");
  sub->add_option("--derivative-bound", f.derivative_bound, "Derivative bound s (default: interval bound)");
  sub->add_option("--alpha", f.alpha, "Descent step size (rational)");
  sub->add_option("--max-iters", c.gradient.max_iters, "Refinement iteration cap")->capture_default_str();
  sub->add_option("--tol-gradnorm", f.tol_gradnorm, "Stop when max |grad F| falls below this");
  sub->add_option("--accuracy-bits", c.gradient.accuracy_bits, "Output grid bits l")->capture_default_str();
}

void finish(RunConfig& c, const Flags& f) {
  c.system_text = read_file(f.system_path);
  c.lambda = f.lambda;
  c.threshold_log2 = f.threshold_log2;
  c.include_timing = !f.no_timing;
  if (f.amplify == "exact") c.amplify = qnl::AmplifyMode::exact_count;
  if (f.amplify == "sqrt-lambda") c.amplify = qnl::AmplifyMode::fixed_sqrt_lambda;
  if (f.amplify == "repeat") c.amplify = qnl::AmplifyMode::repeat_until_success;
  c.gradient_source = f.gradient == "quantum" ? qnl::GradientSource::quantum_sim : qnl::GradientSource::analytic;
  if (!f.window.empty()) c.gradient.window = parse_rational_flag(f.window, "--window");
  if (!f.alpha.empty()) c.gradient.alpha = parse_rational_flag(f.alpha, "--alpha");
  if (!f.tol_gradnorm.empty()) c.gradient.tol_gradnorm = parse_rational_flag(f.tol_gradnorm, "--tol-gradnorm");
  if (!f.derivative_bound.empty()) {
    c.gradient.derivative_bound = parse_rational_flag(f.derivative_bound, "--derivative-bound");
  }
  if (!f.start.empty()) c.start = parse_point(f.start);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grover-search and gradient-descent solver for polynomial systems over fixed-point grids"};
  app.require_subcommand(1);
  RunConfig config;
  Flags flags;

  auto* solve = app.add_subcommand("solve", "Mark, amplify, sample and refine candidate roots");
  add_common(solve, config, flags);
  add_refine(solve, config, flags);

  auto* marked = app.add_subcommand("marked-set", "List every grid point that passes all checks");
  add_common(marked, config, flags);

  auto* estimate = app.add_subcommand("estimate", "Operation and qubit counts for a configuration");
  add_common(estimate, config, flags);
  estimate->add_option("--accuracy-bits", config.gradient.accuracy_bits, "Output grid bits l")->capture_default_str();
  estimate->add_option("--max-iters", config.gradient.max_iters, "Refinement iteration count c")->capture_default_str();

  auto* newton = app.add_subcommand("newton", "Classical Newton baseline");
  add_common(newton, config, flags);
  newton->add_option("--start", flags.start, "Start point, comma separated (default: first marked point)");
  newton->add_option("--tol", config.newton.tol_residual, "Residual tolerance")->capture_default_str();
  newton->add_option("--max-iters", config.newton.max_iters, "Iteration cap")->capture_default_str();
  newton->add_option("--damping", config.newton.damping, "Step damping in (0, 1]")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : qnl::cli::kUsage;
  }

  try {
    finish(config, flags);
    nlohmann::json doc;
    if (*solve) doc = qnl::cli::cmd_solve(config);
    if (*marked) doc = qnl::cli::cmd_marked_set(config);
    if (*estimate) doc = qnl::cli::cmd_estimate(config);
    if (*newton) doc = qnl::cli::cmd_newton(config);
    std::string text = doc.dump(2) + "\n";
    if (flags.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(flags.out_path);
      if (!out) throw qnl::Error("cannot write '" + flags.out_path + "'");
      out << text;
    }
    if (*marked && doc["marked_count"].get<std::uint64_t>() == 0) {
      std::cerr << "qnl: empty marked set; " << qnl::kRangeHint << "\n";
      return qnl::cli::kNoSolution;
    }
    return qnl::cli::kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "qnl: " << e.what() << "\n";
    return qnl::cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "qnl: " << e.what() << "\n";
    return qnl::cli::exit_code_for(e);
  }
}
