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

// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "qnl/polysys.hpp"
#include "qnl/rational.hpp"

namespace qnl::testing {

inline constexpr const char* kWorkedExample =
    "x^3 + y^2 - y + 2*z = 35\n"
    "y^3 - x + 2*z*x = 50\n"
    "z^3 - z^2 + 2*x - 2*y = 20\n";

inline PolynomialSystem worked_system() { return parse_system(kWorkedExample); }

inline std::vector<Rational> worked_candidate() {
  return {Rational(11, 4), Rational(13, 4), Rational(25, 8)};
}

/// The reference root, four decimals.
inline const std::vector<double> kWorkedRoot = {2.7689, 3.2834, 3.1370};

/// Random square system: every equation gets 1..max_terms terms of total
/// degree <= max_degree with small rational coefficients, and a constant.
inline PolynomialSystem random_system(std::mt19937_64& rng, std::size_t n, unsigned max_degree, int max_terms = 4,
                                      int coeff_range = 6, int denominator = 4) {
  std::uniform_int_distribution<int> coef(-coeff_range, coeff_range);
  std::uniform_int_distribution<int> den(1, denominator);
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_int_distribution<unsigned> deg(0, max_degree);
  std::uniform_int_distribution<std::size_t> var(0, n - 1);
  std::vector<Polynomial> eqs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Term> terms;
    int k = count(rng);
    for (int j = 0; j < k; ++j) {
      Exponents e(n, 0);
      unsigned d = deg(rng);
      for (unsigned u = 0; u < d; ++u) ++e[var(rng)];
      int c = coef(rng);
      if (c == 0) c = 1;
      terms.push_back({Rational(c, den(rng)), e});
    }
    terms.push_back({Rational(coef(rng), den(rng)), Exponents(n, 0)});
    Polynomial p(n, terms);
    if (p.is_zero()) p = Polynomial::variable(n, i);
    eqs.push_back(p);
  }
  return PolynomialSystem(std::move(eqs));
}

inline std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t n, int range = 4, int denominator = 16) {
  std::uniform_int_distribution<int> num(-range * denominator, range * denominator);
  std::vector<Rational> x;
  for (std::size_t j = 0; j < n; ++j) x.push_back(Rational(num(rng), denominator));
  return x;
}

}  // namespace qnl::testing
