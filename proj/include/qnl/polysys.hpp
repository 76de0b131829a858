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
 * Square polynomial systems f_i(x_0..x_{n-1}) = 0 with exact rational
 * coefficients, their text grammar, exact evaluation, and the analytic
 * gradient of F = sum_i f_i^2.
 *
 * Every other module treats this one as ground truth, so nothing here
 * touches floating point except the explicit `evaluate_double` helpers.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qnl/error.hpp"
#include "qnl/rational.hpp"

namespace qnl {

using Exponents = std::vector<unsigned>;

struct Term {
  Rational coefficient;
  Exponents exponents;

  unsigned degree() const {
    unsigned d = 0;
    for (unsigned e : exponents) d += e;
    return d;
  }
};

namespace detail {

// Graded-lex: higher total degree first, then lexicographically larger
// exponent vectors first.
inline bool graded_lex_before(const Exponents& a, const Exponents& b) {
  unsigned da = 0, db = 0;
  for (unsigned e : a) da += e;
  for (unsigned e : b) db += e;
  if (da != db) return da > db;
  return a > b;
}

inline Rational ipow(const Rational& base, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace detail

/// Polynomial in a fixed number of positional variables, kept canonical:
/// like terms merged, zero terms dropped, graded-lex order.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::size_t num_vars, std::vector<Term> terms) : num_vars_(num_vars), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (t.exponents.size() != num_vars_) throw Error("term exponent count does not match variable count");
    }
    normalize();
  }

  static Polynomial constant(std::size_t num_vars, const Rational& c) {
    return Polynomial(num_vars, {Term{c, Exponents(num_vars, 0)}});
  }
  static Polynomial variable(std::size_t num_vars, std::size_t index) {
    Exponents e(num_vars, 0);
    e.at(index) = 1;
    return Polynomial(num_vars, {Term{Rational(1), e}});
  }

  std::size_t num_vars() const noexcept { return num_vars_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, t.degree());
    return d;
  }

  Rational evaluate(std::span<const Rational> point) const {
    if (point.size() != num_vars_) throw Error("point length does not match variable count");
    // Powers are shared across terms.
    std::vector<std::vector<Rational>> powers(num_vars_);
    Rational acc = 0;
    for (const auto& t : terms_) {
      Rational v = t.coefficient;
      for (std::size_t j = 0; j < num_vars_; ++j) {
        unsigned e = t.exponents[j];
        if (e == 0) continue;
        auto& pj = powers[j];
        if (pj.empty()) pj.push_back(Rational(1));
        while (pj.size() <= e) pj.push_back(pj.back() * point[j]);
        v *= pj[e];
      }
      acc += v;
    }
    return acc;
  }

  double evaluate_double(std::span<const double> point) const {
    if (point.size() != num_vars_) throw Error("point length does not match variable count");
    double acc = 0.0;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      double v = coeff_cache_[k];
      const auto& ex = terms_[k].exponents;
      for (std::size_t j = 0; j < num_vars_; ++j) {
        for (unsigned e = 0; e < ex[j]; ++e) v *= point[j];
      }
      acc += v;
    }
    return acc;
  }

  Polynomial derivative(std::size_t var) const {
    if (var >= num_vars_) throw Error("derivative variable out of range");
    std::vector<Term> out;
    for (const auto& t : terms_) {
      if (t.exponents[var] == 0) continue;
      Term d = t;
      d.coefficient *= t.exponents[var];
      d.exponents[var] -= 1;
      out.push_back(std::move(d));
    }
    return Polynomial(num_vars_, std::move(out));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    check_compatible(a, b);
    std::vector<Term> all = a.terms_;
    all.insert(all.end(), b.terms_.begin(), b.terms_.end());
    return Polynomial(a.num_vars_, std::move(all));
  }
  friend Polynomial operator*(const Rational& c, const Polynomial& p) {
    std::vector<Term> out = p.terms_;
    for (auto& t : out) t.coefficient *= c;
    return Polynomial(p.num_vars_, std::move(out));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + Rational(-1) * b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_compatible(a, b);
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_) {
      for (const auto& t : b.terms_) {
        Term p{s.coefficient * t.coefficient, s.exponents};
        for (std::size_t j = 0; j < p.exponents.size(); ++j) p.exponents[j] += t.exponents[j];
        out.push_back(std::move(p));
      }
    }
    return Polynomial(a.num_vars_, std::move(out));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.num_vars_ != b.num_vars_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t k = 0; k < a.terms_.size(); ++k) {
      if (a.terms_[k].coefficient != b.terms_[k].coefficient || a.terms_[k].exponents != b.terms_[k].exponents)
        return false;
    }
    return true;
  }

 private:
  static void check_compatible(const Polynomial& a, const Polynomial& b) {
    if (a.num_vars_ != b.num_vars_) throw Error("polynomials over different variable counts");
  }

  void normalize() {
    std::map<Exponents, Rational> merged;
    for (auto& t : terms_) merged[t.exponents] += t.coefficient;
    terms_.clear();
    for (auto& [ex, c] : merged) {
      if (c != 0) terms_.push_back(Term{c, ex});
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return detail::graded_lex_before(a.exponents, b.exponents); });
    coeff_cache_.clear();
    for (const auto& t : terms_) coeff_cache_.push_back(to_double(t.coefficient));
  }

  std::size_t num_vars_ = 0;
  std::vector<Term> terms_;
  std::vector<double> coeff_cache_;
};

/// n polynomials in n variables; h and t recomputed from the terms.
class PolynomialSystem {
 public:
  PolynomialSystem() = default;
  explicit PolynomialSystem(std::vector<Polynomial> equations) : equations_(std::move(equations)) {
    if (equations_.empty()) throw Error("system has no equations");
    n_ = equations_.front().num_vars();
    for (const auto& eq : equations_) {
      if (eq.num_vars() != n_) throw Error("equations disagree on variable count");
    }
    if (equations_.size() != n_) {
      throw Error("system is not square: " + std::to_string(equations_.size()) + " equations in " +
                  std::to_string(n_) + " variables");
    }
    for (const auto& eq : equations_) {
      max_degree_ = std::max(max_degree_, eq.degree());
      max_terms_ = std::max(max_terms_, eq.term_count());
    }
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<Polynomial>& equations() const noexcept { return equations_; }
  const Polynomial& equation(std::size_t i) const {
    if (i >= equations_.size()) throw Error("equation index " + std::to_string(i) + " out of range");
    return equations_[i];
  }
  /// Max total degree (h).
  unsigned h() const noexcept { return max_degree_; }
  /// Max term count of any equation, constant included (t).
  std::size_t t() const noexcept { return max_terms_; }

  /// Variable indices that no equation references. Non-empty means the
  /// input skipped an index; the parser still counts it toward n.
  std::vector<std::size_t> unreferenced_variables() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n_; ++j) {
      bool used = false;
      for (const auto& eq : equations_) {
        for (const auto& t : eq.terms()) used = used || t.exponents[j] > 0;
      }
      if (!used) out.push_back(j);
    }
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Polynomial> equations_;
  unsigned max_degree_ = 0;
  std::size_t max_terms_ = 0;
};

// ---------------------------------------------------------------------------
// Parsing and printing

namespace detail {

struct RawTerm {
  Rational coefficient;
  std::map<std::size_t, unsigned> powers;
};

class LineParser {
 public:
  LineParser(std::string_view text, int line) : text_(text), line_(line) {}

  // Returns lhs - rhs as raw terms.
  std::vector<RawTerm> parse_equation() {
    std::vector<RawTerm> lhs = parse_expr();
    skip_ws();
    std::vector<RawTerm> out = std::move(lhs);
    if (peek() == '=') {
      ++pos_;
      std::vector<RawTerm> rhs = parse_expr();
      for (auto& t : rhs) {
        t.coefficient = -t.coefficient;
        out.push_back(std::move(t));
      }
    }
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

  std::size_t max_var() const noexcept { return max_var_; }
  bool saw_var() const noexcept { return saw_var_; }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, static_cast<int>(pos_) + 1); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  std::vector<RawTerm> parse_expr() {
    std::vector<RawTerm> out;
    skip_ws();
    bool neg = false;
    if (peek() == '-' || peek() == '+') {
      neg = peek() == '-';
      ++pos_;
    }
    out.push_back(parse_term(neg));
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') break;
      ++pos_;
      out.push_back(parse_term(c == '-'));
    }
    return out;
  }

  RawTerm parse_term(bool negate) {
    RawTerm t{Rational(negate ? -1 : 1), {}};
    parse_factor(t);
    for (;;) {
      skip_ws();
      if (peek() != '*') break;
      ++pos_;
      parse_factor(t);
    }
    return t;
  }

  std::string read_digits() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void parse_factor(RawTerm& t) {
    skip_ws();
    char c = peek();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      if (c == '-') ++pos_;
      if (read_digits().empty()) fail("expected digits");
      if (peek() == '.') {
        ++pos_;
        if (read_digits().empty()) fail("expected digits after '.'");
      } else if (peek() == '/') {
        ++pos_;
        if (read_digits().empty()) fail("expected denominator digits");
      }
      try {
        t.coefficient *= parse_rational(text_.substr(start, pos_ - start));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        pos_ = start;
        fail(e.what());
      }
      return;
    }
    std::size_t var = 0;
    if (c == 'x') {
      ++pos_;
      std::string idx = read_digits();
      var = idx.empty() ? 0 : std::stoul(idx);
    } else if (c == 'y') {
      ++pos_;
      var = 1;
    } else if (c == 'z') {
      ++pos_;
      var = 2;
    } else if (c == '\0') {
      fail("unexpected end of line");
    } else {
      fail("unexpected character '" + std::string(1, c) + "'");
    }
    saw_var_ = true;
    max_var_ = std::max(max_var_, var);
    unsigned power = 1;
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      if (peek() == '-' || peek() == '.') fail("exponent must be a non-negative integer");
      std::string e = read_digits();
      if (e.empty()) fail("exponent must be a non-negative integer");
      if (peek() == '.') fail("exponent must be a non-negative integer");
      power = static_cast<unsigned>(std::stoul(e));
    }
    t.powers[var] += power;
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
  std::size_t max_var_ = 0;
  bool saw_var_ = false;
};

}  // namespace detail

/// Parses one equation per line (`#` starts a comment). Each line becomes
/// lhs - rhs = 0; n is one more than the largest variable index seen.
inline PolynomialSystem parse_system(std::string_view text) {
  std::vector<std::vector<detail::RawTerm>> lines;
  std::size_t n = 0;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    bool blank = std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!blank) {
      detail::LineParser p(line, line_no);
      lines.push_back(p.parse_equation());
      if (p.saw_var()) n = std::max(n, p.max_var() + 1);
    }
    start = end + 1;
  }
  if (lines.empty()) throw ParseError("no equations", line_no, 1);
  n = std::max<std::size_t>(n, 1);
  std::vector<Polynomial> eqs;
  for (const auto& raw : lines) {
    std::vector<Term> terms;
    for (const auto& rt : raw) {
      Exponents e(n, 0);
      for (auto [v, p] : rt.powers) e[v] += p;
      terms.push_back(Term{rt.coefficient, e});
    }
    eqs.emplace_back(n, std::move(terms));
  }
  if (eqs.size() != n) {
    throw ParseError("system is not square: " + std::to_string(eqs.size()) + " equations in " + std::to_string(n) +
                         " variables",
                     line_no, 1);
  }
  return PolynomialSystem(std::move(eqs));
}

/// Canonical text for one polynomial, graded-lex order, "... = 0".
inline std::string to_string(const Polynomial& p) {
  std::ostringstream os;
  if (p.is_zero()) {
    os << "0 = 0";
    return os.str();
  }
  bool first = true;
  for (const auto& t : p.terms()) {
    Rational c = t.coefficient;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool constant = t.degree() == 0;
    bool wrote = false;
    if (constant || c != 1) {
      os << to_exact_string(c);
      wrote = true;
    }
    for (std::size_t j = 0; j < t.exponents.size(); ++j) {
      if (t.exponents[j] == 0) continue;
      if (wrote) os << "*";
      os << "x" << j;
      if (t.exponents[j] > 1) os << "^" << t.exponents[j];
      wrote = true;
    }
  }
  os << " = 0";
  return os.str();
}

inline std::string to_string(const PolynomialSystem& sys) {
  std::string out;
  for (const auto& eq : sys.equations()) out += to_string(eq) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Exact semantics

inline Rational evaluate(const PolynomialSystem& sys, std::size_t eq_index, std::span<const Rational> point) {
  if (point.size() != sys.n()) throw Error("point length does not match variable count");
  return sys.equation(eq_index).evaluate(point);
}

/// F = sum_i f_i^2 as an explicit polynomial.
inline Polynomial sum_of_squares(const PolynomialSystem& sys) {
  Polynomial acc(sys.n(), {});
  for (const auto& eq : sys.equations()) acc = acc + eq * eq;
  return acc;
}

inline Rational evaluate_F(const PolynomialSystem& sys, std::span<const Rational> point) {
  if (point.size() != sys.n()) throw Error("point length does not match variable count");
  Rational acc = 0;
  for (const auto& eq : sys.equations()) {
    Rational v = eq.evaluate(point);
    acc += v * v;
  }
  return acc;
}

/// J[i][j] = d f_i / d x_j.
inline std::vector<std::vector<Polynomial>> jacobian(const PolynomialSystem& sys) {
  std::vector<std::vector<Polynomial>> J(sys.n());
  for (std::size_t i = 0; i < sys.n(); ++i) {
    for (std::size_t j = 0; j < sys.n(); ++j) J[i].push_back(sys.equation(i).derivative(j));
  }
  return J;
}

/// Exact dF/dx_j = 2 sum_i f_i df_i/dx_j.
inline std::vector<Rational> grad_F(const PolynomialSystem& sys, std::span<const Rational> point) {
  if (point.size() != sys.n()) throw Error("point length does not match variable count");
  std::vector<Rational> values;
  for (const auto& eq : sys.equations()) values.push_back(eq.evaluate(point));
  std::vector<Rational> g(sys.n(), Rational(0));
  for (std::size_t i = 0; i < sys.n(); ++i) {
    if (values[i] == 0) continue;
    for (std::size_t j = 0; j < sys.n(); ++j) {
      g[j] += 2 * values[i] * sys.equation(i).derivative(j).evaluate(point);
    }
  }
  return g;
}

struct DegreeStats {
  unsigned h;
  std::size_t t;
};

inline DegreeStats degree_stats(const PolynomialSystem& sys) { return {sys.h(), sys.t()}; }

// ---------------------------------------------------------------------------
// Interval bounds (natural extension, exact endpoints)

struct Interval {
  Rational lo;
  Rational hi;

  Rational magnitude() const { return std::max(abs(lo), abs(hi)); }
};

using Box = std::vector<Interval>;

namespace detail {

inline Interval interval_pow(const Interval& x, unsigned e) {
  if (e == 0) return {Rational(1), Rational(1)};
  Rational a = ipow(x.lo, e);
  Rational b = ipow(x.hi, e);
  if (e % 2 == 1 || x.lo >= 0) return {std::min(a, b), std::max(a, b)};
  if (x.hi <= 0) return {std::min(a, b), std::max(a, b)};
  return {Rational(0), std::max(a, b)};
}

inline Interval interval_mul(const Interval& x, const Interval& y) {
  Rational c[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

}  // namespace detail

/// Enclosure of p over the box, by summing per-term enclosures.
inline Interval bound(const Polynomial& p, const Box& box) {
  if (box.size() != p.num_vars()) throw Error("box dimension does not match variable count");
  Interval acc{Rational(0), Rational(0)};
  for (const auto& t : p.terms()) {
    Interval v{t.coefficient, t.coefficient};
    for (std::size_t j = 0; j < box.size(); ++j) {
      if (t.exponents[j] > 0) v = detail::interval_mul(v, detail::interval_pow(box[j], t.exponents[j]));
    }
    acc.lo += v.lo;
    acc.hi += v.hi;
  }
  return acc;
}

inline Rational bound_abs(const Polynomial& p, const Box& box) { return bound(p, box).magnitude(); }

}  // namespace qnl
