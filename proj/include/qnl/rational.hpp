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

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qnl/error.hpp"

namespace qnl {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Point = std::vector<Rational>;

inline BigInt numerator(const Rational& q) {
  return boost::multiprecision::numerator(q);
}
inline BigInt denominator(const Rational& q) {
  return boost::multiprecision::denominator(q);
}

/// 2^e for any integer e.
inline Rational pow2(int e) {
  BigInt one = 1;
  if (e >= 0) return Rational(one << e);
  return Rational(BigInt(1), one << (-e));
}

/// Largest integer <= q.
inline BigInt floor_int(const Rational& q) {
  BigInt num = numerator(q);
  BigInt den = denominator(q);
  BigInt quot = num / den;  // truncates toward zero
  if (num < 0 && quot * den != num) quot -= 1;
  return quot;
}

/// Floor of q onto the grid of spacing 2^-bits.
inline Rational floor_to_grid(const Rational& q, int bits) {
  return Rational(floor_int(q * pow2(bits))) * pow2(-bits);
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Exact conversion of a finite double (every double is dyadic).
inline Rational from_double(double v) {
  if (!std::isfinite(v)) throw Error("non-finite value cannot be made exact");
  int exp = 0;
  double mant = std::frexp(v, &exp);
  // 53 bits of mantissa scaled to an integer.
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  return Rational(BigInt(scaled)) * pow2(exp - 53);
}

/// Parses "[-]digits[.digits]" or "[-]digits/digits" exactly.
inline Rational parse_rational(std::string_view text) {
  bool neg = false;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    neg = text[pos] == '-';
    ++pos;
  }
  auto digits = [&](std::size_t& p) {
    std::size_t start = p;
    while (p < text.size() && text[p] >= '0' && text[p] <= '9') ++p;
    return text.substr(start, p - start);
  };
  std::string_view whole = digits(pos);
  if (whole.empty()) throw Error("malformed rational literal '" + std::string(text) + "'");
  BigInt num{std::string(whole)};
  BigInt den = 1;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::string_view frac = digits(pos);
    if (frac.empty()) throw Error("malformed rational literal '" + std::string(text) + "'");
    for (char c : frac) {
      num = num * 10 + (c - '0');
      den *= 10;
    }
  } else if (pos < text.size() && text[pos] == '/') {
    ++pos;
    std::string_view d = digits(pos);
    if (d.empty()) throw Error("malformed rational literal '" + std::string(text) + "'");
    den = BigInt(std::string(d));
    if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
  }
  if (pos != text.size()) throw Error("malformed rational literal '" + std::string(text) + "'");
  Rational q(num, den);
  return neg ? Rational(-q) : q;
}

/// True when q has a finite decimal expansion (denominator 2^a 5^b).
inline bool is_terminating(const Rational& q) {
  BigInt d = denominator(q);
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

/// Exact decimal text when terminating, otherwise "p/q". Used by the printer.
inline std::string to_exact_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  if (!is_terminating(q)) return numerator(q).str() + "/" + denominator(q).str();
  BigInt num = numerator(q);
  BigInt den = denominator(q);
  bool neg = num < 0;
  if (neg) num = -num;
  std::string out = BigInt(num / den).str();
  BigInt rem = num % den;
  out += '.';
  while (rem != 0) {
    rem *= 10;
    out += static_cast<char>('0' + static_cast<int>(rem / den));
    rem %= den;
  }
  return neg ? "-" + out : out;
}

/// Decimal rendering rounded half away from zero to `digits` fractional digits.
inline std::string to_decimal(const Rational& q, int digits) {
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  Rational scaled = abs(q) * Rational(scale) + Rational(1, 2);
  BigInt r = floor_int(scaled);
  bool neg = q < 0 && r != 0;
  std::string s = r.str();
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  return neg ? "-" + s : s;
}

}  // namespace qnl
