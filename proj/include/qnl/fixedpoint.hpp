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
 * N-bit fixed-point register words: m integer bits followed by N-m
 * fractional bits. Variable registers are unsigned; residual registers are
 * signed two's complement over N+1 raw bits.
 */

#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qnl/error.hpp"
#include "qnl/polysys.hpp"
#include "qnl/rational.hpp"

namespace qnl {

class FixedFormat {
 public:
  static constexpr int kMaxRawBits = 62;

  FixedFormat(int total_bits, int integer_bits, bool is_signed = false)
      : total_bits_(total_bits), integer_bits_(integer_bits), signed_(is_signed) {
    if (integer_bits_ <= 0 || integer_bits_ > total_bits_) {
      throw Error("fixed format needs 0 < integer_bits <= total_bits (got " + std::to_string(integer_bits_) + ", " +
                  std::to_string(total_bits_) + ")");
    }
    if (raw_width() > kMaxRawBits) {
      throw Error("fixed format wider than " + std::to_string(kMaxRawBits) + " raw bits");
    }
  }

  int total_bits() const noexcept { return total_bits_; }
  int integer_bits() const noexcept { return integer_bits_; }
  int fractional_bits() const noexcept { return total_bits_ - integer_bits_; }
  bool is_signed() const noexcept { return signed_; }
  /// Bits actually stored; the sign bit is extra.
  int raw_width() const noexcept { return total_bits_ + (signed_ ? 1 : 0); }
  std::uint64_t raw_limit() const noexcept { return std::uint64_t{1} << raw_width(); }

  /// Smallest representable value.
  Rational min_value() const { return signed_ ? Rational(-pow2(integer_bits_)) : Rational(0); }
  /// Exclusive upper bound.
  Rational max_exclusive() const { return pow2(integer_bits_); }

  friend bool operator==(const FixedFormat&, const FixedFormat&) = default;

 private:
  int total_bits_;
  int integer_bits_;
  bool signed_;
};

struct BitWord {
  std::uint64_t raw = 0;
  FixedFormat format{1, 1};

  /// Signed integer q with value q / 2^fractional_bits.
  std::int64_t scaled() const {
    if (format.is_signed() && raw >= (std::uint64_t{1} << format.total_bits())) {
      return static_cast<std::int64_t>(raw) - static_cast<std::int64_t>(format.raw_limit());
    }
    return static_cast<std::int64_t>(raw);
  }
};

/// Truncates toward -inf onto the format grid.
inline BitWord encode(const Rational& value, const FixedFormat& format) {
  if (value < format.min_value() || value >= format.max_exclusive()) {
    throw OverflowError("value " + to_exact_string(value) + " outside the range of a " +
                        std::to_string(format.total_bits()) + "-bit format with " +
                        std::to_string(format.integer_bits()) + " integer bits");
  }
  BigInt q = floor_int(value * pow2(format.fractional_bits()));
  if (q < 0) q += BigInt(format.raw_limit());
  return BitWord{q.convert_to<std::uint64_t>(), format};
}

/// Word from a signed scaled integer; throws when it does not fit.
inline BitWord word_from_scaled(std::int64_t q, const FixedFormat& format) {
  std::int64_t lo = format.is_signed() ? -(std::int64_t{1} << format.total_bits()) : 0;
  std::int64_t hi = std::int64_t{1} << format.total_bits();
  if (q < lo || q >= hi) throw OverflowError("scaled value " + std::to_string(q) + " overflows its format");
  std::uint64_t raw = q < 0 ? static_cast<std::uint64_t>(q + static_cast<std::int64_t>(format.raw_limit()))
                            : static_cast<std::uint64_t>(q);
  return BitWord{raw, format};
}

inline BitWord make_word(std::uint64_t raw, const FixedFormat& format) {
  if (raw >= format.raw_limit()) throw OverflowError("raw value does not fit the format width");
  return BitWord{raw, format};
}

inline Rational decode(const BitWord& word) {
  return Rational(BigInt(word.scaled())) * pow2(-word.format.fractional_bits());
}

/// Renders the raw bits as "iii.fff" (sign bit leads for signed formats).
inline std::string render_bits(const BitWord& word) {
  const FixedFormat& f = word.format;
  int width = f.raw_width();
  int int_width = f.integer_bits() + (f.is_signed() ? 1 : 0);
  std::string out;
  for (int b = width - 1; b >= 0; --b) {
    out += ((word.raw >> b) & 1U) ? '1' : '0';
    if (width - b == int_width && b != 0) out += '.';
  }
  return out;
}

/// Residual register format: integer bits h*m + ceil(log2 t) + 1, signed.
class ResultFormat {
 public:
  explicit ResultFormat(FixedFormat format) : format_(format) {
    if (!format_.is_signed()) throw Error("result formats are signed");
  }

  /// Default width for a system over the given variable format; widened if
  /// the interval enclosure of some f_i over the search box needs more.
  static ResultFormat for_system(const PolynomialSystem& sys, const FixedFormat& vars,
                                 std::optional<int> fractional_bits = std::nullopt) {
    int frac = fractional_bits.value_or(vars.fractional_bits());
    int log_t = std::bit_width(sys.t() > 0 ? sys.t() - 1 : 0);  // ceil(log2 t)
    int ints = static_cast<int>(sys.h()) * vars.integer_bits() + log_t + 1;
    Rational need = max_residual_bound(sys, vars);
    while (need >= pow2(ints)) ++ints;
    return ResultFormat(FixedFormat(ints + frac, ints, true));
  }

  /// Sup of |f_i| over the box of grid values of `vars`.
  static Rational max_residual_bound(const PolynomialSystem& sys, const FixedFormat& vars) {
    Box box(sys.n(), Interval{vars.min_value(), vars.max_exclusive() - pow2(-vars.fractional_bits())});
    Rational worst = 0;
    for (const auto& eq : sys.equations()) worst = std::max(worst, bound_abs(eq, box));
    return worst;
  }

  /// Throws unless the format covers every residual over the search box.
  void check_covers(const PolynomialSystem& sys, const FixedFormat& vars) const {
    if (max_residual_bound(sys, vars) >= pow2(format_.integer_bits())) {
      throw OverflowError("result format with " + std::to_string(format_.integer_bits()) +
                          " integer bits can overflow over the search box");
    }
  }

  const FixedFormat& format() const noexcept { return format_; }

 private:
  FixedFormat format_;
};

enum class OracleMode { exact, truncating };

namespace detail {

inline std::vector<Rational> decode_point(std::span<const BitWord> point) {
  std::vector<Rational> xs;
  xs.reserve(point.size());
  for (const auto& w : point) {
    if (!(w.format == point.front().format)) throw Error("point words must share one format");
    xs.push_back(decode(w));
  }
  return xs;
}

}  // namespace detail

/// U_f on basis inputs: f_i at the decoded point, written into a residual word.
/// `exact` encodes the exact rational once; `truncating` floors every
/// intermediate product onto the residual grid.
inline BitWord eval_oracle(const PolynomialSystem& sys, std::size_t eq_index, std::span<const BitWord> point,
                           const ResultFormat& result, OracleMode mode = OracleMode::exact) {
  if (point.size() != sys.n()) throw Error("point length does not match variable count");
  std::vector<Rational> xs = detail::decode_point(point);
  const FixedFormat& rf = result.format();
  if (mode == OracleMode::exact) return encode(evaluate(sys, eq_index, xs), rf);

  int frac = rf.fractional_bits();
  Rational acc = 0;
  for (const auto& t : sys.equation(eq_index).terms()) {
    Rational v = floor_to_grid(t.coefficient, frac);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      for (unsigned e = 0; e < t.exponents[j]; ++e) v = floor_to_grid(v * xs[j], frac);
    }
    acc += v;
  }
  return encode(acc, rf);
}

/// Exact-mode U_f specialised to raw grid inputs. The polynomial is scaled to
/// integer form once, so evaluation is integer arithmetic; points that would
/// overflow 128 bits fall back to the rational path.
class ResidualOracle {
 public:
  ResidualOracle(const PolynomialSystem& sys, std::size_t eq_index, FixedFormat vars, ResultFormat result)
      : sys_(&sys), eq_index_(eq_index), vars_(vars), result_(result) {
    const Polynomial& p = sys.equation(eq_index);
    int frac = vars.fractional_bits();
    unsigned h = p.degree();
    BigInt lcm = 1;
    for (const auto& t : p.terms()) {
      BigInt d = denominator(t.coefficient);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    BigInt den = lcm << (frac * static_cast<int>(h));
    const BigInt limit(std::numeric_limits<long long>::max());
    fast_ = den <= limit;
    for (const auto& t : p.terms()) {
      if (!fast_) break;
      BigInt c = numerator(t.coefficient * Rational(lcm)) << (frac * static_cast<int>(h - t.degree()));
      if (boost::multiprecision::abs(c) > limit) {
        fast_ = false;
        break;
      }
      terms_.push_back(ScaledTerm{static_cast<__int128>(c.convert_to<long long>()), t.exponents});
    }
    if (fast_) den_ = static_cast<__int128>(den.convert_to<long long>());
    result_frac_shift_ = result.format().fractional_bits();
  }

  /// Scaled residual q: the residual word's value is q / 2^result_frac.
  std::int64_t evaluate_scaled(std::span<const std::uint64_t> raws) const {
    if (fast_) {
      if (auto q = try_fast(raws)) return checked(*q);
    }
    return slow(raws);
  }

  BitWord evaluate(std::span<const std::uint64_t> raws) const {
    return word_from_scaled(evaluate_scaled(raws), result_.format());
  }

  const ResultFormat& result_format() const noexcept { return result_; }

 private:
  struct ScaledTerm {
    __int128 coefficient;
    Exponents exponents;
  };

  std::optional<std::int64_t> try_fast(std::span<const std::uint64_t> raws) const {
    __int128 sum = 0;
    for (const auto& t : terms_) {
      __int128 v = t.coefficient;
      for (std::size_t j = 0; j < raws.size(); ++j) {
        for (unsigned e = 0; e < t.exponents[j]; ++e) {
          if (__builtin_mul_overflow(v, static_cast<__int128>(raws[j]), &v)) return std::nullopt;
        }
      }
      if (__builtin_add_overflow(sum, v, &sum)) return std::nullopt;
    }
    __int128 scaled;
    if (__builtin_mul_overflow(sum, static_cast<__int128>(1) << result_frac_shift_, &scaled)) return std::nullopt;
    __int128 q = scaled / den_;
    if (scaled % den_ != 0 && scaled < 0) q -= 1;
    if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min()) {
      throw OverflowError("residual overflows the result format");
    }
    return static_cast<std::int64_t>(q);
  }

  std::int64_t checked(std::int64_t q) const {
    word_from_scaled(q, result_.format());
    return q;
  }

  std::int64_t slow(std::span<const std::uint64_t> raws) const {
    std::vector<BitWord> words;
    for (auto r : raws) words.push_back(make_word(r, vars_));
    return eval_oracle(*sys_, eq_index_, words, result_).scaled();
  }

  const PolynomialSystem* sys_;
  std::size_t eq_index_;
  FixedFormat vars_;
  ResultFormat result_;
  std::vector<ScaledTerm> terms_;
  __int128 den_ = 1;
  int result_frac_shift_ = 0;
  bool fast_ = false;
};

}  // namespace qnl
