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
 * Operation and qubit counts for the search + refinement algorithm and for a
 * classical Newton iteration. Every big-O constant is fixed to 1; the
 * numbers rank configurations and do not predict wall-clock time.
 *
 *   search_ops  = ceil(2^(lambda/2)) * n * t * h * N^2
 *   refine_ops  = c * n * t * h * (l + m)^2
 *   qubits      = 2 n (l + m) + 4 h (m + l) + h N + n + 1
 *   newton_ops  = h * t * n^3 * (l + m)^2            (per iteration)
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "qnl/error.hpp"
#include "qnl/polysys.hpp"

namespace qnl {

struct ResourceParams {
  std::uint64_t n = 1;
  std::uint64_t t = 1;
  std::uint64_t h = 1;
  std::uint64_t N = 1;
  std::uint64_t m = 1;
  std::uint64_t l = 0;
  std::uint64_t lambda = 0;
  std::uint64_t c = 1;

  /// n, t, h from the system; lambda defaults to h*m.
  static ResourceParams from_system(const PolynomialSystem& sys, std::uint64_t N, std::uint64_t m, std::uint64_t l,
                                    std::uint64_t c, std::optional<std::uint64_t> lambda = std::nullopt) {
    ResourceParams p;
    p.n = sys.n();
    p.t = sys.t();
    p.h = sys.h();
    p.N = N;
    p.m = m;
    p.l = l;
    p.c = c;
    p.lambda = lambda.value_or(p.h * m);
    return p;
  }

  void validate() const {
    if (n == 0 || t == 0 || h == 0 || N == 0 || m == 0 || c == 0) {
      throw Error("resource parameters n, t, h, N, m, c must be positive");
    }
  }
};

struct ResourceEstimate {
  std::uint64_t search_ops = 0;
  std::uint64_t refine_ops = 0;
  std::uint64_t total_ops = 0;
  std::uint64_t total_qubits = 0;
  std::uint64_t newton_ops_per_iter = 0;
};

namespace detail {

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("resource count overflows 64 bits");
  return r;
}
inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("resource count overflows 64 bits");
  return r;
}

}  // namespace detail

/// ceil(2^(lambda/2)) in integers: the least c with c^2 >= 2^lambda.
inline std::uint64_t ceil_sqrt_pow2(std::uint64_t lambda) {
  if (lambda >= 126) throw OverflowError("2^(lambda/2) overflows 64 bits");
  if (lambda % 2 == 0) return std::uint64_t{1} << (lambda / 2);
  unsigned __int128 target = static_cast<unsigned __int128>(1) << lambda;
  auto c = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<long double>(target))));
  while (c > 0 && static_cast<unsigned __int128>(c - 1) * (c - 1) >= target) --c;
  while (static_cast<unsigned __int128>(c) * c < target) ++c;
  return c;
}

inline std::uint64_t search_operations(const ResourceParams& p) {
  using detail::mul;
  return mul(mul(mul(mul(ceil_sqrt_pow2(p.lambda), p.n), p.t), p.h), mul(p.N, p.N));
}

inline std::uint64_t refine_operations(const ResourceParams& p) {
  using detail::mul;
  std::uint64_t lm = detail::add(p.l, p.m);
  return mul(mul(mul(mul(p.c, p.n), p.t), p.h), mul(lm, lm));
}

inline std::uint64_t estimate_qubits(const ResourceParams& p) {
  p.validate();
  using detail::add;
  using detail::mul;
  std::uint64_t lm = add(p.l, p.m);
  std::uint64_t q = mul(mul(2, p.n), lm);
  q = add(q, mul(mul(4, p.h), lm));
  q = add(q, mul(p.h, p.N));
  q = add(q, p.n);
  return add(q, 1);
}

/// Classical Newton cost per iteration.
inline std::uint64_t newton_cost(const ResourceParams& p) {
  p.validate();
  using detail::mul;
  std::uint64_t lm = detail::add(p.l, p.m);
  return mul(mul(mul(p.h, p.t), mul(mul(p.n, p.n), p.n)), mul(lm, lm));
}

inline ResourceEstimate estimate_operations(const ResourceParams& p) {
  p.validate();
  ResourceEstimate e;
  e.search_ops = search_operations(p);
  e.refine_ops = refine_operations(p);
  e.total_ops = detail::add(e.search_ops, e.refine_ops);
  e.total_qubits = estimate_qubits(p);
  e.newton_ops_per_iter = newton_cost(p);
  return e;
}

/// Smallest n at which one Newton iteration costs more than one full
/// search-and-refine run, other parameters fixed; 0 when none up to max_n.
inline std::uint64_t newton_crossover(ResourceParams p, std::uint64_t max_n = 1 << 16) {
  for (std::uint64_t n = 1; n <= max_n; ++n) {
    p.n = n;
    if (newton_cost(p) > estimate_operations(p).total_ops) return n;
  }
  return 0;
}

}  // namespace qnl
