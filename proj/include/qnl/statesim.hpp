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
 * Dense state vectors over named qubit registers.
 *
 * Qubit ordering is register-major with the most significant qubit first,
 * so a basis index reads left to right like |x_0>|x_1>...: the first
 * register occupies the highest index bits and, inside a register, bit
 * width-1 of the register value is its first (leftmost) qubit. All index
 * arithmetic in the library goes through RegisterLayout::shift().
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qnl/error.hpp"

namespace qnl {

using Complex = std::complex<double>;

/// Probabilities at or below this are treated as exactly zero.
inline constexpr double kZeroProbability = 1e-15;

struct Register {
  std::string name;
  int width;
};

class RegisterLayout {
 public:
  static constexpr int kDefaultQubitCap = 26;

  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Register> registers, int qubit_cap = kDefaultQubitCap)
      : registers_(std::move(registers)) {
    std::set<std::string> seen;
    for (const auto& r : registers_) {
      if (r.width < 1) throw Error("register '" + r.name + "' must have width >= 1");
      if (!seen.insert(r.name).second) throw Error("duplicate register name '" + r.name + "'");
      total_ += r.width;
    }
    if (total_ > qubit_cap) {
      throw CapExceededError("layout needs " + std::to_string(total_) + " qubits, cap is " +
                             std::to_string(qubit_cap));
    }
  }

  const std::vector<Register>& registers() const noexcept { return registers_; }
  int total_qubits() const noexcept { return total_; }
  std::size_t dimension() const noexcept { return std::size_t{1} << total_; }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t k = 0; k < registers_.size(); ++k) {
      if (registers_[k].name == name) return k;
    }
    throw Error("unknown register '" + name + "'");
  }
  bool contains(const std::string& name) const {
    return std::any_of(registers_.begin(), registers_.end(), [&](const Register& r) { return r.name == name; });
  }
  int width(const std::string& name) const { return registers_[index_of(name)].width; }

  /// Bit position of the register's least significant qubit in a basis index.
  int shift(const std::string& name) const {
    std::size_t k = index_of(name);
    int s = 0;
    for (std::size_t j = k + 1; j < registers_.size(); ++j) s += registers_[j].width;
    return s;
  }

  std::uint64_t value(std::size_t basis_index, const std::string& name) const {
    return (basis_index >> shift(name)) & ((std::uint64_t{1} << width(name)) - 1);
  }

  friend bool operator==(const RegisterLayout& a, const RegisterLayout& b) {
    if (a.registers_.size() != b.registers_.size()) return false;
    for (std::size_t k = 0; k < a.registers_.size(); ++k) {
      if (a.registers_[k].name != b.registers_[k].name || a.registers_[k].width != b.registers_[k].width)
        return false;
    }
    return true;
  }

 private:
  std::vector<Register> registers_;
  int total_ = 0;
};

class QuantumState {
 public:
  QuantumState() = default;
  /// |0...0>.
  explicit QuantumState(RegisterLayout layout) : layout_(std::move(layout)), amps_(layout_.dimension()) {
    amps_[0] = 1.0;
  }
  QuantumState(RegisterLayout layout, std::vector<Complex> amplitudes)
      : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
    if (amps_.size() != layout_.dimension()) throw Error("amplitude count does not match layout");
  }

  const RegisterLayout& layout() const noexcept { return layout_; }
  const std::vector<Complex>& amplitudes() const noexcept { return amps_; }
  std::vector<Complex>& amplitudes() noexcept { return amps_; }
  std::size_t size() const noexcept { return amps_.size(); }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  void normalize() {
    double n = std::sqrt(norm_squared());
    if (n <= 0.0) throw EmptyBranchError("cannot normalize a zero state");
    for (auto& a : amps_) a /= n;
  }

 private:
  RegisterLayout layout_;
  std::vector<Complex> amps_;
};

inline Complex inner_product(const QuantumState& a, const QuantumState& b) {
  if (a.size() != b.size()) throw Error("inner product of states with different dimensions");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Largest |a_i - b_i|.
inline double max_abs_difference(const QuantumState& a, const QuantumState& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// States side by side; b's registers follow a's.
inline QuantumState tensor(const QuantumState& a, const QuantumState& b) {
  std::vector<Register> regs = a.layout().registers();
  for (const auto& r : b.layout().registers()) regs.push_back(r);
  RegisterLayout layout(std::move(regs));
  std::vector<Complex> amps(layout.dimension());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Complex(0.0)) continue;
    for (std::size_t j = 0; j < b.size(); ++j) amps[i * b.size() + j] = a[i] * b[j];
  }
  return QuantumState(std::move(layout), std::move(amps));
}

// ---------------------------------------------------------------------------
// Gates over registers

/// H on every qubit of a register.
inline void apply_hadamard(QuantumState& state, const std::string& reg) {
  const auto& layout = state.layout();
  int s = layout.shift(reg);
  int w = layout.width(reg);
  const double r = 1.0 / std::numbers::sqrt2;
  auto& a = state.amplitudes();
  for (int q = s; q < s + w; ++q) {
    std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i & bit) continue;
      Complex lo = a[i], hi = a[i | bit];
      a[i] = r * (lo + hi);
      a[i | bit] = r * (lo - hi);
    }
  }
}

/// X on qubit `bit` of a register (bit 0 = least significant).
inline void apply_x(QuantumState& state, const std::string& reg, int bit = 0) {
  const auto& layout = state.layout();
  if (bit < 0 || bit >= layout.width(reg)) throw Error("qubit index out of range for '" + reg + "'");
  std::size_t mask = std::size_t{1} << (layout.shift(reg) + bit);
  auto& a = state.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(i & mask)) std::swap(a[i], a[i | mask]);
  }
}

struct QubitRef {
  std::string reg;
  int bit = 0;
};

/// Multi-controlled X.
inline void apply_controlled_x(QuantumState& state, const std::vector<QubitRef>& controls, const QubitRef& target) {
  const auto& layout = state.layout();
  std::size_t cmask = 0;
  for (const auto& c : controls) cmask |= std::size_t{1} << (layout.shift(c.reg) + c.bit);
  std::size_t tmask = std::size_t{1} << (layout.shift(target.reg) + target.bit);
  if (cmask & tmask) throw Error("control and target overlap");
  auto& a = state.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & cmask) == cmask && !(i & tmask)) std::swap(a[i], a[i | tmask]);
  }
}

/// Basis permutation i -> perm(i); perm must be a bijection.
template <typename Perm>
void apply_permutation(QuantumState& state, Perm&& perm) {
  std::vector<Complex> out(state.size());
  std::vector<char> hit(state.size(), 0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    std::size_t j = perm(i);
    if (j >= state.size() || hit[j]) throw ConsistencyError("basis map is not a permutation");
    hit[j] = 1;
    out[j] = state[i];
  }
  state.amplitudes() = std::move(out);
}

namespace detail {

// In-place radix-2 DFT of length 2^w; sign +1 is the forward QFT.
inline void fft(std::vector<Complex>& v, int sign) {
  const std::size_t n = v.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        Complex w = std::polar(1.0, ang * static_cast<double>(k));
        Complex u = v[i + k], t = w * v[i + k + len / 2];
        v[i + k] = u + t;
        v[i + k + len / 2] = u - t;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& x : v) x *= scale;
}

}  // namespace detail

/// QFT|j> = sum_k e^{2 pi i jk / 2^w} |k> / sqrt(2^w) on one register; the
/// inverse uses the conjugate phase.
inline void apply_qft(QuantumState& state, const std::string& reg, bool inverse = false) {
  const auto& layout = state.layout();
  int s = layout.shift(reg);
  std::size_t n = std::size_t{1} << layout.width(reg);
  std::size_t stride = std::size_t{1} << s;
  std::size_t block = n * stride;
  auto& a = state.amplitudes();
  std::vector<Complex> buf(n);
  for (std::size_t hi = 0; hi < a.size(); hi += block) {
    for (std::size_t lo = 0; lo < stride; ++lo) {
      for (std::size_t k = 0; k < n; ++k) buf[k] = a[hi + k * stride + lo];
      detail::fft(buf, inverse ? -1 : 1);
      for (std::size_t k = 0; k < n; ++k) a[hi + k * stride + lo] = buf[k];
    }
  }
}

// ---------------------------------------------------------------------------
// Preparation, projection, measurement

/// Listed registers in equal superposition (H on each qubit), the rest |0>.
inline QuantumState init_uniform(RegisterLayout layout, const std::set<std::string>& uniform_registers) {
  for (const auto& name : uniform_registers) layout.index_of(name);
  QuantumState state(std::move(layout));
  for (const auto& name : uniform_registers) apply_hadamard(state, name);
  return state;
}

/// sum_a e^{2 pi i a / N0} |a> / sqrt(N0) with N0 = 2^width, built as QFT|1>.
inline QuantumState prepare_phase_register(int width, const std::string& name = "phase") {
  if (width < 1) throw Error("phase register width must be >= 1");
  QuantumState state(RegisterLayout({{name, width}}));
  apply_x(state, name, 0);
  apply_qft(state, name);
  return state;
}

struct Projection {
  QuantumState state;
  double probability;
};

/// Post-measurement state for outcome `value` on a register, renormalized.
inline Projection project(const QuantumState& state, const std::string& reg, std::uint64_t value) {
  const auto& layout = state.layout();
  if (value >= (std::uint64_t{1} << layout.width(reg))) throw Error("projection value out of range");
  std::vector<Complex> out(state.size());
  double p = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (layout.value(i, reg) == value) {
      out[i] = state[i];
      p += std::norm(state[i]);
    }
  }
  if (p <= kZeroProbability) {
    throw EmptyBranchError("outcome " + std::to_string(value) + " on register '" + reg + "' has zero probability");
  }
  double r = 1.0 / std::sqrt(p);
  for (auto& a : out) a *= r;
  return {QuantumState(layout, std::move(out)), p};
}

/// Marginal Born distribution of one register.
inline std::vector<double> marginal(const QuantumState& state, const std::string& reg) {
  const auto& layout = state.layout();
  std::vector<double> p(std::size_t{1} << layout.width(reg), 0.0);
  int s = layout.shift(reg);
  std::size_t mask = p.size() - 1;
  for (std::size_t i = 0; i < state.size(); ++i) p[(i >> s) & mask] += std::norm(state[i]);
  return p;
}

/// Seeded sampler over basis indices of a fixed distribution.
class BornSampler {
 public:
  BornSampler(const std::vector<double>& weights, std::uint64_t seed) : rng_(seed), cdf_(weights.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      cdf_[i] = acc;
    }
    if (acc <= 0.0) throw EmptyBranchError("cannot sample from a zero distribution");
  }
  BornSampler(const QuantumState& state, std::uint64_t seed) : BornSampler(probabilities(state), seed) {}

  std::size_t next() {
    // 53-bit uniform in [0, 1) from the raw engine output, independent of the
    // standard library's distribution implementation.
    double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
  }

  static std::vector<double> probabilities(const QuantumState& state) {
    std::vector<double> p(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) p[i] = std::norm(state[i]);
    return p;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<double> cdf_;
};

/// One outcome per shot: the values of `registers` in order.
using Outcome = std::vector<std::uint64_t>;

inline std::vector<Outcome> measure(const QuantumState& state, const std::vector<std::string>& registers,
                                    int shots, std::uint64_t seed) {
  if (shots < 1) throw Error("shots must be >= 1");
  for (const auto& r : registers) state.layout().index_of(r);
  BornSampler sampler(state, seed);
  std::vector<Outcome> out;
  out.reserve(static_cast<std::size_t>(shots));
  for (int s = 0; s < shots; ++s) {
    std::size_t idx = sampler.next();
    Outcome o;
    for (const auto& r : registers) o.push_back(state.layout().value(idx, r));
    out.push_back(std::move(o));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots: "QNLS" magic, u32 version, u32 register count, per register
// (u32 name length, name bytes, u32 width), u64 amplitude count, then
// amplitudes as little-endian (re, im) float64 pairs.

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 4);
}
inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}
inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated snapshot");
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= std::uint32_t{b[k]} << (8 * k);
  return v;
}
inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated snapshot");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= std::uint64_t{b[k]} << (8 * k);
  return v;
}
inline void put_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(os, bits);
}
inline double get_f64(std::istream& is) {
  std::uint64_t bits = get_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const QuantumState& state) {
  os.write("QNLS", 4);
  detail::put_u32(os, 1);
  const auto& regs = state.layout().registers();
  detail::put_u32(os, static_cast<std::uint32_t>(regs.size()));
  for (const auto& r : regs) {
    detail::put_u32(os, static_cast<std::uint32_t>(r.name.size()));
    os.write(r.name.data(), static_cast<std::streamsize>(r.name.size()));
    detail::put_u32(os, static_cast<std::uint32_t>(r.width));
  }
  detail::put_u64(os, state.size());
  for (const auto& a : state.amplitudes()) {
    detail::put_f64(os, a.real());
    detail::put_f64(os, a.imag());
  }
}

inline QuantumState read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "QNLS") throw Error("not a state snapshot");
  if (detail::get_u32(is) != 1) throw Error("unsupported snapshot version");
  std::uint32_t count = detail::get_u32(is);
  std::vector<Register> regs;
  for (std::uint32_t k = 0; k < count; ++k) {
    std::uint32_t len = detail::get_u32(is);
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw Error("truncated snapshot");
    regs.push_back({name, static_cast<int>(detail::get_u32(is))});
  }
  RegisterLayout layout(std::move(regs));
  std::uint64_t n = detail::get_u64(is);
  if (n != layout.dimension()) throw Error("snapshot amplitude count does not match its layout");
  std::vector<Complex> amps(n);
  for (auto& a : amps) {
    double re = detail::get_f64(is);
    double im = detail::get_f64(is);
    a = {re, im};
  }
  return QuantumState(std::move(layout), std::move(amps));
}

}  // namespace qnl
