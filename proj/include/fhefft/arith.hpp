/*
 * Copyright 2026 The fhefft Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Two's-complement fixed-point words and the circuits that operate on them.
//
// Words are LSB-first vectors of engine bits. A format (F, f) reads the F
// bits as a signed integer and scales by 2^-f. Addition and subtraction are
// ripple-carry; multiplication sign-extends both operands, reduces the
// partial products with a Wallace tree and keeps only the columns it needs.
// Overflow wraps silently.
//
// NAND costs with all operands encrypted:
//   half adder           5  (XOR + NOT of its first NAND)
//   full adder           9  (two half adders sharing NANDs, OR = NAND(t1, t4))
//   add / sub, F bits    9F - 5
// The top stage skips its unused carry.

#ifndef FHEFFT_ARITH_HPP_
#define FHEFFT_ARITH_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fhefft/bit_engine.hpp"
#include "fhefft/errors.hpp"
#include "fhefft/gates.hpp"

namespace fhefft {

struct FixedFormat {
  uint32_t total_bits = 32;  // F
  uint32_t frac_bits = 16;   // f

  // Throws UsageError unless 0 < f < F <= 62.
  void validate() const;
  int64_t scale() const { return int64_t{1} << frac_bits; }
  // Quantization step 2^-f.
  double delta() const;
  // Exclusive bound on |x| accepted by encode: 2^(F-f-1).
  double max_magnitude() const;

  friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

// round(x * 2^f) as a signed integer. Throws RangeError when
// |x| >= 2^(F-f-1).
int64_t encode(double x, const FixedFormat& fmt);
double decode(int64_t raw, const FixedFormat& fmt);

// Two's-complement bits of raw, LSB-first.
std::vector<bool> to_bits(int64_t raw, uint32_t width);
// Sign-extending inverse of to_bits.
int64_t from_bits(const std::vector<bool>& bits);
// raw reduced to the signed range of `width` bits.
int64_t wrap_signed(int64_t raw, uint32_t width);

inline std::vector<bool> encode_bits(double x, const FixedFormat& fmt) {
  return to_bits(encode(x, fmt), fmt.total_bits);
}
inline double decode_bits(const std::vector<bool>& bits,
                          const FixedFormat& fmt) {
  return decode(from_bits(bits), fmt);
}

template <BitEngine E>
struct FixedWord {
  std::vector<typename E::Bit> bits;  // LSB-first, size == format.total_bits
  FixedFormat format;
};

template <BitEngine E>
FixedWord<E> constant_word(E& e, int64_t raw, const FixedFormat& fmt) {
  fmt.validate();
  FixedWord<E> w{{}, fmt};
  w.bits.reserve(fmt.total_bits);
  for (bool b : to_bits(raw, fmt.total_bits)) w.bits.push_back(e.constant(b));
  return w;
}

// Feeds each bit through engine.input (encryption on FheEngine).
template <BitEngine E>
FixedWord<E> input_word(E& e, int64_t raw, const FixedFormat& fmt) {
  fmt.validate();
  FixedWord<E> w{{}, fmt};
  w.bits.reserve(fmt.total_bits);
  for (bool b : to_bits(raw, fmt.total_bits)) w.bits.push_back(e.input(b));
  return w;
}

template <BitEngine E>
int64_t read_raw(const E& e, const FixedWord<E>& w) {
  std::vector<bool> bits;
  bits.reserve(w.bits.size());
  for (const auto& b : w.bits) bits.push_back(e.read_back(b));
  return from_bits(bits);
}

template <BitEngine E>
double read_value(const E& e, const FixedWord<E>& w) {
  return decode(read_raw(e, w), w.format);
}

// --- adders ---------------------------------------------------------------

template <BitEngine E>
struct SumCarry {
  typename E::Bit sum;
  typename E::Bit carry;
};

template <BitEngine E>
SumCarry<E> half_adder(E& e, const typename E::Bit& a,
                       const typename E::Bit& b, bool need_carry = true) {
  if (a.is_constant || b.is_constant) {
    const auto& k = a.is_constant ? a : b;
    const auto& x = a.is_constant ? b : a;
    if (x.is_constant) {
      return {e.constant(k.value != x.value), e.constant(k.value && x.value)};
    }
    if (!k.value) return {x, e.constant(false)};
    return {gates::invert(e, x), need_carry ? x : e.constant(false)};
  }
  const auto t1 = e.nand(a, b);
  const auto sum = e.nand(e.nand(a, t1), e.nand(b, t1));
  return {sum, need_carry ? gates::not_(e, t1) : e.constant(false)};
}

// Two half adders and an OR. Sharing the half adders' first NAND, the
// carry is OR(NOT t1, NOT t4) = NAND(t1, t4), for 9 NANDs total.
// Constant inputs fold.
template <BitEngine E>
SumCarry<E> full_adder(E& e, const typename E::Bit& a,
                       const typename E::Bit& b, const typename E::Bit& c,
                       bool need_carry = true) {
  using Bit = typename E::Bit;
  const Bit* in[3] = {&a, &b, &c};
  const Bit* live[3];
  int n_live = 0;
  int ones = 0;
  for (const Bit* p : in) {
    if (p->is_constant) {
      ones += p->value ? 1 : 0;
    } else {
      live[n_live++] = p;
    }
  }
  if (n_live == 0) {
    return {e.constant(ones % 2 == 1), e.constant(ones >= 2)};
  }
  if (n_live == 1) {
    const Bit& x = *live[0];
    const Bit sum = ones % 2 == 1 ? gates::invert(e, x) : x;
    if (!need_carry) return {sum, e.constant(false)};
    if (ones == 0) return {sum, e.constant(false)};
    if (ones == 2) return {sum, e.constant(true)};
    return {sum, x};
  }
  if (n_live == 2) {
    const Bit& x = *live[0];
    const Bit& y = *live[1];
    if (ones == 0) return half_adder(e, x, y, need_carry);
    // x + y + 1: sum = XNOR, carry = OR = NAND(NOT x, NOT y) with free NOTs.
    const auto t1 = e.nand(x, y);
    const auto s = e.nand(e.nand(x, t1), e.nand(y, t1));
    const Bit carry = need_carry
                          ? e.nand(gates::invert(e, x), gates::invert(e, y))
                          : e.constant(false);
    return {gates::invert(e, s), carry};
  }
  const auto t1 = e.nand(a, b);
  const auto t2 = e.nand(a, t1);
  const auto t3 = e.nand(b, t1);
  const auto s1 = e.nand(t2, t3);
  const auto t4 = e.nand(s1, c);
  const auto t5 = e.nand(s1, t4);
  const auto t6 = e.nand(c, t4);
  const auto sum = e.nand(t5, t6);
  return {sum, need_carry ? e.nand(t1, t4) : e.constant(false)};
}

// Ripple-carry sum of two equal-width bit vectors; the final carry is
// dropped.
template <BitEngine E>
std::vector<typename E::Bit> ripple_add(E& e,
                                        std::span<const typename E::Bit> a,
                                        std::span<const typename E::Bit> b,
                                        typename E::Bit carry_in) {
  if (a.size() != b.size()) throw UsageError("ripple_add: width mismatch");
  std::vector<typename E::Bit> out;
  out.reserve(a.size());
  auto carry = std::move(carry_in);
  for (size_t i = 0; i < a.size(); ++i) {
    auto sc = full_adder(e, a[i], b[i], carry, i + 1 < a.size());
    out.push_back(std::move(sc.sum));
    carry = std::move(sc.carry);
  }
  return out;
}

namespace detail {

inline void require_same_format(const FixedFormat& x, const FixedFormat& y,
                                const char* op) {
  if (!(x == y)) {
    throw UsageError(std::string(op) + ": operand formats differ (" +
                     std::to_string(x.total_bits) + "," +
                     std::to_string(x.frac_bits) + ") vs (" +
                     std::to_string(y.total_bits) + "," +
                     std::to_string(y.frac_bits) + ")");
  }
}

template <BitEngine E>
void require_width(const FixedWord<E>& w) {
  if (w.bits.size() != w.format.total_bits) {
    throw UsageError("fixed word has " + std::to_string(w.bits.size()) +
                     " bits, format says " +
                     std::to_string(w.format.total_bits));
  }
}

}  // namespace detail

template <BitEngine E>
FixedWord<E> add(E& e, const FixedWord<E>& x, const FixedWord<E>& y) {
  detail::require_same_format(x.format, y.format, "add");
  detail::require_width(x);
  detail::require_width(y);
  return {ripple_add<E>(e, x.bits, y.bits, e.constant(false)), x.format};
}

// x + NOT(y) + 1. The inversion is NAND against constant 1 and costs nothing.
template <BitEngine E>
FixedWord<E> sub(E& e, const FixedWord<E>& x, const FixedWord<E>& y) {
  detail::require_same_format(x.format, y.format, "sub");
  detail::require_width(x);
  detail::require_width(y);
  std::vector<typename E::Bit> inv;
  inv.reserve(y.bits.size());
  for (const auto& b : y.bits) inv.push_back(gates::invert(e, b));
  return {ripple_add<E>(e, x.bits, inv, e.constant(true)), x.format};
}

// --- multipliers ----------------------------------------------------------

// Low `out_width` bits of the product of the sign-extensions of x and y
// (out_width <= |x| + |y|). AND partial products, carry-save 3:2 layers
// until every column holds at most two bits, then one ripple-carry add.
// Constant-zero partial products are dropped; columns at or above
// out_width are never built.
template <BitEngine E>
std::vector<typename E::Bit> wallace_product(
    E& e, std::span<const typename E::Bit> x,
    std::span<const typename E::Bit> y, uint32_t out_width) {
  using Bit = typename E::Bit;
  if (x.empty() || y.empty()) throw UsageError("wallace_product: empty operand");
  if (out_width > x.size() + y.size()) {
    throw UsageError("wallace_product: out_width exceeds the full product");
  }
  const size_t nx = x.size();
  const size_t ny = y.size();

  // Sign extension repeats the top bit, so many partial products coincide;
  // each distinct AND is built once.
  std::vector<std::optional<Bit>> memo(nx * ny);
  auto partial = [&](size_t j, size_t i) -> const Bit& {
    const size_t jj = std::min(j, nx - 1);
    const size_t ii = std::min(i, ny - 1);
    auto& slot = memo[ii * nx + jj];
    if (!slot) slot = gates::and_(e, x[jj], y[ii]);
    return *slot;
  };

  std::vector<std::vector<Bit>> cols(out_width);
  for (uint32_t i = 0; i < out_width; ++i) {
    const Bit& yi = y[std::min<size_t>(i, ny - 1)];
    if (yi.is_constant && !yi.value) continue;
    for (uint32_t j = 0; i + j < out_width; ++j) {
      const Bit& pp = partial(j, i);
      if (pp.is_constant && !pp.value) continue;
      cols[i + j].push_back(pp);
    }
  }

  auto tallest = [&] {
    size_t h = 0;
    for (const auto& c : cols) h = std::max(h, c.size());
    return h;
  };
  while (tallest() > 2) {
    std::vector<std::vector<Bit>> next(out_width);
    for (uint32_t c = 0; c < out_width; ++c) {
      const auto& col = cols[c];
      const bool keep_carry = c + 1 < out_width;
      if (col.size() <= 2) {
        next[c].insert(next[c].end(), col.begin(), col.end());
        continue;
      }
      size_t k = 0;
      for (; k + 3 <= col.size(); k += 3) {
        auto sc = full_adder(e, col[k], col[k + 1], col[k + 2], keep_carry);
        next[c].push_back(std::move(sc.sum));
        if (keep_carry) next[c + 1].push_back(std::move(sc.carry));
      }
      if (col.size() - k == 2) {
        auto sc = half_adder(e, col[k], col[k + 1], keep_carry);
        next[c].push_back(std::move(sc.sum));
        if (keep_carry) next[c + 1].push_back(std::move(sc.carry));
      } else if (col.size() - k == 1) {
        next[c].push_back(col[k]);
      }
    }
    // Folding can yield constant zeros; drop them.
    for (auto& col : next) {
      std::erase_if(col, [](const Bit& b) { return b.is_constant && !b.value; });
    }
    cols = std::move(next);
  }

  std::vector<Bit> row0, row1;
  row0.reserve(out_width);
  row1.reserve(out_width);
  for (const auto& col : cols) {
    row0.push_back(col.size() > 0 ? col[0] : e.constant(false));
    row1.push_back(col.size() > 1 ? col[1] : e.constant(false));
  }
  return ripple_add<E>(e, row0, row1, e.constant(false));
}

// Integer product modulo 2^F (high bits dropped).
template <BitEngine E>
FixedWord<E> mul_integer(E& e, const FixedWord<E>& x, const FixedWord<E>& y) {
  detail::require_same_format(x.format, y.format, "mul_integer");
  detail::require_width(x);
  detail::require_width(y);
  return {wallace_product<E>(e, x.bits, y.bits, x.format.total_bits), x.format};
}

// Fixed-point product: bits [f, f+F) of the 2F-bit signed product, i.e. an
// arithmetic right shift by f (truncation toward -inf) then wrap to F bits.
template <BitEngine E>
FixedWord<E> mul_fixed(E& e, const FixedWord<E>& x, const FixedWord<E>& y) {
  detail::require_same_format(x.format, y.format, "mul_fixed");
  detail::require_width(x);
  detail::require_width(y);
  const uint32_t F = x.format.total_bits;
  const uint32_t f = x.format.frac_bits;
  auto wide = wallace_product<E>(e, x.bits, y.bits, F + f);
  return {std::vector<typename E::Bit>(wide.begin() + f, wide.end()), x.format};
}

// Product with an unencrypted constant given as a raw fixed-point integer.
template <BitEngine E>
FixedWord<E> mul_const_raw(E& e, const FixedWord<E>& x, int64_t c_raw) {
  return mul_fixed(e, x, constant_word(e, c_raw, x.format));
}

template <BitEngine E>
FixedWord<E> mul_const(E& e, const FixedWord<E>& x, double c) {
  return mul_const_raw(e, x, encode(c, x.format));
}

}  // namespace fhefft

#endif  // FHEFFT_ARITH_HPP_
