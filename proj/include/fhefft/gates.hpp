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

// Logic gates built from NAND only.
//
//   gate   NANDs   construction
//   NOT      1     NAND(a, a)
//   AND      2     NOT(NAND(a, b))
//   OR       3     NAND(NOT a, NOT b)
//   XOR      4     t = NAND(a, b); NAND(NAND(a, t), NAND(b, t))
//   NOR      4     NOT(OR(a, b))
//   XNOR     5     NOT(XOR(a, b))
//
// Costs are for non-constant operands. With a constant operand every gate
// folds to a wire, a free inversion or a constant.

#ifndef FHEFFT_GATES_HPP_
#define FHEFFT_GATES_HPP_

#include "fhefft/bit_engine.hpp"

namespace fhefft::gates {

template <BitEngine E>
using Bit = typename E::Bit;

template <BitEngine E>
Bit<E> not_(E& e, const Bit<E>& a) {
  return e.nand(a, a);
}

// NOT as NAND against the plaintext constant 1: folded, zero NAND cost.
template <BitEngine E>
Bit<E> invert(E& e, const Bit<E>& a) {
  return e.nand(a, e.constant(true));
}

namespace detail {

// Splits (a, b) into (constant, other) when at least one is constant.
template <BitEngine E>
bool split_constant(const Bit<E>& a, const Bit<E>& b, const Bit<E>** k,
                    const Bit<E>** x) {
  if (!a.is_constant && !b.is_constant) return false;
  *k = a.is_constant ? &a : &b;
  *x = a.is_constant ? &b : &a;
  return true;
}

}  // namespace detail

template <BitEngine E>
Bit<E> and_(E& e, const Bit<E>& a, const Bit<E>& b) {
  const Bit<E>* k;
  const Bit<E>* x;
  if (detail::split_constant<E>(a, b, &k, &x)) {
    return k->value ? *x : e.constant(false);
  }
  return not_(e, e.nand(a, b));
}

template <BitEngine E>
Bit<E> or_(E& e, const Bit<E>& a, const Bit<E>& b) {
  const Bit<E>* k;
  const Bit<E>* x;
  if (detail::split_constant<E>(a, b, &k, &x)) {
    return k->value ? e.constant(true) : *x;
  }
  return e.nand(not_(e, a), not_(e, b));
}

template <BitEngine E>
Bit<E> xor_(E& e, const Bit<E>& a, const Bit<E>& b) {
  const Bit<E>* k;
  const Bit<E>* x;
  if (detail::split_constant<E>(a, b, &k, &x)) {
    return k->value ? invert(e, *x) : *x;
  }
  const auto t = e.nand(a, b);
  return e.nand(e.nand(a, t), e.nand(b, t));
}

template <BitEngine E>
Bit<E> nor_(E& e, const Bit<E>& a, const Bit<E>& b) {
  if (a.is_constant || b.is_constant) return invert(e, or_(e, a, b));
  return not_(e, or_(e, a, b));
}

template <BitEngine E>
Bit<E> xnor_(E& e, const Bit<E>& a, const Bit<E>& b) {
  if (a.is_constant || b.is_constant) return invert(e, xor_(e, a, b));
  return not_(e, xor_(e, a, b));
}

}  // namespace fhefft::gates

#endif  // FHEFFT_GATES_HPP_
