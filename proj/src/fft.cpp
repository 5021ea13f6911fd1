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

#include "fhefft/fft.hpp"

#include <cmath>
#include <numbers>

namespace fhefft {

bool is_power_of_two(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned log2_exact(size_t n) {
  if (!is_power_of_two(n)) {
    throw UsageError("length " + std::to_string(n) + " is not a power of two");
  }
  unsigned k = 0;
  while ((size_t{1} << k) < n) ++k;
  return k;
}

size_t reverse_bits(size_t i, unsigned bits) {
  size_t r = 0;
  for (unsigned b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
  return r;
}

std::vector<size_t> bit_reverse_permutation(size_t m) {
  const unsigned bits = log2_exact(m);
  std::vector<size_t> p(m);
  for (size_t i = 0; i < m; ++i) p[i] = reverse_bits(i, bits);
  return p;
}

TwiddleTable::TwiddleTable(size_t size, const FixedFormat& fmt)
    : size_(size), format_(fmt) {
  log2_exact(size);
  fmt.validate();
  if (fmt.total_bits - fmt.frac_bits < 2) {
    throw UsageError("twiddles need at least two integer bits");
  }
  entries_.reserve(size / 2);
  for (size_t k = 0; k < size / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(size);
    entries_.push_back({encode(std::cos(angle), fmt), encode(std::sin(angle), fmt)});
  }
}

TwiddleTable::TwiddleTable(size_t size, const FixedFormat& fmt,
                           std::vector<Twiddle> entries)
    : size_(size), format_(fmt), entries_(std::move(entries)) {
  log2_exact(size);
  fmt.validate();
  if (entries_.size() != size / 2) {
    throw UsageError("twiddle table for M=" + std::to_string(size) +
                     " needs " + std::to_string(size / 2) + " entries, got " +
                     std::to_string(entries_.size()));
  }
  const int64_t one = fmt.scale();
  for (const auto& w : entries_) {
    if (std::llabs(w.re) > one || std::llabs(w.im) > one) {
      throw RangeError("twiddle component exceeds magnitude 1");
    }
  }
}

double TwiddleTable::weight_sum() const {
  double total = 0.0;
  for (size_t len = 2; len <= size_; len *= 2) {
    const size_t groups = size_ / len;
    for (size_t j = 0; j < len / 2; ++j) {
      const auto& w = for_stage(len, j);
      const double mag = std::hypot(decode(w.re, format_), decode(w.im, format_));
      total += static_cast<double>(groups) * std::min(1.0, mag);
    }
  }
  return total;
}

}  // namespace fhefft
