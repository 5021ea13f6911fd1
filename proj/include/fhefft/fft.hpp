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

// Radix-2 decimation-in-time FFT over fixed-point complex words.
//
// The transform is forward and unnormalized:
//
//     X[k] = sum_n x[n] * exp(-2*pi*i*n*k / M)
//
// The index permutation and loop structure are public; only the butterflies
// touch encrypted data. Twiddles are plaintext constants rounded to the
// nearest fixed-point value and enter through constant multiplication.

#ifndef FHEFFT_FFT_HPP_
#define FHEFFT_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fhefft/arith.hpp"
#include "fhefft/bit_engine.hpp"

namespace fhefft {

template <BitEngine E>
struct ComplexFixed {
  FixedWord<E> re;
  FixedWord<E> im;
};

// Row-major points; 1D signals have rows == 1.
template <BitEngine E>
struct SignalBuffer {
  std::vector<ComplexFixed<E>> points;
  size_t rows = 1;
  size_t cols = 0;

  size_t size() const { return points.size(); }
};

struct Twiddle {
  int64_t re = 0;
  int64_t im = 0;

  friend bool operator==(const Twiddle&, const Twiddle&) = default;
};

class TwiddleTable {
 public:
  // W_M^k = exp(-2*pi*i*k/M) for k < M/2, rounded at the format's f.
  TwiddleTable(size_t size, const FixedFormat& fmt);
  // Externally supplied entries; validated for count and |component| <= 1.
  TwiddleTable(size_t size, const FixedFormat& fmt, std::vector<Twiddle> entries);

  size_t size() const { return size_; }
  const FixedFormat& format() const { return format_; }
  const std::vector<Twiddle>& entries() const { return entries_; }
  const Twiddle& operator[](size_t k) const { return entries_[k]; }

  // Twiddle for butterfly j of a stage whose groups span `len` points:
  // W_len^j = W_M^(j*M/len).
  const Twiddle& for_stage(size_t len, size_t j) const {
    return entries_[j * (size_ / len)];
  }

  // Sum of min(1, |W|) over every butterfly of the transform, using the
  // quantized values. At most (M/2)*log2(M).
  double weight_sum() const;

 private:
  size_t size_;
  FixedFormat format_;
  std::vector<Twiddle> entries_;
};

bool is_power_of_two(size_t n);
unsigned log2_exact(size_t n);  // throws UsageError unless a power of two
size_t reverse_bits(size_t i, unsigned bits);
std::vector<size_t> bit_reverse_permutation(size_t m);

// Moves element i to reverse_bits(i, log2 M). Plaintext index shuffle.
template <class T>
void bit_reverse_permute(std::vector<T>& v) {
  const unsigned bits = log2_exact(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const size_t r = reverse_bits(i, bits);
    if (i < r) std::swap(v[i], v[r]);
  }
}

struct FftStats {
  size_t stages = 0;
  size_t butterflies = 0;
};

// (xi + w*xj, xi - w*xj). The complex product uses four constant
// multiplications, one subtraction and one addition; with the two output
// additions and two subtractions that is six real-valued equations.
template <BitEngine E>
std::pair<ComplexFixed<E>, ComplexFixed<E>> butterfly(E& e,
                                                      const ComplexFixed<E>& xi,
                                                      const ComplexFixed<E>& xj,
                                                      const Twiddle& w) {
  const auto t_re = sub(e, mul_const_raw(e, xj.re, w.re),
                        mul_const_raw(e, xj.im, w.im));
  const auto t_im = add(e, mul_const_raw(e, xj.re, w.im),
                        mul_const_raw(e, xj.im, w.re));
  ComplexFixed<E> hi{add(e, xi.re, t_re), add(e, xi.im, t_im)};
  ComplexFixed<E> lo{sub(e, xi.re, t_re), sub(e, xi.im, t_im)};
  return {std::move(hi), std::move(lo)};
}

// In-place transform of a contiguous run of points.
template <BitEngine E>
void fft_inplace(E& e, std::vector<ComplexFixed<E>>& x,
                 const TwiddleTable& table, FftStats* stats = nullptr) {
  if (table.size() != x.size()) {
    throw UsageError("twiddle table size " + std::to_string(table.size()) +
                     " does not match signal length " +
                     std::to_string(x.size()));
  }
  for (const auto& p : x) {
    if (!(p.re.format == table.format()) || !(p.im.format == table.format())) {
      throw UsageError("signal and twiddle formats differ");
    }
  }
  bit_reverse_permute(x);
  const size_t m = x.size();
  for (size_t len = 2; len <= m; len *= 2) {
    for (size_t start = 0; start < m; start += len) {
      for (size_t j = 0; j < len / 2; ++j) {
        auto [hi, lo] = butterfly(e, x[start + j], x[start + j + len / 2],
                                  table.for_stage(len, j));
        x[start + j] = std::move(hi);
        x[start + j + len / 2] = std::move(lo);
        if (stats) ++stats->butterflies;
      }
    }
    if (stats) ++stats->stages;
  }
}

template <BitEngine E>
SignalBuffer<E> fft_1d(E& e, SignalBuffer<E> s, const TwiddleTable& table,
                       FftStats* stats = nullptr) {
  if (s.rows != 1 || s.cols != s.points.size()) {
    throw UsageError("fft_1d expects a 1 x M signal");
  }
  log2_exact(s.cols);
  fft_inplace(e, s.points, table, stats);
  return s;
}

// Row-column decomposition: every row, then every column, in the same
// format.
template <BitEngine E>
SignalBuffer<E> fft_2d(E& e, SignalBuffer<E> img, FftStats* stats = nullptr) {
  if (img.rows * img.cols != img.points.size() || img.points.empty()) {
    throw UsageError("fft_2d: dimensions do not match point count");
  }
  log2_exact(img.rows);
  log2_exact(img.cols);
  const FixedFormat fmt = img.points.front().re.format;
  const TwiddleTable row_table(img.cols, fmt);
  const TwiddleTable col_table(img.rows, fmt);

  std::vector<ComplexFixed<E>> line;
  for (size_t r = 0; r < img.rows; ++r) {
    line.assign(img.points.begin() + r * img.cols,
                img.points.begin() + (r + 1) * img.cols);
    fft_inplace(e, line, row_table, stats);
    std::move(line.begin(), line.end(), img.points.begin() + r * img.cols);
  }
  for (size_t c = 0; c < img.cols; ++c) {
    line.clear();
    for (size_t r = 0; r < img.rows; ++r) line.push_back(img.points[r * img.cols + c]);
    fft_inplace(e, line, col_table, stats);
    for (size_t r = 0; r < img.rows; ++r) img.points[r * img.cols + c] = std::move(line[r]);
  }
  return img;
}

// Dispatches on shape: 1 x M signals use fft_1d, everything else fft_2d.
template <BitEngine E>
SignalBuffer<E> fft_auto(E& e, SignalBuffer<E> s, FftStats* stats = nullptr) {
  if (s.rows == 1) {
    if (s.points.empty()) throw UsageError("empty signal");
    const TwiddleTable table(s.cols, s.points.front().re.format);
    return fft_1d(e, std::move(s), table, stats);
  }
  return fft_2d(e, std::move(s), stats);
}

// Quantizes and feeds each component through engine.input.
template <BitEngine E>
SignalBuffer<E> load_signal(E& e, std::span<const std::complex<double>> values,
                            size_t rows, size_t cols, const FixedFormat& fmt) {
  if (rows * cols != values.size()) {
    throw UsageError("load_signal: dimensions do not match value count");
  }
  SignalBuffer<E> s{{}, rows, cols};
  s.points.reserve(values.size());
  for (const auto& v : values) {
    s.points.push_back({input_word(e, encode(v.real(), fmt), fmt),
                        input_word(e, encode(v.imag(), fmt), fmt)});
  }
  return s;
}

template <BitEngine E>
std::vector<std::complex<double>> read_signal(const E& e,
                                              const SignalBuffer<E>& s) {
  std::vector<std::complex<double>> out;
  out.reserve(s.points.size());
  for (const auto& p : s.points) {
    out.emplace_back(read_value(e, p.re), read_value(e, p.im));
  }
  return out;
}

}  // namespace fhefft

#endif  // FHEFFT_FFT_HPP_
