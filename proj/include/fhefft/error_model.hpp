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

// Analytical error bounds for the fixed-point FFT and a NAND-gate cost model.
//
// All bounds are per real component and first order in delta; products of
// two representation errors are dropped.

#ifndef FHEFFT_ERROR_MODEL_HPP_
#define FHEFFT_ERROR_MODEL_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "fhefft/arith.hpp"

namespace fhefft {

struct ErrorParams {
  double delta = 0.0;     // per-value representation error, 2^-f by default
  double x_bound = 1.0;   // max(|Re x|, |Im x|) over the input
  size_t m_points = 1;    // transform length N
  // Sum of twiddle magnitudes over all butterflies. Unset means the
  // (N/2) log2 N fallback.
  std::optional<double> w_sum;

  // Throws UsageError unless 0 <= delta < 1, x_bound > 0, N is a power of
  // two and w_sum <= (N/2) log2 N.
  void validate() const;

  static ErrorParams for_format(const FixedFormat& fmt, size_t m_points,
                                double x_bound);
};

// Delta * (N/2) * (log2 N + X_b + 1).
double fft_error_bound(const ErrorParams& p);
// Delta * (W_S + (N/2) * (X_b + 1)); never larger than fft_error_bound.
double fft_error_bound_ws(const ErrorParams& p);
// N == 1: no butterflies run and the bound only reflects quantization.
inline bool is_trivial_input(const ErrorParams& p) { return p.m_points < 2; }

// Row-column transform of a rows x cols image. The row pass error is
// carried through the column pass, which can scale a component error by
// at most sqrt(2) * rows; the column pass sees inputs bounded by
// sqrt(2) * cols * X_b.
double fft_2d_error_bound(size_t rows, size_t cols, double delta,
                          double x_bound);

// Error of (a + bi)(c + di) when every factor carries error delta:
// (delta * (a + c - b - d), delta * (a + b + c + d)).
std::pair<double, double> cpmult_error(double a, double b, double c, double d,
                                       double delta);

struct ButterflyError {
  double first;   // x_i + w * x_j
  double second;  // x_i - w * x_j
};

// Signed form: delta * (Re w + Im w + Re xj + Im xj + 1) for the first
// output and delta * (-Re w - Im w - Re xj - Im xj + 1) for the second.
ButterflyError butterfly_error(std::complex<double> w, std::complex<double> xj,
                               double delta);

// Same expression over absolute values; an upper bound for both outputs.
double butterfly_error_magnitude(std::complex<double> w,
                                 std::complex<double> xj, double delta);

struct GateCostModel {
  uint64_t fixed_width = 32;  // F
  uint64_t ct_side = 64;      // N_ct
  uint64_t signal_len = 8;    // M, points per transform
  uint64_t signal_total = 8;  // L, points in the whole signal

  void validate() const;
};

enum class CostOp { kAdd, kMul, kFft };

CostOp parse_cost_op(const std::string& name);

// add: 36 F. mul: 288 F^2 ceil(log2 F). fft: (M/2) log2 M butterflies, each
// four multiplications and six additions.
uint64_t nand_cost(const GateCostModel& model, CostOp op);

// L * F * N_ct^2 ciphertext entries.
uint64_t space_cost(const GateCostModel& model);

struct RangeReport {
  double worst_magnitude = 0.0;  // largest component any stage can reach
  double limit = 0.0;            // 2^(F-f-1)
  bool overflow_possible = false;
};

// Worst-case component magnitude of a rows x cols transform of inputs
// bounded by x_bound: sqrt(2) * rows * cols * x_bound (rows == 1 for 1D).
RangeReport analyze_range(size_t rows, size_t cols, double x_bound,
                          const FixedFormat& fmt);

}  // namespace fhefft

#endif  // FHEFFT_ERROR_MODEL_HPP_
