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

#include "fhefft/error_model.hpp"

#include <cmath>

#include "fhefft/fft.hpp"

namespace fhefft {

namespace {

double ws_fallback(size_t n) {
  return static_cast<double>(n) / 2.0 * std::log2(static_cast<double>(n));
}

}  // namespace

void ErrorParams::validate() const {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw UsageError("delta must lie in [0, 1)");
  }
  if (!(x_bound > 0.0) || !std::isfinite(x_bound)) {
    throw UsageError("x_bound must be positive");
  }
  if (!is_power_of_two(m_points)) {
    throw UsageError("m_points must be a power of two");
  }
  if (w_sum && (*w_sum < 0.0 || *w_sum > ws_fallback(m_points) + 1e-9)) {
    throw UsageError("w_sum must lie in [0, (N/2) log2 N]");
  }
}

ErrorParams ErrorParams::for_format(const FixedFormat& fmt, size_t m_points,
                                    double x_bound) {
  fmt.validate();
  return {fmt.delta(), x_bound, m_points, std::nullopt};
}

double fft_error_bound(const ErrorParams& p) {
  p.validate();
  const double n = static_cast<double>(p.m_points);
  return p.delta * (n / 2.0) * (std::log2(n) + p.x_bound + 1.0);
}

double fft_error_bound_ws(const ErrorParams& p) {
  p.validate();
  const double n = static_cast<double>(p.m_points);
  const double ws = p.w_sum.value_or(ws_fallback(p.m_points));
  return p.delta * (ws + (n / 2.0) * (p.x_bound + 1.0));
}

double fft_2d_error_bound(size_t rows, size_t cols, double delta,
                          double x_bound) {
  const double row_pass = fft_error_bound({delta, x_bound, cols, std::nullopt});
  const double col_x = std::sqrt(2.0) * static_cast<double>(cols) * x_bound;
  const double col_pass = fft_error_bound({delta, col_x, rows, std::nullopt});
  return std::sqrt(2.0) * static_cast<double>(rows) * row_pass + col_pass;
}

std::pair<double, double> cpmult_error(double a, double b, double c, double d,
                                       double delta) {
  return {delta * (a + c - b - d), delta * (a + b + c + d)};
}

ButterflyError butterfly_error(std::complex<double> w, std::complex<double> xj,
                               double delta) {
  const double s = w.real() + w.imag() + xj.real() + xj.imag();
  return {delta * (s + 1.0), delta * (1.0 - s)};
}

double butterfly_error_magnitude(std::complex<double> w,
                                 std::complex<double> xj, double delta) {
  return delta * (std::fabs(w.real()) + std::fabs(w.imag()) +
                  std::fabs(xj.real()) + std::fabs(xj.imag()) + 1.0);
}

void GateCostModel::validate() const {
  if (fixed_width == 0 || ct_side == 0 || signal_len == 0) {
    throw UsageError("cost model fields must be positive");
  }
}

CostOp parse_cost_op(const std::string& name) {
  if (name == "add") return CostOp::kAdd;
  if (name == "mul") return CostOp::kMul;
  if (name == "fft") return CostOp::kFft;
  throw UsageError("unknown cost op '" + name + "' (add, mul or fft)");
}

uint64_t nand_cost(const GateCostModel& model, CostOp op) {
  model.validate();
  const uint64_t f = model.fixed_width;
  const auto log_f = static_cast<uint64_t>(std::ceil(std::log2(static_cast<double>(f))));
  const uint64_t add = 36 * f;
  const uint64_t mul = 288 * f * f * log_f;
  switch (op) {
    case CostOp::kAdd:
      return add;
    case CostOp::kMul:
      return mul;
    case CostOp::kFft: {
      const uint64_t butterflies =
          model.signal_len / 2 * log2_exact(model.signal_len);
      return butterflies * (4 * mul + 6 * add);
    }
  }
  return 0;
}

uint64_t space_cost(const GateCostModel& model) {
  return model.signal_total * model.fixed_width * model.ct_side * model.ct_side;
}

RangeReport analyze_range(size_t rows, size_t cols, double x_bound,
                          const FixedFormat& fmt) {
  fmt.validate();
  RangeReport r;
  r.worst_magnitude = std::sqrt(2.0) * static_cast<double>(rows) *
                      static_cast<double>(cols) * x_bound;
  r.limit = fmt.max_magnitude();
  r.overflow_possible = r.worst_magnitude >= r.limit;
  return r;
}

}  // namespace fhefft
