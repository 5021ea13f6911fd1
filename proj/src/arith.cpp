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

#include "fhefft/arith.hpp"

#include <cmath>

namespace fhefft {

void FixedFormat::validate() const {
  if (frac_bits == 0 || frac_bits >= total_bits || total_bits > 62) {
    throw UsageError("fixed format needs 0 < f < F <= 62, got F=" +
                     std::to_string(total_bits) +
                     " f=" + std::to_string(frac_bits));
  }
}

double FixedFormat::delta() const {
  return std::ldexp(1.0, -static_cast<int>(frac_bits));
}

double FixedFormat::max_magnitude() const {
  return std::ldexp(1.0, static_cast<int>(total_bits - frac_bits) - 1);
}

int64_t encode(double x, const FixedFormat& fmt) {
  fmt.validate();
  if (!std::isfinite(x) || std::fabs(x) >= fmt.max_magnitude()) {
    throw RangeError("value " + std::to_string(x) +
                     " outside the fixed-point range +/-" +
                     std::to_string(fmt.max_magnitude()));
  }
  const int64_t raw = std::llround(std::ldexp(x, static_cast<int>(fmt.frac_bits)));
  const int64_t limit = int64_t{1} << (fmt.total_bits - 1);
  if (raw >= limit || raw < -limit) {
    throw RangeError("value " + std::to_string(x) + " rounds out of range");
  }
  return raw;
}

double decode(int64_t raw, const FixedFormat& fmt) {
  return std::ldexp(static_cast<double>(raw), -static_cast<int>(fmt.frac_bits));
}

std::vector<bool> to_bits(int64_t raw, uint32_t width) {
  std::vector<bool> bits(width);
  const auto u = static_cast<uint64_t>(raw);
  for (uint32_t i = 0; i < width; ++i) bits[i] = (u >> std::min(i, 63u)) & 1u;
  return bits;
}

int64_t from_bits(const std::vector<bool>& bits) {
  if (bits.empty() || bits.size() > 64) {
    throw UsageError("from_bits: width must be in [1, 64]");
  }
  uint64_t u = 0;
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) u |= uint64_t{1} << i;
  }
  if (bits.size() < 64 && bits.back()) u |= ~uint64_t{0} << bits.size();
  return static_cast<int64_t>(u);
}

int64_t wrap_signed(int64_t raw, uint32_t width) {
  return from_bits(to_bits(raw, width));
}

}  // namespace fhefft
