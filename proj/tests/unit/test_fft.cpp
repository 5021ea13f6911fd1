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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fhefft/error_model.hpp"

namespace fhefft {
namespace {

using Cx = std::complex<double>;

// O(M^2) DFT straight from the definition.
std::vector<Cx> naive_dft(const std::vector<Cx>& x) {
  const size_t m = x.size();
  std::vector<Cx> out(m);
  for (size_t k = 0; k < m; ++k) {
    Cx acc = 0;
    for (size_t n = 0; n < m; ++n) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((n * k) % m) /
                         static_cast<double>(m);
      acc += x[n] * Cx(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<Cx> run_clear(const std::vector<Cx>& x, const FixedFormat& fmt,
                          FftStats* stats = nullptr, size_t rows = 1) {
  ClearEngine e;
  auto s = load_signal(e, std::span<const Cx>(x), rows, x.size() / rows, fmt);
  return read_signal(e, rows == 1 ? fft_1d(e, std::move(s), TwiddleTable(x.size(), fmt), stats)
                                  : fft_2d(e, std::move(s), stats));
}

double max_component_error(const std::vector<Cx>& a, const std::vector<Cx>& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    m = std::max({m, std::fabs(a[i].real() - b[i].real()),
                  std::fabs(a[i].imag() - b[i].imag())});
  }
  return m;
}

TEST(BitReversal, Permutations) {
  EXPECT_EQ(bit_reverse_permutation(8),
            (std::vector<size_t>{0, 4, 2, 6, 1, 5, 3, 7}));
  EXPECT_EQ(bit_reverse_permutation(2), (std::vector<size_t>{0, 1}));
  std::vector<int> v(16);
  for (int i = 0; i < 16; ++i) v[i] = i;
  auto w = v;
  bit_reverse_permute(w);
  EXPECT_NE(w, v);
  bit_reverse_permute(w);
  EXPECT_EQ(w, v);
  EXPECT_THROW(bit_reverse_permutation(6), UsageError);
}

TEST(Twiddles, RoundedToNearestAndBounded) {
  const FixedFormat fmt{32, 16};
  const TwiddleTable t(16, fmt);
  ASSERT_EQ(t.entries().size(), 8u);
  for (size_t k = 0; k < 8; ++k) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / 16.0;
    EXPECT_EQ(t[k].re, std::llround(std::cos(ang) * 65536));
    EXPECT_EQ(t[k].im, std::llround(std::sin(ang) * 65536));
    EXPECT_LE(std::llabs(t[k].re), 65536);
    EXPECT_LE(std::llabs(t[k].im), 65536);
  }
  EXPECT_EQ(t[0], (Twiddle{65536, 0}));
  EXPECT_EQ(t[4], (Twiddle{0, -65536}));
  EXPECT_EQ(&t.for_stage(2, 0), &t[0]);
  EXPECT_EQ(&t.for_stage(16, 3), &t[3]);
  EXPECT_EQ(&t.for_stage(4, 1), &t[4]);
}

TEST(Twiddles, WeightSum) {
  const FixedFormat fmt{32, 16};
  for (size_t m : {2, 8, 64}) {
    const TwiddleTable t(m, fmt);
    const double cap = static_cast<double>(m) / 2 * std::log2(static_cast<double>(m));
    EXPECT_LE(t.weight_sum(), cap);
    EXPECT_NEAR(t.weight_sum(), cap, cap * 1e-4);
  }
}

TEST(Twiddles, ExternalTableValidation) {
  const FixedFormat fmt{16, 8};
  EXPECT_THROW(TwiddleTable(8, fmt, {{256, 0}}), UsageError);
  EXPECT_THROW(TwiddleTable(2, fmt, {{300, 0}}), RangeError);
  EXPECT_NO_THROW(TwiddleTable(2, fmt, {{256, 0}}));
}

TEST(Butterfly, UnitTwiddle) {
  const FixedFormat fmt{32, 16};
  ClearEngine e;
  ComplexFixed<ClearEngine> xi{input_word(e, 0, fmt), input_word(e, 0, fmt)};
  ComplexFixed<ClearEngine> xj{input_word(e, encode(0.5, fmt), fmt),
                               input_word(e, 0, fmt)};
  const auto [hi, lo] = butterfly(e, xi, xj, Twiddle{fmt.scale(), 0});
  EXPECT_DOUBLE_EQ(read_value(e, hi.re), 0.5);
  EXPECT_DOUBLE_EQ(read_value(e, lo.re), -0.5);
  EXPECT_DOUBLE_EQ(read_value(e, hi.im), 0.0);
  EXPECT_DOUBLE_EQ(read_value(e, lo.im), 0.0);
}

TEST(Butterfly, MinusITwiddle) {
  const FixedFormat fmt{32, 16};
  ClearEngine e;
  ComplexFixed<ClearEngine> xi{input_word(e, 0, fmt), input_word(e, 0, fmt)};
  ComplexFixed<ClearEngine> xj{input_word(e, 0, fmt),
                               input_word(e, encode(1.0, fmt), fmt)};
  const auto [hi, lo] = butterfly(e, xi, xj, Twiddle{0, -fmt.scale()});
  EXPECT_DOUBLE_EQ(read_value(e, hi.re), 1.0);
  EXPECT_DOUBLE_EQ(read_value(e, lo.re), -1.0);
  EXPECT_DOUBLE_EQ(read_value(e, hi.im), 0.0);
}

TEST(Butterfly, RandomAgainstFloatOracle) {
  const FixedFormat fmt{32, 16};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const TwiddleTable table(64, fmt);
  for (int i = 0; i < 100; ++i) {
    const Cx a(u(rng), u(rng)), b(u(rng), u(rng));
    const auto& w = table[rng() % 32];
    ClearEngine e;
    ComplexFixed<ClearEngine> xi{input_word(e, encode(a.real(), fmt), fmt),
                                 input_word(e, encode(a.imag(), fmt), fmt)};
    ComplexFixed<ClearEngine> xj{input_word(e, encode(b.real(), fmt), fmt),
                                 input_word(e, encode(b.imag(), fmt), fmt)};
    const auto [hi, lo] = butterfly(e, xi, xj, w);
    const Cx wd(decode(w.re, fmt), decode(w.im, fmt));
    const Cx t = wd * Cx(decode(encode(b.real(), fmt), fmt), decode(encode(b.imag(), fmt), fmt));
    const Cx ai(decode(encode(a.real(), fmt), fmt), decode(encode(a.imag(), fmt), fmt));
    // Four truncating products, two per component.
    EXPECT_LE(std::fabs(read_value(e, hi.re) - (ai + t).real()), 2 * fmt.delta());
    EXPECT_LE(std::fabs(read_value(e, hi.im) - (ai + t).imag()), 2 * fmt.delta());
    EXPECT_LE(std::fabs(read_value(e, lo.re) - (ai - t).real()), 2 * fmt.delta());
    EXPECT_LE(std::fabs(read_value(e, lo.im) - (ai - t).imag()), 2 * fmt.delta());
  }
}

TEST(Fft1d, Impulse) {
  const FixedFormat fmt{32, 16};
  std::vector<Cx> x(8, 0.0);
  x[0] = 1.0;
  for (const auto& v : run_clear(x, fmt)) {
    EXPECT_DOUBLE_EQ(v.real(), 1.0);
    EXPECT_DOUBLE_EQ(v.imag(), 0.0);
  }
}

TEST(Fft1d, ZeroIsExact) {
  const FixedFormat fmt{32, 16};
  for (const auto& v : run_clear(std::vector<Cx>(16, 0.0), fmt)) {
    EXPECT_EQ(v, Cx(0.0, 0.0));
  }
}

TEST(Fft1d, RandomSignalsWithinBound) {
  const FixedFormat fmt{32, 16};
  const double bound = fft_error_bound(ErrorParams::for_format(fmt, 8, 1.0));
  EXPECT_NEAR(bound, 3.052e-4, 1e-7);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Cx> x(8);
    for (auto& v : x) v = {u(rng), u(rng)};
    EXPECT_LE(max_component_error(run_clear(x, fmt), naive_dft(x)), bound);
  }
}

TEST(Fft1d, StructureCounts) {
  const FixedFormat fmt{16, 8};
  for (size_t m : {1u, 2u, 4u, 8u, 32u}) {
    FftStats stats;
    run_clear(std::vector<Cx>(m, 0.25), fmt, &stats);
    const unsigned lg = log2_exact(m);
    EXPECT_EQ(stats.stages, lg);
    EXPECT_EQ(stats.butterflies, m / 2 * lg);
  }
}

TEST(Fft1d, Linearity) {
  const FixedFormat fmt{32, 16};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<Cx> a(16), b(16), s(16);
  for (size_t i = 0; i < 16; ++i) {
    a[i] = {u(rng), u(rng)};
    b[i] = {u(rng), u(rng)};
    s[i] = a[i] + b[i];
  }
  const auto fa = run_clear(a, fmt), fb = run_clear(b, fmt), fs = run_clear(s, fmt);
  std::vector<Cx> sum(16);
  for (size_t i = 0; i < 16; ++i) sum[i] = fa[i] + fb[i];
  const double bound = fft_error_bound(ErrorParams::for_format(fmt, 16, 1.0));
  EXPECT_LE(max_component_error(sum, fs), 2 * bound);
}

TEST(Fft1d, Rejections) {
  const FixedFormat fmt{16, 8};
  ClearEngine e;
  const std::vector<Cx> x(8, 0.0);
  auto s = load_signal(e, std::span<const Cx>(x), 1, 8, fmt);
  EXPECT_THROW(fft_1d(e, s, TwiddleTable(16, fmt)), UsageError);
  EXPECT_THROW(fft_1d(e, s, TwiddleTable(8, FixedFormat{16, 9})), UsageError);
  const std::vector<Cx> y(6, 0.0);
  auto t = load_signal(e, std::span<const Cx>(y), 1, 6, fmt);
  EXPECT_THROW(fft_auto(e, t), UsageError);
}

TEST(Fft2d, ConstantImageIsDcOnly) {
  const FixedFormat fmt{32, 16};
  const auto out = run_clear(std::vector<Cx>(4, 0.75), fmt, nullptr, 2);
  EXPECT_DOUBLE_EQ(out[0].real(), 3.0);
  for (size_t i = 1; i < 4; ++i) EXPECT_EQ(out[i], Cx(0.0, 0.0)) << i;
}

TEST(Fft2d, SeparableImpulse) {
  const FixedFormat fmt{32, 16};
  std::vector<Cx> img(8 * 4, 0.0);
  img[1 * 4 + 2] = 1.0;  // impulse at (row 1, col 2)
  const auto out = run_clear(img, fmt, nullptr, 8);
  for (size_t r = 0; r < 8; ++r) {
    for (size_t c = 0; c < 4; ++c) {
      const double ang = -2.0 * std::numbers::pi *
                         (static_cast<double>(r) / 8.0 + 2.0 * static_cast<double>(c) / 4.0);
      const Cx want(std::cos(ang), std::sin(ang));
      EXPECT_NEAR(out[r * 4 + c].real(), want.real(), 1e-3);
      EXPECT_NEAR(out[r * 4 + c].imag(), want.imag(), 1e-3);
    }
  }
}

TEST(Fft2d, StructureCounts) {
  FftStats stats;
  run_clear(std::vector<Cx>(16 * 4, 0.1), FixedFormat{16, 8}, &stats, 4);
  // 4 rows of 16 points, then 16 columns of 4 points.
  EXPECT_EQ(stats.butterflies, 4u * 32 + 16u * 4);
}

TEST(FftFhe, TwoPointMatchesClear) {
  const FixedFormat fmt{8, 4};
  const auto keys = keygen(SchemeParams::medium(), 31);
  const std::vector<Cx> x{{0.5, -0.25}, {1.25, 0.75}};
  FheEngine e(keys, 4);
  auto s = load_signal(e, std::span<const Cx>(x), 1, 2, fmt);
  const auto got = read_signal(e, fft_1d(e, std::move(s), TwiddleTable(2, fmt)));
  EXPECT_EQ(got, run_clear(x, fmt));
  EXPECT_EQ(got[0], Cx(1.75, 0.5));
  EXPECT_EQ(got[1], Cx(-0.75, -1.0));
}

}  // namespace
}  // namespace fhefft
