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

// Error experiments: run the fixed-point circuit FFT on random signals or
// images and compare against an independent double-precision FFT.

#ifndef FHEFFT_HARNESS_HPP_
#define FHEFFT_HARNESS_HPP_

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fhefft/arith.hpp"
#include "fhefft/bit_engine.hpp"
#include "fhefft/fft.hpp"
#include "fhefft/fhe_core.hpp"

namespace fhefft {

using Complex = std::complex<double>;

enum class Backend { kClear, kFhe };

Backend parse_backend(const std::string& name);
std::string backend_name(Backend b);

// Unnormalized forward DFT by recursive radix-2 splitting in doubles.
std::vector<Complex> reference_fft(std::span<const Complex> x);
std::vector<Complex> reference_fft_2d(std::span<const Complex> x, size_t rows,
                                      size_t cols);

struct ErrorReport {
  size_t size = 0;  // points per transform (rows * cols)
  size_t rows = 1;
  size_t cols = 0;
  size_t trials = 0;
  double total_error = 0.0;  // sum of |error| over every real component
  double mean_error = 0.0;   // total / (2 * size * trials)
  double variance = 0.0;     // population variance of |error|
  double std_dev = 0.0;
  double max_error = 0.0;
  double bound = 0.0;        // analytical bound on any single component
  uint64_t nand_count = 0;   // per transform
  double wall_time = 0.0;    // seconds, all trials
  FixedFormat format;
  Backend backend = Backend::kClear;

  bool within_bound() const { return max_error <= bound; }
};

// Streams |got - want| per component. Merging is associative.
class ErrorAccumulator {
 public:
  void add(std::span<const Complex> got, std::span<const Complex> want);
  void merge(const ErrorAccumulator& other);

  size_t count() const { return count_; }
  double total() const { return total_; }
  double max() const { return max_; }
  double mean() const;
  double variance() const;

 private:
  size_t count_ = 0;
  double total_ = 0.0;
  double total_sq_ = 0.0;
  double max_ = 0.0;
};

struct TransformResult {
  std::vector<Complex> spectrum;
  GateStats gates;
  FftStats fft;
};

// Quantizes, transforms on the cleartext engine and decodes.
TransformResult transform_clear(std::span<const Complex> values, size_t rows,
                                size_t cols, const FixedFormat& fmt);
// Same on the encrypted engine; encrypts under keys and decrypts at the end.
TransformResult transform_fhe(std::span<const Complex> values, size_t rows,
                              size_t cols, const FixedFormat& fmt,
                              const KeyPair& keys, uint64_t seed,
                              unsigned threads = 1);

struct ExperimentConfig {
  FixedFormat format;
  size_t trials = 100;
  uint64_t seed = 1;
  Backend backend = Backend::kClear;
  unsigned threads = 1;  // concurrent trials
  // Encrypted backend only. Keys are generated from seed when unset.
  SchemeParams scheme = SchemeParams::deep();
  std::optional<KeyPair> keys;
};

// Components uniform in [0, 1].
std::vector<Complex> random_signal(size_t n, std::mt19937_64& rng);

// Seed for trial t, independent of scheduling.
uint64_t trial_seed(uint64_t seed, uint64_t trial);

ErrorReport run_1d_experiment(size_t m, const ExperimentConfig& cfg);

struct Image {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> pixels;  // row-major, in [0, 1]

  std::vector<Complex> as_complex() const;
};

Image random_image(size_t rows, size_t cols, std::mt19937_64& rng);

// One trial per image; cfg.trials is ignored.
ErrorReport run_2d_experiment(std::span<const Image> images,
                              const ExperimentConfig& cfg);

// Compare a decoded spectrum with the oracle transform of the plain input.
ErrorReport verify_spectrum(std::span<const Complex> input,
                            std::span<const Complex> spectrum, size_t rows,
                            size_t cols, const FixedFormat& fmt);

std::string report_to_json(const ErrorReport& r, int indent = 2);
std::string reports_to_json(std::span<const ErrorReport> reports,
                            int indent = 2);
// Aligned columns: size, total, mean, variance, std dev, max, bound.
std::string reports_to_table(std::span<const ErrorReport> reports);

}  // namespace fhefft

#endif  // FHEFFT_HARNESS_HPP_
