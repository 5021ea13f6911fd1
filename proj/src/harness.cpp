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

#include "fhefft/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fhefft/error_model.hpp"

namespace fhefft {

Backend parse_backend(const std::string& name) {
  if (name == "clear") return Backend::kClear;
  if (name == "fhe") return Backend::kFhe;
  throw UsageError("unknown backend '" + name + "' (clear or fhe)");
}

std::string backend_name(Backend b) {
  return b == Backend::kClear ? "clear" : "fhe";
}

std::vector<Complex> reference_fft(std::span<const Complex> x) {
  const size_t n = x.size();
  if (n <= 1) return {x.begin(), x.end()};
  if (n % 2 != 0) throw UsageError("reference_fft needs a power-of-two length");
  std::vector<Complex> even, odd;
  even.reserve(n / 2);
  odd.reserve(n / 2);
  for (size_t i = 0; i < n; i += 2) {
    even.push_back(x[i]);
    odd.push_back(x[i + 1]);
  }
  const auto e = reference_fft(even);
  const auto o = reference_fft(odd);
  std::vector<Complex> out(n);
  for (size_t k = 0; k < n / 2; ++k) {
    const Complex t = std::polar(1.0, -2.0 * std::numbers::pi *
                                          static_cast<double>(k) /
                                          static_cast<double>(n)) *
                      o[k];
    out[k] = e[k] + t;
    out[k + n / 2] = e[k] - t;
  }
  return out;
}

std::vector<Complex> reference_fft_2d(std::span<const Complex> x, size_t rows,
                                      size_t cols) {
  if (rows * cols != x.size()) throw UsageError("reference_fft_2d: bad shape");
  std::vector<Complex> out(x.begin(), x.end());
  std::vector<Complex> line(cols);
  for (size_t r = 0; r < rows; ++r) {
    std::copy_n(out.begin() + r * cols, cols, line.begin());
    const auto y = reference_fft(line);
    std::copy(y.begin(), y.end(), out.begin() + r * cols);
  }
  line.resize(rows);
  for (size_t c = 0; c < cols; ++c) {
    for (size_t r = 0; r < rows; ++r) line[r] = out[r * cols + c];
    const auto y = reference_fft(line);
    for (size_t r = 0; r < rows; ++r) out[r * cols + c] = y[r];
  }
  return out;
}

void ErrorAccumulator::add(std::span<const Complex> got,
                           std::span<const Complex> want) {
  if (got.size() != want.size()) {
    throw UsageError("error accumulator: length mismatch");
  }
  for (size_t i = 0; i < got.size(); ++i) {
    for (double d : {std::fabs(got[i].real() - want[i].real()),
                     std::fabs(got[i].imag() - want[i].imag())}) {
      ++count_;
      total_ += d;
      total_sq_ += d * d;
      max_ = std::max(max_, d);
    }
  }
}

void ErrorAccumulator::merge(const ErrorAccumulator& other) {
  count_ += other.count_;
  total_ += other.total_;
  total_sq_ += other.total_sq_;
  max_ = std::max(max_, other.max_);
}

double ErrorAccumulator::mean() const {
  return count_ == 0 ? 0.0 : total_ / static_cast<double>(count_);
}

double ErrorAccumulator::variance() const {
  if (count_ == 0) return 0.0;
  const double m = mean();
  return std::max(0.0, total_sq_ / static_cast<double>(count_) - m * m);
}

namespace {

template <BitEngine E>
TransformResult run_transform(E& engine, std::span<const Complex> values,
                              size_t rows, size_t cols,
                              const FixedFormat& fmt) {
  TransformResult r;
  auto signal = load_signal(engine, values, rows, cols, fmt);
  auto spectrum = fft_auto(engine, std::move(signal), &r.fft);
  r.spectrum = read_signal(engine, spectrum);
  r.gates = engine.stats();
  return r;
}

double input_bound(std::span<const Complex> x, const FixedFormat& fmt) {
  double b = 0.0;
  for (const auto& v : x) {
    b = std::max({b, std::fabs(v.real()), std::fabs(v.imag())});
  }
  return std::max(b, fmt.delta());
}

double shape_bound(size_t rows, size_t cols, const FixedFormat& fmt,
                   double x_bound) {
  if (rows == 1) {
    return fft_error_bound(ErrorParams::for_format(fmt, cols, x_bound));
  }
  return fft_2d_error_bound(rows, cols, fmt.delta(), x_bound);
}

// Runs job(i) for i < n on up to `threads` workers, rethrowing the first
// failure.
template <class Job>
void parallel_for(size_t n, unsigned threads, Job job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct TrialInput {
  std::vector<Complex> values;
  size_t rows;
  size_t cols;
  uint64_t seed;
};

ErrorReport run_trials(const std::vector<TrialInput>& inputs,
                       const ExperimentConfig& cfg, double x_bound) {
  cfg.format.validate();
  if (inputs.empty()) throw UsageError("experiment needs at least one trial");
  std::optional<KeyPair> generated;
  const KeyPair* keys = nullptr;
  if (cfg.backend == Backend::kFhe) {
    if (cfg.keys) {
      keys = &*cfg.keys;
    } else {
      generated = keygen(cfg.scheme, cfg.seed);
      keys = &*generated;
    }
  }

  std::vector<ErrorAccumulator> acc(inputs.size());
  std::vector<uint64_t> nands(inputs.size());
  const auto start = std::chrono::steady_clock::now();
  parallel_for(inputs.size(), cfg.threads, [&](size_t i) {
    const auto& in = inputs[i];
    const TransformResult res =
        cfg.backend == Backend::kClear
            ? transform_clear(in.values, in.rows, in.cols, cfg.format)
            : transform_fhe(in.values, in.rows, in.cols, cfg.format, *keys,
                            in.seed);
    const auto want = in.rows == 1
                          ? reference_fft(in.values)
                          : reference_fft_2d(in.values, in.rows, in.cols);
    acc[i].add(res.spectrum, want);
    nands[i] = res.gates.nand_count;
  });
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ErrorAccumulator total;
  for (const auto& a : acc) total.merge(a);

  ErrorReport r;
  r.rows = inputs.front().rows;
  r.cols = inputs.front().cols;
  r.size = r.rows * r.cols;
  r.trials = inputs.size();
  r.total_error = total.total();
  r.mean_error = total.mean();
  r.variance = total.variance();
  r.std_dev = std::sqrt(r.variance);
  r.max_error = total.max();
  r.bound = shape_bound(r.rows, r.cols, cfg.format, x_bound);
  r.nand_count = *std::max_element(nands.begin(), nands.end());
  r.wall_time = elapsed;
  r.format = cfg.format;
  r.backend = cfg.backend;
  return r;
}

}  // namespace

TransformResult transform_clear(std::span<const Complex> values, size_t rows,
                                size_t cols, const FixedFormat& fmt) {
  ClearEngine engine;
  return run_transform(engine, values, rows, cols, fmt);
}

TransformResult transform_fhe(std::span<const Complex> values, size_t rows,
                              size_t cols, const FixedFormat& fmt,
                              const KeyPair& keys, uint64_t seed,
                              unsigned threads) {
  FheEngine engine(keys, seed, threads);
  return run_transform(engine, values, rows, cols, fmt);
}

std::vector<Complex> random_signal(size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Complex> x(n);
  for (auto& v : x) {
    const double re = u(rng);
    v = {re, u(rng)};
  }
  return x;
}

uint64_t trial_seed(uint64_t seed, uint64_t trial) {
  // splitmix64 finalizer over the pair.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ErrorReport run_1d_experiment(size_t m, const ExperimentConfig& cfg) {
  log2_exact(m);
  std::vector<TrialInput> inputs;
  inputs.reserve(cfg.trials);
  for (size_t t = 0; t < cfg.trials; ++t) {
    const uint64_t s = trial_seed(cfg.seed, t);
    std::mt19937_64 rng(s);
    inputs.push_back({random_signal(m, rng), 1, m, s});
  }
  return run_trials(inputs, cfg, 1.0);
}

std::vector<Complex> Image::as_complex() const {
  std::vector<Complex> out;
  out.reserve(pixels.size());
  for (double p : pixels) out.emplace_back(p, 0.0);
  return out;
}

Image random_image(size_t rows, size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img{rows, cols, std::vector<double>(rows * cols)};
  for (auto& p : img.pixels) p = u(rng);
  return img;
}

ErrorReport run_2d_experiment(std::span<const Image> images,
                              const ExperimentConfig& cfg) {
  std::vector<TrialInput> inputs;
  for (size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    if (img.pixels.size() != img.rows * img.cols ||
        img.rows != images.front().rows || img.cols != images.front().cols) {
      throw UsageError("images must share one shape");
    }
    inputs.push_back({img.as_complex(), img.rows, img.cols,
                      trial_seed(cfg.seed, i)});
  }
  return run_trials(inputs, cfg, 1.0);
}

ErrorReport verify_spectrum(std::span<const Complex> input,
                            std::span<const Complex> spectrum, size_t rows,
                            size_t cols, const FixedFormat& fmt) {
  if (input.size() != rows * cols || spectrum.size() != input.size()) {
    throw UsageError("verify: signal and spectrum lengths differ");
  }
  const auto want = rows == 1 ? reference_fft(input)
                              : reference_fft_2d(input, rows, cols);
  ErrorAccumulator acc;
  acc.add(spectrum, want);
  ErrorReport r;
  r.rows = rows;
  r.cols = cols;
  r.size = rows * cols;
  r.trials = 1;
  r.total_error = acc.total();
  r.mean_error = acc.mean();
  r.variance = acc.variance();
  r.std_dev = std::sqrt(r.variance);
  r.max_error = acc.max();
  r.bound = shape_bound(rows, cols, fmt, input_bound(input, fmt));
  r.format = fmt;
  return r;
}

namespace {

nlohmann::ordered_json to_json(const ErrorReport& r) {
  nlohmann::ordered_json j;
  j["size"] = r.size;
  j["rows"] = r.rows;
  j["cols"] = r.cols;
  j["trials"] = r.trials;
  j["total_error"] = r.total_error;
  j["mean_error"] = r.mean_error;
  j["variance"] = r.variance;
  j["std_dev"] = r.std_dev;
  j["max_error"] = r.max_error;
  j["error_bound"] = r.bound;
  j["within_bound"] = r.within_bound();
  j["nand_count"] = r.nand_count;
  j["wall_time"] = r.wall_time;
  j["total_bits"] = r.format.total_bits;
  j["frac_bits"] = r.format.frac_bits;
  j["backend"] = backend_name(r.backend);
  j["x_bound_convention"] = "component-wise max(|Re|, |Im|)";
  return j;
}

}  // namespace

std::string report_to_json(const ErrorReport& r, int indent) {
  return to_json(r).dump(indent);
}

std::string reports_to_json(std::span<const ErrorReport> reports, int indent) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(indent);
}

std::string reports_to_table(std::span<const ErrorReport> reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-9s %6s %11s %11s %11s %11s %11s %11s\n",
                "size", "trials", "total", "mean", "variance", "std_dev",
                "max", "bound");
  out << line;
  for (const auto& r : reports) {
    const std::string size = r.rows == 1 ? std::to_string(r.cols) + " pt"
                                         : std::to_string(r.rows) + "x" +
                                               std::to_string(r.cols);
    std::snprintf(line, sizeof line,
                  "%-9s %6zu %11.4g %11.4g %11.4g %11.4g %11.4g %11.4g\n",
                  size.c_str(), r.trials, r.total_error, r.mean_error,
                  r.variance, r.std_dev, r.max_error, r.bound);
    out << line;
  }
  return out.str();
}

}  // namespace fhefft
