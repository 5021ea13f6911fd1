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

// fhefft: client/server FFT workflow on encrypted signals.
//
//   fhefft keygen  --preset deep --out keys          -> keys.pk, keys.sk
//   fhefft encrypt --signal x.txt --pk keys.pk --out x.ct
//   fhefft fft     --in x.ct --out X.ct               (public material only)
//   fhefft decrypt --in X.ct --sk keys.sk --out X.txt
//   fhefft verify  --signal x.txt --spectrum X.txt
//   fhefft bound   --size 8 --frac 16
//   fhefft bench   --sizes 8,16,32 --trials 100
//
// Exit codes: 0 ok, 1 other error, 2 parse error, 3 noise overflow or key
// mismatch, 4 bound violation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fhefft/error_model.hpp"
#include "fhefft/fft.hpp"
#include "fhefft/harness.hpp"
#include "fhefft/serialize.hpp"

namespace {

using namespace fhefft;

constexpr int kExitOther = 1;
constexpr int kExitParse = 2;
constexpr int kExitNoise = 3;
constexpr int kExitBound = 4;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string slurp(const std::string& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SchemeParams params_from(const std::string& file, const std::string& preset) {
  if (!file.empty()) return parse_params_json(slurp(file));
  return parse_params_json(R"({"preset":")" + preset + R"("})");
}

bool is_pgm(const std::string& path) {
  return path.size() > 4 && path.substr(path.size() - 4) == ".pgm";
}

// Text signal or PGM image (by extension).
TextSignal load_plain(const std::string& path) {
  auto in = open_in(path);
  if (!is_pgm(path)) return parse_signal_text(in, path);
  const Image img = read_pgm(in, path);
  if (!is_power_of_two(img.rows) || !is_power_of_two(img.cols)) {
    throw ParseError(path + ": image dimensions must be powers of two");
  }
  return {img.as_complex(), img.rows, img.cols};
}

struct Common {
  uint32_t bits = 32;
  uint32_t frac = 16;
  uint64_t seed = 1;
  unsigned threads = 1;
  std::string backend = "fhe";
};

void add_format(CLI::App* cmd, Common& c) {
  cmd->add_option("--bits", c.bits, "fixed-point width F")->capture_default_str();
  cmd->add_option("--frac", c.frac, "fractional bits f")->capture_default_str();
}

// --- keygen ---------------------------------------------------------------

struct KeygenArgs {
  std::string params_file, preset = "deep", out = "fhefft";
  uint64_t seed = 1;
};

int cmd_keygen(const KeygenArgs& a) {
  const SchemeParams p = params_from(a.params_file, a.preset);
  const KeyPair keys = keygen(p, a.seed);
  auto pk = open_out(a.out + ".pk");
  write_public_key(pk, keys.public_key);
  auto sk = open_out(a.out + ".sk");
  write_secret_key(sk, keys.secret_key);
  std::cout << params_to_json(p) << "\n";
  return 0;
}

// --- encrypt --------------------------------------------------------------

struct EncryptArgs {
  Common c;
  std::string signal, pk, out;
};

int cmd_encrypt(const EncryptArgs& a) {
  const FixedFormat fmt{a.c.bits, a.c.frac};
  fmt.validate();
  const TextSignal s = load_plain(a.signal);
  const RangeReport range = analyze_range(s.rows, s.cols, [&] {
    double b = 0;
    for (const auto& v : s.values) b = std::max({b, std::fabs(v.real()), std::fabs(v.imag())});
    return std::max(b, fmt.delta());
  }(), fmt);
  if (range.overflow_possible) {
    std::cerr << "warning: transform magnitudes may reach " << range.worst_magnitude
              << ", format limit is " << range.limit << "\n";
  }
  SignalContainer c;
  if (parse_backend(a.c.backend) == Backend::kClear) {
    ClearEngine e;
    c = pack_signal(e, load_signal(e, std::span<const Complex>(s.values), s.rows, s.cols, fmt));
  } else {
    if (a.pk.empty()) throw CLI::ValidationError("--pk", "required for the fhe backend");
    auto in = open_in(a.pk);
    FheEngine e(read_public_key(in), a.c.seed, a.c.threads);
    c = pack_signal(e, load_signal(e, std::span<const Complex>(s.values), s.rows, s.cols, fmt));
  }
  auto out = open_out(a.out);
  write_container(out, c);
  return 0;
}

// --- fft ------------------------------------------------------------------

struct FftArgs {
  Common c;
  std::string in, out, twiddles, stats, params_file;
};

template <BitEngine E>
SignalBuffer<E> run_fft(E& e, SignalBuffer<E> s, const std::string& twiddles,
                        FftStats* stats) {
  if (twiddles.empty()) return fft_auto(e, std::move(s), stats);
  if (s.rows != 1) throw UsageError("--twiddles applies to 1D signals only");
  return fft_1d(e, std::move(s), parse_twiddles_json(slurp(twiddles)), stats);
}

int cmd_fft(const FftArgs& a) {
  auto in = open_in(a.in);
  const SignalContainer c = read_container(in);
  if (!a.params_file.empty() && parse_params_json(slurp(a.params_file)) != c.params) {
    throw NoiseOverflowError("container parameters differ from --params");
  }
  FftStats fs;
  GateStats gs;
  SignalContainer result;
  const auto start = std::chrono::steady_clock::now();
  double noise = 0;
  if (c.backend == Backend::kClear) {
    ClearEngine e;
    auto out = run_fft(e, unpack_signal(e, c), a.twiddles, &fs);
    gs = e.stats();
    result = pack_signal(e, out);
  } else {
    // Server side: scheme parameters only, no key material.
    FheEngine e(c.params, a.c.threads);
    auto out = run_fft(e, unpack_signal(e, c), a.twiddles, &fs);
    gs = e.stats();
    result = pack_signal(e, out);
    for (const auto& b : result.bits) {
      if (b.ct) noise = std::max(noise, b.ct->noise_log2());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto out = open_out(a.out);
  write_container(out, result);
  nlohmann::ordered_json j;
  j["backend"] = backend_name(c.backend);
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  j["stages"] = fs.stages;
  j["butterflies"] = fs.butterflies;
  j["nand_count"] = gs.nand_count;
  j["max_depth"] = gs.max_depth;
  if (c.backend == Backend::kFhe) {
    j["noise_bound_log2"] = noise;
    j["noise_threshold_log2"] = c.params.noise_threshold_log2();
  }
  j["wall_time"] = secs;
  if (!a.stats.empty()) {
    auto s = open_out(a.stats);
    s << j.dump(2) << "\n";
  }
  std::cerr << j.dump() << "\n";
  return 0;
}

// --- decrypt --------------------------------------------------------------

struct DecryptArgs {
  std::string in, sk, out;
};

int cmd_decrypt(const DecryptArgs& a) {
  auto in = open_in(a.in);
  const SignalContainer c = read_container(in);
  TextSignal t{{}, c.rows, c.cols};
  if (c.backend == Backend::kClear) {
    ClearEngine e;
    t.values = read_signal(e, unpack_signal(e, c));
  } else {
    if (a.sk.empty()) throw CLI::ValidationError("--sk", "required for encrypted input");
    auto skin = open_in(a.sk);
    const SecretKey sk = read_secret_key(skin);
    if (sk.params != c.params) {
      throw NoiseOverflowError(
          "secret key parameters differ from the ciphertext's; use the key "
          "pair the signal was encrypted with");
    }
    KeyPair keys{{sk.params, {}}, sk};
    FheEngine e(keys, 0);
    t.values = read_signal(e, unpack_signal(e, c));
  }
  if (a.out.empty()) {
    write_signal_text(std::cout, t);
  } else {
    auto out = open_out(a.out);
    write_signal_text(out, t);
  }
  return 0;
}

// --- verify ---------------------------------------------------------------

struct VerifyArgs {
  Common c;
  std::string signal, spectrum, out;
};

int cmd_verify(const VerifyArgs& a) {
  const FixedFormat fmt{a.c.bits, a.c.frac};
  fmt.validate();
  const TextSignal x = load_plain(a.signal);
  auto in = open_in(a.spectrum);
  const TextSignal y = parse_signal_text(in, a.spectrum);
  if (x.rows != y.rows || x.cols != y.cols) {
    throw ParseError("signal and spectrum shapes differ");
  }
  const ErrorReport r = verify_spectrum(x.values, y.values, x.rows, x.cols, fmt);
  const std::string json = report_to_json(r);
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    out << json << "\n";
  }
  std::cout << json << "\n";
  return r.within_bound() ? 0 : kExitBound;
}

// --- bound ----------------------------------------------------------------

struct BoundArgs {
  Common c;
  size_t size = 8;
  size_t rows = 1;
  double x_bound = 1.0;
  uint64_t ct_side = 0;
  std::string params_file, preset = "toy";
};

int cmd_bound(const BoundArgs& a) {
  const FixedFormat fmt{a.c.bits, a.c.frac};
  fmt.validate();
  ErrorParams p = ErrorParams::for_format(fmt, a.size, a.x_bound);
  nlohmann::ordered_json j;
  j["size"] = a.size;
  j["rows"] = a.rows;
  j["delta"] = p.delta;
  j["x_bound"] = a.x_bound;
  j["x_bound_convention"] = "component-wise max(|Re|, |Im|)";
  j["error_bound"] = fft_error_bound(p);
  p.w_sum = TwiddleTable(a.size, fmt).weight_sum();
  j["w_sum"] = *p.w_sum;
  j["intermediate_bound"] = fft_error_bound_ws(p);
  j["trivial_input"] = is_trivial_input(p);
  if (a.rows > 1) {
    log2_exact(a.rows);
    j["bound_2d"] = fft_2d_error_bound(a.rows, a.size, p.delta, a.x_bound);
  }
  const SchemeParams sp = params_from(a.params_file, a.preset);
  const GateCostModel model{fmt.total_bits, a.ct_side ? a.ct_side : sp.ct_side(),
                            a.size, a.rows * a.size};
  nlohmann::ordered_json cost;
  cost["ct_side"] = model.ct_side;
  cost["nand_add"] = nand_cost(model, CostOp::kAdd);
  cost["nand_mul"] = nand_cost(model, CostOp::kMul);
  cost["nand_fft_1d"] = nand_cost(model, CostOp::kFft);
  cost["space_entries"] = space_cost(model);
  j["cost"] = cost;
  const RangeReport range = analyze_range(a.rows, a.size, a.x_bound, fmt);
  j["range"] = {{"worst_magnitude", range.worst_magnitude},
                {"limit", range.limit},
                {"overflow_possible", range.overflow_possible}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

// --- bench ----------------------------------------------------------------

struct BenchArgs {
  Common c;
  std::vector<size_t> sizes{8, 16, 32, 64, 128};
  size_t trials = 100;
  size_t random_images = 0;
  size_t image_side = 16;
  std::vector<std::string> images;
  std::string json, params_file, preset = "deep";
};

int cmd_bench(const BenchArgs& a) {
  ExperimentConfig cfg;
  cfg.format = {a.c.bits, a.c.frac};
  cfg.format.validate();
  cfg.trials = a.trials;
  cfg.seed = a.c.seed;
  cfg.backend = parse_backend(a.c.backend);
  cfg.threads = a.c.threads;
  if (cfg.backend == Backend::kFhe) cfg.scheme = params_from(a.params_file, a.preset);
  std::vector<ErrorReport> reports;
  for (size_t m : a.sizes) reports.push_back(run_1d_experiment(m, cfg));
  std::vector<Image> imgs;
  for (const auto& path : a.images) {
    auto in = open_in(path);
    imgs.push_back(read_pgm(in, path));
  }
  std::mt19937_64 rng(a.c.seed);
  for (size_t i = 0; i < a.random_images; ++i) {
    imgs.push_back(random_image(a.image_side, a.image_side, rng));
  }
  if (!imgs.empty()) reports.push_back(run_2d_experiment(imgs, cfg));
  std::cout << reports_to_table(reports);
  if (!a.json.empty()) {
    auto out = open_out(a.json);
    out << reports_to_json(reports) << "\n";
  }
  for (const auto& r : reports) {
    if (!r.within_bound()) return kExitBound;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point FFT over GSW-encrypted bits"};
  app.require_subcommand(1);

  KeygenArgs kg;
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a key pair");
  keygen_cmd->add_option("--params", kg.params_file, "scheme parameter JSON file");
  keygen_cmd->add_option("--preset", kg.preset, "toy, medium or deep")->capture_default_str();
  keygen_cmd->add_option("--seed", kg.seed)->capture_default_str();
  keygen_cmd->add_option("--out", kg.out, "output prefix")->capture_default_str();

  EncryptArgs en;
  auto* encrypt_cmd = app.add_subcommand("encrypt", "quantize and encrypt a signal");
  encrypt_cmd->add_option("--signal", en.signal, "text signal or .pgm image")->required();
  encrypt_cmd->add_option("--pk", en.pk, "public key");
  encrypt_cmd->add_option("--out", en.out)->required();
  encrypt_cmd->add_option("--backend", en.c.backend)->capture_default_str();
  encrypt_cmd->add_option("--seed", en.c.seed)->capture_default_str();
  encrypt_cmd->add_option("--threads", en.c.threads)->capture_default_str();
  add_format(encrypt_cmd, en.c);

  FftArgs ft;
  auto* fft_cmd = app.add_subcommand("fft", "transform an encrypted signal");
  fft_cmd->add_option("--in", ft.in)->required();
  fft_cmd->add_option("--out", ft.out)->required();
  fft_cmd->add_option("--twiddles", ft.twiddles, "twiddle table JSON (1D)");
  fft_cmd->add_option("--stats", ft.stats, "write run statistics as JSON");
  fft_cmd->add_option("--params", ft.params_file, "expected scheme parameters");
  fft_cmd->add_option("--threads", ft.c.threads)->capture_default_str();

  DecryptArgs de;
  auto* decrypt_cmd = app.add_subcommand("decrypt", "decrypt and decode a signal");
  decrypt_cmd->add_option("--in", de.in)->required();
  decrypt_cmd->add_option("--sk", de.sk, "secret key");
  decrypt_cmd->add_option("--out", de.out, "text output (default stdout)");

  VerifyArgs ve;
  auto* verify_cmd = app.add_subcommand("verify", "compare a spectrum with a double-precision FFT");
  verify_cmd->add_option("--signal", ve.signal, "plain input signal")->required();
  verify_cmd->add_option("--spectrum", ve.spectrum, "decrypted spectrum")->required();
  verify_cmd->add_option("--out", ve.out, "also write the report here");
  add_format(verify_cmd, ve.c);

  BoundArgs bo;
  auto* bound_cmd = app.add_subcommand("bound", "print error bounds and cost model");
  bound_cmd->add_option("--size", bo.size, "transform length (columns in 2D)")->capture_default_str();
  bound_cmd->add_option("--rows", bo.rows, "rows for a 2D transform")->capture_default_str();
  bound_cmd->add_option("--x-bound", bo.x_bound, "max |component| of the input")->capture_default_str();
  bound_cmd->add_option("--ct-side", bo.ct_side, "ciphertext side for the space model");
  bound_cmd->add_option("--params", bo.params_file, "scheme parameter JSON file");
  bound_cmd->add_option("--preset", bo.preset)->capture_default_str();
  add_format(bound_cmd, bo.c);

  BenchArgs be;
  auto* bench_cmd = app.add_subcommand("bench", "run the error experiments");
  bench_cmd->add_option("--sizes", be.sizes, "1D sizes")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--trials", be.trials)->capture_default_str();
  bench_cmd->add_option("--backend", be.c.backend, "clear or fhe");
  bench_cmd->add_option("--seed", be.c.seed)->capture_default_str();
  bench_cmd->add_option("--threads", be.c.threads)->capture_default_str();
  bench_cmd->add_option("--images", be.images, "PGM images for the 2D run");
  bench_cmd->add_option("--random-images", be.random_images, "number of random images")->capture_default_str();
  bench_cmd->add_option("--image-side", be.image_side)->capture_default_str();
  bench_cmd->add_option("--json", be.json, "write reports as JSON");
  bench_cmd->add_option("--params", be.params_file, "scheme parameters (fhe)");
  bench_cmd->add_option("--preset", be.preset)->capture_default_str();
  add_format(bench_cmd, be.c);
  be.c.backend = "clear";

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*keygen_cmd) return cmd_keygen(kg);
    if (*encrypt_cmd) return cmd_encrypt(en);
    if (*fft_cmd) return cmd_fft(ft);
    if (*decrypt_cmd) return cmd_decrypt(de);
    if (*verify_cmd) return cmd_verify(ve);
    if (*bound_cmd) return cmd_bound(bo);
    if (*bench_cmd) return cmd_bench(be);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const NoiseOverflowError& e) {
    std::cerr << "noise overflow: " << e.what() << "\n";
    return kExitNoise;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
