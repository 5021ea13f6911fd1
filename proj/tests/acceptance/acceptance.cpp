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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   fhefft_acceptance [--only 1,5,8]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fhefft/arith.hpp"
#include "fhefft/bit_engine.hpp"
#include "fhefft/error_model.hpp"
#include "fhefft/fft.hpp"
#include "fhefft/fhe_core.hpp"
#include "fhefft/gates.hpp"
#include "fhefft/harness.hpp"

namespace {

using namespace fhefft;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double a) { return num("%.4g", a); }

int64_t wrap(int64_t v, uint32_t width) {
  const int64_t mod = int64_t{1} << width;
  int64_t r = ((v % mod) + mod) % mod;
  return r >= mod / 2 ? r - mod : r;
}

// 1. Encryption round trips and the NAND truth table at toy parameters.
Outcome fhe_correctness() {
  const auto start = std::chrono::steady_clock::now();
  const auto params = SchemeParams::toy();
  const auto keys = keygen(params, 1);
  std::mt19937_64 rng(2);
  int round_trip_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool mu = rng() & 1u;
    round_trip_ok += decrypt_bit(keys.secret_key, encrypt_bit(keys.public_key, mu, rng)) == mu;
  }
  Evaluator ev(params);
  int nand_ok = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int t = 0; t < 250; ++t) {
        const auto c = ev.nand(encrypt_bit(keys.public_key, a, rng),
                               encrypt_bit(keys.public_key, b, rng));
        nand_ok += decrypt_bit(keys.secret_key, c) == !(a && b);
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << "round trips " << round_trip_ok << "/1000, NAND " << nand_ok
    << "/1000, " << num("%.1f s (target < 60 s)", secs);
  return {round_trip_ok == 1000 && nand_ok == 1000 && secs < 60, d.str()};
}

// 2. Derived gates on both backends, with their NAND costs.
template <BitEngine E, class Read>
bool gates_exhaustive(E& e, Read read, std::string& why) {
  struct G {
    const char* name;
    uint64_t cost;
    std::function<typename E::Bit(E&, const typename E::Bit&, const typename E::Bit&)> f;
    std::function<bool(bool, bool)> oracle;
  };
  const std::vector<G> gs = {
      {"NOT", 1, [](E& e, auto& a, auto&) { return gates::not_(e, a); }, [](bool a, bool) { return !a; }},
      {"AND", 2, [](E& e, auto& a, auto& b) { return gates::and_(e, a, b); }, [](bool a, bool b) { return a && b; }},
      {"OR", 3, [](E& e, auto& a, auto& b) { return gates::or_(e, a, b); }, [](bool a, bool b) { return a || b; }},
      {"XOR", 4, [](E& e, auto& a, auto& b) { return gates::xor_(e, a, b); }, [](bool a, bool b) { return a != b; }},
      {"NOR", 4, [](E& e, auto& a, auto& b) { return gates::nor_(e, a, b); }, [](bool a, bool b) { return !(a || b); }},
      {"XNOR", 5, [](E& e, auto& a, auto& b) { return gates::xnor_(e, a, b); }, [](bool a, bool b) { return a == b; }},
  };
  for (const auto& g : gs) {
    for (bool a : {false, true}) {
      for (bool b : {false, true}) {
        const uint64_t before = e.stats().nand_count;
        const auto r = g.f(e, e.input(a), e.input(b));
        if (e.stats().nand_count - before != g.cost || read(r) != g.oracle(a, b)) {
          why = g.name;
          return false;
        }
      }
    }
  }
  return true;
}

Outcome gate_layer() {
  std::string why;
  ClearEngine clear;
  const bool c = gates_exhaustive(clear, [&](auto& b) { return clear.read_back(b); }, why);
  const auto keys = keygen(SchemeParams::medium(), 3);
  FheEngine fhe(keys, 4);
  const bool f = gates_exhaustive(fhe, [&](auto& b) { return fhe.read_back(b); }, why);
  return {c && f, std::string("clear ") + (c ? "ok" : "FAILED") + ", fhe " +
                      (f ? "ok" : "FAILED") +
                      (why.empty() ? "" : " at " + why) +
                      "; costs NOT1 AND2 OR3 XOR4 NOR4 XNOR5"};
}

// 3. Adders and multipliers.
Outcome arithmetic() {
  bool ok = true;
  std::ostringstream d;
  const FixedFormat f8{8, 1}, f6{6, 1}, f4{4, 1};
  int bad = 0;
  for (int a = -128; a < 128; ++a) {
    for (int b = -128; b < 128; ++b) {
      ClearEngine e;
      const auto x = input_word(e, a, f8), y = input_word(e, b, f8);
      bad += read_raw(e, add(e, x, y)) != wrap(a + b, 8);
      bad += read_raw(e, sub(e, x, y)) != wrap(a - b, 8);
    }
  }
  d << "8-bit add/sub mismatches " << bad;
  ok &= bad == 0;
  bad = 0;
  for (int a = -32; a < 32; ++a) {
    for (int b = -32; b < 32; ++b) {
      ClearEngine e;
      bad += read_raw(e, mul_integer(e, input_word(e, a, f6), input_word(e, b, f6))) != wrap(a * b, 6);
    }
  }
  d << ", 6-bit mul mismatches " << bad;
  ok &= bad == 0;

  const auto keys = keygen(SchemeParams::medium(), 5);
  std::mt19937_64 rng(6);
  int fhe_add_ok = 0, fhe_mul_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const int64_t a = static_cast<int64_t>(rng() % 256) - 128;
    const int64_t b = static_cast<int64_t>(rng() % 256) - 128;
    FheEngine e(keys, 1000 + i);
    fhe_add_ok += read_raw(e, add(e, input_word(e, a, f8), input_word(e, b, f8))) == wrap(a + b, 8);
  }
  for (int i = 0; i < 20; ++i) {
    const int64_t a = static_cast<int64_t>(rng() % 16) - 8;
    const int64_t b = static_cast<int64_t>(rng() % 16) - 8;
    FheEngine e(keys, 2000 + i);
    const auto x = input_word(e, a, f4), y = input_word(e, b, f4);
    const auto bits = wallace_product<FheEngine>(e, x.bits, y.bits, 8);
    std::vector<bool> out;
    for (const auto& bit : bits) out.push_back(e.read_back(bit));
    fhe_mul_ok += from_bits(out) == a * b;
  }
  d << ", fhe adds " << fhe_add_ok << "/50, fhe 4x4 products " << fhe_mul_ok << "/20";
  ok &= fhe_add_ok == 50 && fhe_mul_ok == 20;

  for (uint32_t F : {8u, 16u, 32u}) {
    const FixedFormat fmt{F, F / 2};
    ClearEngine ea, em;
    add(ea, input_word(ea, 1, fmt), input_word(ea, 2, fmt));
    mul_fixed(em, input_word(em, 3, fmt), input_word(em, 5, fmt));
    const GateCostModel model{F, 1, 1, 1};
    const bool within = ea.stats().nand_count <= nand_cost(model, CostOp::kAdd) &&
                        em.stats().nand_count <= nand_cost(model, CostOp::kMul);
    d << "; F=" << F << " add " << ea.stats().nand_count << "<=" << 36 * F
      << " mul " << em.stats().nand_count << "<=" << nand_cost(model, CostOp::kMul);
    ok &= within;
  }
  return {ok, d.str()};
}

// 4. Fixed-point multiplication accuracy.
Outcome fixed_multiply() {
  const FixedFormat fmt{32, 16};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    ClearEngine e;
    const auto p = mul_fixed(e, input_word(e, encode(a, fmt), fmt),
                             input_word(e, encode(b, fmt), fmt));
    worst = std::max(worst, std::fabs(read_value(e, p) - a * b));
  }
  const double limit = 3 * fmt.delta();
  return {worst <= limit, "max |err| " + sci(worst) + " <= 3*2^-16 = " + sci(limit)};
}

// 5. Per-size means and bound soundness on the cleartext backend.
Outcome table1() {
  const size_t sizes[] = {8, 16, 32, 64, 128};
  const double reference[] = {1.294e-5, 2.216e-5, 4.199e-5, 8.383e-5, 1.81e-4};
  bool ok = true;
  std::vector<ErrorReport> reports;
  std::ostringstream d;
  for (size_t i = 0; i < 5; ++i) {
    ExperimentConfig cfg;
    cfg.trials = 100;
    cfg.seed = 2016;
    const auto r = run_1d_experiment(sizes[i], cfg);
    reports.push_back(r);
    const double ratio = r.mean_error / reference[i];
    const bool row_ok = ratio <= 3.0 && ratio >= 1.0 / 3.0 && r.within_bound();
    ok &= row_ok;
    d << (i ? "; " : "") << sizes[i] << "pt mean " << sci(r.mean_error)
      << " (x" << num("%.2f", ratio) << " of reference) max " << sci(r.max_error)
      << " <= " << sci(r.bound) << (row_ok ? "" : " FAIL");
  }
  std::printf("%s", reports_to_table(reports).c_str());
  return {ok, d.str()};
}

// 6. Ten random 16x16 images.
Outcome images_2d() {
  std::mt19937_64 rng(16);
  std::vector<Image> imgs;
  for (int i = 0; i < 10; ++i) imgs.push_back(random_image(16, 16, rng));
  ExperimentConfig cfg;
  const auto r = run_2d_experiment(imgs, cfg);
  std::printf("%s", reports_to_table(std::span<const ErrorReport>(&r, 1)).c_str());
  return {r.mean_error <= 1.2e-4 && r.within_bound(),
          "mean " + sci(r.mean_error) + " <= 1.2e-4 (reference 6.067e-5), max " +
              sci(r.max_error) + " <= 2D bound " + sci(r.bound)};
}

// 7. Randomized soundness runs.
Outcome soundness() {
  std::mt19937_64 rng(77);
  int violations = 0, runs = 0;
  double worst_ratio = 0;
  for (; runs < 120; ++runs) {
    const size_t m = size_t{2} << (rng() % 6);  // 2 .. 64
    ExperimentConfig cfg;
    cfg.trials = 1;
    cfg.seed = rng();
    const auto r = run_1d_experiment(m, cfg);
    violations += !r.within_bound();
    worst_ratio = std::max(worst_ratio, r.max_error / r.bound);
  }
  return {violations == 0, std::to_string(runs) + " runs, " +
                               std::to_string(violations) +
                               " violations, worst max/bound " + num("%.3f", worst_ratio)};
}

// 8. Encrypted 4-point FFT equals the cleartext circuit bit for bit.
Outcome backend_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const FixedFormat fmt{16, 8};
  const auto params = SchemeParams::deep();
  const auto keys = keygen(params, 8);
  std::mt19937_64 rng(88);
  const auto x = random_signal(4, rng);
  const auto clear = transform_clear(x, 1, 4, fmt);
  const auto fhe = transform_fhe(x, 1, 4, fmt, keys, 9);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool same = clear.spectrum == fhe.spectrum &&
                    clear.gates.nand_count == fhe.gates.nand_count;
  return {same, std::string(same ? "bit-identical" : "MISMATCH") + ", " +
                    std::to_string(fhe.gates.nand_count) + " encrypted NANDs, depth " +
                    std::to_string(fhe.gates.max_depth) + ", ell=" +
                    std::to_string(params.ell) + ", " + num("%.1f s", secs)};
}

// 9. Error grows with M and shrinks with f.
Outcome monotonicity() {
  const size_t sizes[] = {8, 16, 32, 64, 128};
  int monotone_seeds = 0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    double prev = 0;
    bool mono = true;
    for (size_t m : sizes) {
      ExperimentConfig cfg;
      cfg.trials = 5;
      cfg.seed = 900 + s;
      const double mean = run_1d_experiment(m, cfg).mean_error;
      mono &= mean >= prev;
      prev = mean;
    }
    monotone_seeds += mono;
  }
  bool finer_ok = true;
  std::ostringstream d;
  d << "non-decreasing in M for " << monotone_seeds << "/" << seeds << " seeds";
  for (size_t m : {8u, 16u, 32u, 64u}) {
    ExperimentConfig cfg;
    cfg.trials = 10;
    cfg.seed = 31;
    const double e16 = run_1d_experiment(m, cfg).mean_error;
    cfg.format = {32, 24};
    const double e24 = run_1d_experiment(m, cfg).mean_error;
    finer_ok &= e24 < e16;
    d << "; M=" << m << " f16 " << sci(e16) << " > f24 " << sci(e24);
  }
  return {2 * monotone_seeds > seeds && finer_ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: %s [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"fhe-correctness", fhe_correctness},
      {"gate-layer", gate_layer},
      {"arithmetic", arithmetic},
      {"fixed-point-multiply", fixed_multiply},
      {"1d-reproduction", table1},
      {"2d-reproduction", images_2d},
      {"bound-soundness", soundness},
      {"backend-equivalence", backend_equivalence},
      {"error-monotonicity", monotonicity},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s  %d %-22s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id,
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
