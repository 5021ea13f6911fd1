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

// File formats shared by the command-line tool and the tests.
//
// Binary containers are little-endian. Key files:
//
//   magic "FHEFFTPK" | "FHEFFTSK", u32 version,
//   u32 n, u32 ell, u32 m, u32 noise_bound, u32 depth_budget, u64 hash,
//   u32 element bytes, then every element as that many bytes (LSB first)
//
// Signal containers:
//
//   magic "FHEFFTCT", u32 version, u8 backend, 3 reserved bytes,
//   u64 params hash, 5 x u32 params, u32 F, u32 f, u32 rows, u32 cols,
//   u64 bit count, then per bit:
//     clear backend: u8 value
//     fhe backend:   u8 kind (0 ciphertext, 1 constant 0, 2 constant 1);
//                    for ciphertexts u32 level, f64 noise bound (log2),
//                    then the N x N matrix row-major, 8 entries per byte
//
// Bits are stored point by point, real word before imaginary word, each
// word LSB first.
//
// Text signals hold one `re,im` pair per line; `re im` and a bare real
// value are also accepted. Blank lines and lines starting with '#' are
// skipped, except `# shape ROWS COLS`, which marks a two-dimensional signal.

#ifndef FHEFFT_SERIALIZE_HPP_
#define FHEFFT_SERIALIZE_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fhefft/arith.hpp"
#include "fhefft/bit_engine.hpp"
#include "fhefft/fft.hpp"
#include "fhefft/fhe_core.hpp"
#include "fhefft/harness.hpp"

namespace fhefft {

inline constexpr uint32_t kFormatVersion = 1;

void write_public_key(std::ostream& out, const PublicKey& pk);
void write_secret_key(std::ostream& out, const SecretKey& sk);
PublicKey read_public_key(std::istream& in);
SecretKey read_secret_key(std::istream& in);

struct StoredBit {
  enum class Kind : uint8_t { kCiphertext = 0, kZero = 1, kOne = 2 };
  Kind kind = Kind::kZero;
  bool value = false;                      // clear backend payload
  std::shared_ptr<const Ciphertext> ct;    // fhe backend payload
};

struct SignalContainer {
  Backend backend = Backend::kClear;
  SchemeParams params;  // hashed and checked on the fhe backend
  FixedFormat format;
  uint32_t rows = 1;
  uint32_t cols = 0;
  std::vector<StoredBit> bits;  // rows * cols * 2 * F
};

void write_container(std::ostream& out, const SignalContainer& c);
SignalContainer read_container(std::istream& in);

SignalContainer pack_signal(const ClearEngine& e,
                            const SignalBuffer<ClearEngine>& s);
SignalContainer pack_signal(const FheEngine& e,
                            const SignalBuffer<FheEngine>& s);
SignalBuffer<ClearEngine> unpack_signal(ClearEngine& e,
                                        const SignalContainer& c);
// Throws NoiseOverflowError when the container was produced under
// different scheme parameters.
SignalBuffer<FheEngine> unpack_signal(FheEngine& e, const SignalContainer& c);

struct TextSignal {
  std::vector<Complex> values;
  size_t rows = 1;
  size_t cols = 0;
};

// Throws ParseError naming `source` and the offending line.
TextSignal parse_signal_text(std::istream& in, const std::string& source);
void write_signal_text(std::ostream& out, const TextSignal& s);

// P2 or P5, pixel values divided by maxval. Throws ParseError with the byte
// offset of the problem.
Image read_pgm(std::istream& in, const std::string& source);

// {"preset": "toy"} or {"n": .., "ell": .., "m": .., "noise_bound": ..}.
SchemeParams parse_params_json(const std::string& text);
std::string params_to_json(const SchemeParams& p);

// {"size": M, "total_bits": F, "frac_bits": f, "entries": [[re, im], ...]}
// with raw fixed-point integers.
TwiddleTable parse_twiddles_json(const std::string& text);
std::string twiddles_to_json(const TwiddleTable& t);

}  // namespace fhefft

#endif  // FHEFFT_SERIALIZE_HPP_
