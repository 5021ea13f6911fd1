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

// Leveled GSW-style encryption with flattened matrix ciphertexts.
//
// The modulus is restricted to the Mersenne form q = 2^ell - 1. A ciphertext
// encrypting mu is an N x N matrix C over {0,1}, N = (n+1)*ell, with
//
//     C * v = mu * v + e   (mod q),   v = Powersof2(s)
//
// where s = (-t, 1) is the secret key and e is a small noise vector. Every
// homomorphic operation re-flattens its result, i.e. applies
// BitDecomp(BitDecomp^-1(.)), so entries stay in {0,1}. Because 2^ell = 1
// (mod q), BitDecomp^-1 followed by BitDecomp reduces to a signed carry
// propagation with an end-around carry.
//
// None of the parameter presets are secure. They are sized so that the
// circuits in this library decrypt at desk scale.

#ifndef FHEFFT_FHE_CORE_HPP_
#define FHEFFT_FHE_CORE_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fhefft/errors.hpp"

namespace fhefft {

using BigInt = boost::multiprecision::cpp_int;

struct SchemeParams {
  uint32_t n = 8;             // lattice dimension
  uint32_t ell = 29;          // q = 2^ell - 1, so ell = ceil(log2 q)
  uint32_t m = 16;            // LWE samples in the public key
  uint32_t noise_bound = 2;   // initial errors are uniform in [-B, B]
  uint32_t depth_budget = 3;  // NAND depth decryptable for any circuit

  BigInt q() const;
  uint32_t ct_side() const { return (n + 1) * ell; }

  // log2(q / 8): ciphertexts whose noise reaches this are rejected.
  double noise_threshold_log2() const;

  // Throws ParameterError unless q > 8 * noise_bound * (N + 1)^depth_budget
  // and fresh ciphertexts (noise <= m * noise_bound) decrypt.
  void validate() const;

  // FNV-1a over the serialized fields; stored in key and ciphertext files.
  uint64_t hash() const;

  // Largest depth_budget the invariant admits for the given shape.
  static uint32_t max_depth_budget(uint32_t n, uint32_t ell,
                                   uint32_t noise_bound);
  static SchemeParams make(uint32_t n, uint32_t ell, uint32_t m,
                           uint32_t noise_bound);

  // n=8, q=2^29-1. NAND truth tables and single gates.
  static SchemeParams toy();
  // n=1, q=2^127-1. Word-level adders and small multipliers.
  static SchemeParams medium();
  // n=1, q=2^383-1. End-to-end FFTs at M=4, F=16.
  static SchemeParams deep();

  friend bool operator==(const SchemeParams&, const SchemeParams&) = default;
};

// Square 0/1 matrix, rows packed 64 entries per word.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(uint32_t side);

  uint32_t side() const { return side_; }
  uint32_t words_per_row() const { return words_; }

  bool get(uint32_t r, uint32_t c) const {
    return (data_[size_t{r} * words_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(uint32_t r, uint32_t c, bool value);

  std::span<const uint64_t> row(uint32_t r) const {
    return {data_.data() + size_t{r} * words_, words_};
  }
  std::span<uint64_t> row(uint32_t r) {
    return {data_.data() + size_t{r} * words_, words_};
  }

  BitMatrix transposed() const;
  uint32_t max_row_weight() const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  uint32_t side_ = 0;
  uint32_t words_ = 0;
  std::vector<uint64_t> data_;
};

// Immutable once built. Besides the matrix it carries public metadata: the
// NAND depth that produced it and a worst-case bound on |C*v - mu*v|_inf.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(BitMatrix matrix, uint32_t level, double noise_log2,
             double plain_log2 = 0.0);

  const BitMatrix& matrix() const { return rows_; }
  // Column-major copy, used when this ciphertext is the right operand of a
  // matrix product.
  const BitMatrix& columns() const { return cols_; }
  uint32_t side() const { return rows_.side(); }
  uint32_t level() const { return level_; }
  // log2 of the tracked noise bound.
  double noise_log2() const { return noise_log2_; }
  // log2 of a bound on |plaintext|; 0 for bits.
  double plain_log2() const { return plain_log2_; }
  uint32_t max_row_weight() const { return max_row_weight_; }

 private:
  BitMatrix rows_;
  BitMatrix cols_;
  uint32_t level_ = 0;
  double noise_log2_ = 0.0;
  double plain_log2_ = 0.0;
  uint32_t max_row_weight_ = 0;
};

struct PublicKey {
  SchemeParams params;
  std::vector<BigInt> matrix;  // m x (n+1), row-major, A = [B | B*t + e]

  const BigInt& at(uint32_t r, uint32_t c) const {
    return matrix[size_t{r} * (params.n + 1) + c];
  }
};

struct SecretKey {
  SchemeParams params;
  std::vector<BigInt> vector;  // s = (-t, 1)
};

struct KeyPair {
  PublicKey public_key;
  SecretKey secret_key;
};

KeyPair keygen(const SchemeParams& params, uint64_t seed);

Ciphertext encrypt_bit(const PublicKey& pk, bool mu, std::mt19937_64& rng);

// Encrypts a small ring element; decrypt with decrypt_value.
Ciphertext encrypt_value(const PublicKey& pk, uint64_t mu,
                         std::mt19937_64& rng);

struct BitDecryption {
  bool bit = false;
  double noise = 0.0;  // measured |C*v - bit*v|_inf
};

// Throws NoiseOverflowError if any noise coordinate reaches q/8. Under a
// wrong key the noise is uniform, so this fails with overwhelming
// probability.
BitDecryption decrypt_bit_checked(const SecretKey& sk, const Ciphertext& ct);
bool decrypt_bit(const SecretKey& sk, const Ciphertext& ct);

// Recovers mu in [0, 2^plain_bits) from the row with weight
// 2^(ell-1-plain_bits). Plaintexts are not reduced mod q.
uint64_t decrypt_value(const SecretKey& sk, const Ciphertext& ct,
                       uint32_t plain_bits);

// Public-material-only evaluation. All methods are const and thread-safe.
class Evaluator {
 public:
  explicit Evaluator(SchemeParams params, unsigned threads = 1);

  const SchemeParams& params() const { return params_; }

  // Flatten(I - C1*C2). Operands are ordered so that the noisier ciphertext
  // is the left factor, whose noise passes through unscaled.
  Ciphertext nand(const Ciphertext& a, const Ciphertext& b) const;
  // Flatten(I - C): NAND with the noiseless encryption of 1.
  Ciphertext negate(const Ciphertext& a) const;

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext const_mult(const Ciphertext& a, const BigInt& k) const;
  Ciphertext mult(const Ciphertext& a, const Ciphertext& b) const;

 private:
  void check_shape(const Ciphertext& ct) const;
  Ciphertext finish(BitMatrix matrix, uint32_t level, double noise_log2,
                    double plain_log2) const;

  SchemeParams params_;
  unsigned threads_;
};

namespace detail {

// BitDecomp(BitDecomp^-1(digits)) for one row of integer digits, written
// into `out` (packed). Exposed for tests.
void flatten_row(std::span<const int32_t> digits, uint32_t blocks,
                 uint32_t ell, std::span<uint64_t> out);

// log2(2^a + 2^b)
double log2_add(double a, double b);

}  // namespace detail

}  // namespace fhefft

#endif  // FHEFFT_FHE_CORE_HPP_
