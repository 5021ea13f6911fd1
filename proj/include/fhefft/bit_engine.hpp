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

// Backends through which every circuit in the library is evaluated.
//
// A circuit is written once against the BitEngine concept and runs either on
// ClearEngine (exact cleartext bits) or FheEngine (encrypted bits). Both
// engines carry plaintext constants as tagged handles and fold NAND gates
// with a constant operand:
//
//     NAND(x, 0) = 1          NAND(x, 1) = NOT x
//
// Folded gates are not counted. For FheEngine, NOT x is Flatten(I - C),
// which is exactly NAND against the noiseless encryption of 1.
//
// Security note: folding means the evaluator learns which gates had a known
// operand. When a plaintext constant feeds a multiplier, zero bits of the
// constant eliminate whole partial-product rows; an observer of the circuit
// shape learns the constant (which is public anyway) and can rule out some
// values of the product, e.g. that a product by an even constant is even.
// The encrypted operand itself is not revealed.

#ifndef FHEFFT_BIT_ENGINE_HPP_
#define FHEFFT_BIT_ENGINE_HPP_

#include <atomic>
#include <concepts>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>

#include "fhefft/errors.hpp"
#include "fhefft/fhe_core.hpp"

namespace fhefft {

struct GateStats {
  uint64_t nand_count = 0;  // evaluated (non-folded) NAND gates
  uint32_t max_depth = 0;   // longest NAND chain observed
};

template <class E>
concept BitEngine = requires(E& engine, const E& cengine,
                             const typename E::Bit& bit, bool value) {
  { engine.constant(value) } -> std::same_as<typename E::Bit>;
  { engine.input(value) } -> std::same_as<typename E::Bit>;
  { engine.nand(bit, bit) } -> std::same_as<typename E::Bit>;
  { cengine.stats() } -> std::same_as<GateStats>;
  { bit.is_constant } -> std::convertible_to<bool>;
  { bit.value } -> std::convertible_to<bool>;
};

namespace detail {

uint32_t next_engine_id();

class GateCounter {
 public:
  void record(uint32_t depth) {
    nand_count_.fetch_add(1, std::memory_order_relaxed);
    uint32_t seen = max_depth_.load(std::memory_order_relaxed);
    while (depth > seen &&
           !max_depth_.compare_exchange_weak(seen, depth,
                                             std::memory_order_relaxed)) {
    }
  }
  GateStats snapshot() const {
    return {nand_count_.load(std::memory_order_relaxed),
            max_depth_.load(std::memory_order_relaxed)};
  }

 private:
  std::atomic<uint64_t> nand_count_{0};
  std::atomic<uint32_t> max_depth_{0};
};

}  // namespace detail

// Exact cleartext evaluation. Used for full-size experiments: decryption is
// exact below the noise threshold, so results match an encrypted run with a
// sufficient noise budget bit for bit.
class ClearEngine {
 public:
  struct Bit {
    uint32_t owner = 0;  // 0 for constants
    uint32_t depth = 0;
    bool value = false;
    bool is_constant = true;
  };

  ClearEngine() : id_(detail::next_engine_id()) {}
  ClearEngine(const ClearEngine&) = delete;
  ClearEngine& operator=(const ClearEngine&) = delete;

  uint32_t id() const { return id_; }

  Bit constant(bool value) const { return {0, 0, value, true}; }
  Bit input(bool value) const { return {id_, 0, value, false}; }

  Bit nand(const Bit& a, const Bit& b) {
    if (a.is_constant || b.is_constant) {
      const Bit& k = a.is_constant ? a : b;
      const Bit& x = a.is_constant ? b : a;
      if (!k.value) return constant(true);
      if (x.is_constant) return constant(!x.value);
      check_owner(x);
      return {x.owner, x.depth, !x.value, false};
    }
    check_owner(a);
    check_owner(b);
    const uint32_t depth = std::max(a.depth, b.depth) + 1;
    counter_.record(depth);
    return {id_, depth, !(a.value && b.value), false};
  }

  bool read_back(const Bit& a) const {
    if (!a.is_constant) check_owner(a);
    return a.value;
  }

  GateStats stats() const { return counter_.snapshot(); }

 private:
  void check_owner(const Bit& a) const {
    if (a.owner != id_) {
      throw UsageError("bit handle belongs to a different engine");
    }
  }

  uint32_t id_;
  detail::GateCounter counter_;
};

// Encrypted evaluation. Evaluation needs only the scheme parameters;
// encryption needs the public key and read_back needs the secret key.
class FheEngine {
 public:
  struct Bit {
    std::shared_ptr<const Ciphertext> ct;  // null for constants
    uint32_t owner = 0;
    bool value = false;  // meaningful only for constants
    bool is_constant = true;

    uint32_t depth() const { return ct ? ct->level() : 0; }
  };

  // Server side: evaluation only.
  explicit FheEngine(const SchemeParams& params, unsigned threads = 1);
  // Client side: may encrypt inputs.
  FheEngine(const PublicKey& pk, uint64_t seed, unsigned threads = 1);
  // Client side with decryption, used for tests and read-back.
  FheEngine(const KeyPair& keys, uint64_t seed, unsigned threads = 1);

  FheEngine(const FheEngine&) = delete;
  FheEngine& operator=(const FheEngine&) = delete;

  uint32_t id() const { return id_; }
  const SchemeParams& params() const { return evaluator_.params(); }
  const Evaluator& evaluator() const { return evaluator_; }
  bool can_encrypt() const { return public_key_.has_value(); }
  bool can_decrypt() const { return secret_key_.has_value(); }

  Bit constant(bool value) const { return {nullptr, 0, value, true}; }
  // Encrypts a fresh bit. Throws CapabilityError without a public key.
  Bit input(bool value);
  Bit import_ciphertext(Ciphertext ct) const;
  // Null for constant handles.
  std::shared_ptr<const Ciphertext> export_ciphertext(const Bit& a) const;

  Bit nand(const Bit& a, const Bit& b);

  // Throws CapabilityError without a secret key, NoiseOverflowError if the
  // ciphertext no longer decrypts.
  bool read_back(const Bit& a) const;
  BitDecryption read_back_checked(const Bit& a) const;

  GateStats stats() const { return counter_.snapshot(); }

 private:
  void check_owner(const Bit& a) const {
    if (a.owner != id_) {
      throw UsageError("bit handle belongs to a different engine");
    }
  }

  uint32_t id_;
  Evaluator evaluator_;
  std::optional<PublicKey> public_key_;
  std::optional<SecretKey> secret_key_;
  std::mt19937_64 rng_;
  std::mutex rng_mutex_;
  detail::GateCounter counter_;
};

static_assert(BitEngine<ClearEngine>);
static_assert(BitEngine<FheEngine>);

}  // namespace fhefft

#endif  // FHEFFT_BIT_ENGINE_HPP_
