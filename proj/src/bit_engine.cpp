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

#include "fhefft/bit_engine.hpp"

namespace fhefft {

namespace detail {

uint32_t next_engine_id() {
  static std::atomic<uint32_t> next{1};
  return next.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace detail

FheEngine::FheEngine(const SchemeParams& params, unsigned threads)
    : id_(detail::next_engine_id()), evaluator_(params, threads) {}

FheEngine::FheEngine(const PublicKey& pk, uint64_t seed, unsigned threads)
    : id_(detail::next_engine_id()),
      evaluator_(pk.params, threads),
      public_key_(pk),
      rng_(seed) {}

FheEngine::FheEngine(const KeyPair& keys, uint64_t seed, unsigned threads)
    : id_(detail::next_engine_id()),
      evaluator_(keys.public_key.params, threads),
      public_key_(keys.public_key),
      secret_key_(keys.secret_key),
      rng_(seed) {}

FheEngine::Bit FheEngine::input(bool value) {
  if (!public_key_) {
    throw CapabilityError("encryption requires a public key");
  }
  std::lock_guard<std::mutex> lock(rng_mutex_);
  auto ct = std::make_shared<const Ciphertext>(
      encrypt_bit(*public_key_, value, rng_));
  return {std::move(ct), id_, false, false};
}

FheEngine::Bit FheEngine::import_ciphertext(Ciphertext ct) const {
  if (ct.side() != params().ct_side()) {
    throw UsageError("imported ciphertext does not match engine parameters");
  }
  return {std::make_shared<const Ciphertext>(std::move(ct)), id_, false, false};
}

std::shared_ptr<const Ciphertext> FheEngine::export_ciphertext(
    const Bit& a) const {
  if (a.is_constant) return nullptr;
  check_owner(a);
  return a.ct;
}

FheEngine::Bit FheEngine::nand(const Bit& a, const Bit& b) {
  if (a.is_constant || b.is_constant) {
    const Bit& k = a.is_constant ? a : b;
    const Bit& x = a.is_constant ? b : a;
    if (!k.value) return constant(true);
    if (x.is_constant) return constant(!x.value);
    check_owner(x);
    return {std::make_shared<const Ciphertext>(evaluator_.negate(*x.ct)), id_,
            false, false};
  }
  check_owner(a);
  check_owner(b);
  auto ct = std::make_shared<const Ciphertext>(evaluator_.nand(*a.ct, *b.ct));
  counter_.record(ct->level());
  return {std::move(ct), id_, false, false};
}

bool FheEngine::read_back(const Bit& a) const {
  return read_back_checked(a).bit;
}

BitDecryption FheEngine::read_back_checked(const Bit& a) const {
  if (a.is_constant) return {a.value, 0.0};
  check_owner(a);
  if (!secret_key_) {
    throw CapabilityError("read_back on the encrypted backend needs the secret key");
  }
  return decrypt_bit_checked(*secret_key_, *a.ct);
}

}  // namespace fhefft
