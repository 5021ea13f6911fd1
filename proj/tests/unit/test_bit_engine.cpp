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

#include <gtest/gtest.h>

#include <random>

namespace fhefft {
namespace {

TEST(ClearEngine, CountsOnlyRealGates) {
  ClearEngine e;
  const auto x = e.input(true);
  const auto y = e.input(false);
  EXPECT_TRUE(e.nand(x, e.constant(false)).is_constant);
  EXPECT_TRUE(e.nand(x, e.constant(false)).value);
  const auto nx = e.nand(x, e.constant(true));
  EXPECT_FALSE(nx.is_constant);
  EXPECT_FALSE(e.read_back(nx));
  EXPECT_EQ(e.stats().nand_count, 0u);
  const auto z = e.nand(x, y);
  EXPECT_TRUE(e.read_back(z));
  EXPECT_EQ(e.stats().nand_count, 1u);
  EXPECT_EQ(e.stats().max_depth, 1u);
  const auto w = e.nand(z, x);
  EXPECT_EQ(w.depth, 2u);
  EXPECT_EQ(e.stats().max_depth, 2u);
}

TEST(ClearEngine, ConstantsFoldCompletely) {
  ClearEngine e;
  for (bool a : {false, true}) {
    for (bool b : {false, true}) {
      const auto r = e.nand(e.constant(a), e.constant(b));
      EXPECT_TRUE(r.is_constant);
      EXPECT_EQ(r.value, !(a && b));
    }
  }
  EXPECT_EQ(e.stats().nand_count, 0u);
}

TEST(ClearEngine, RejectsForeignHandles) {
  ClearEngine a, b;
  const auto x = a.input(true);
  EXPECT_THROW(b.nand(x, b.input(true)), UsageError);
  EXPECT_THROW(b.read_back(x), UsageError);
}

class FheEngineTest : public ::testing::Test {
 protected:
  SchemeParams params = SchemeParams::medium();
  KeyPair keys = keygen(params, 77);
};

TEST_F(FheEngineTest, MatchesClearEngineOnRandomCircuit) {
  ClearEngine clear;
  FheEngine fhe(keys, 5);
  std::mt19937_64 rng(21);
  std::vector<ClearEngine::Bit> cw;
  std::vector<FheEngine::Bit> fw;
  for (int i = 0; i < 4; ++i) {
    const bool v = rng() & 1u;
    cw.push_back(clear.input(v));
    fw.push_back(fhe.input(v));
  }
  cw.push_back(clear.constant(true));
  fw.push_back(fhe.constant(true));
  // Wires are drawn from the most recent ones to keep the depth small.
  for (int g = 0; g < 24; ++g) {
    const size_t lo = cw.size() > 6 ? cw.size() - 6 : 0;
    std::uniform_int_distribution<size_t> pick(lo, cw.size() - 1);
    const size_t i = pick(rng), j = pick(rng);
    cw.push_back(clear.nand(cw[i], cw[j]));
    fw.push_back(fhe.nand(fw[i], fw[j]));
  }
  for (size_t k = 0; k < cw.size(); ++k) {
    EXPECT_EQ(fhe.read_back(fw[k]), clear.read_back(cw[k])) << "wire " << k;
    EXPECT_EQ(fw[k].is_constant, cw[k].is_constant);
  }
  EXPECT_EQ(fhe.stats().nand_count, clear.stats().nand_count);
  EXPECT_EQ(fhe.stats().max_depth, clear.stats().max_depth);
}

TEST_F(FheEngineTest, Capabilities) {
  FheEngine server(params);
  EXPECT_FALSE(server.can_encrypt());
  EXPECT_THROW(server.input(true), CapabilityError);

  FheEngine client(keys.public_key, 1);
  const auto x = client.input(true);
  EXPECT_THROW(client.read_back(x), CapabilityError);
  EXPECT_TRUE(client.read_back(client.constant(true)));

  // Server evaluates on imported ciphertexts with public material only.
  const auto y = server.import_ciphertext(*client.export_ciphertext(x));
  const auto ny = server.nand(y, y);
  FheEngine owner(keys, 2);
  EXPECT_FALSE(owner.read_back(
      owner.import_ciphertext(*server.export_ciphertext(ny))));
}

TEST_F(FheEngineTest, FoldedNotIsFree) {
  FheEngine e(keys, 3);
  const auto x = e.input(true);
  const auto nx = e.nand(x, e.constant(true));
  EXPECT_FALSE(e.read_back(nx));
  EXPECT_EQ(e.stats().nand_count, 0u);
  EXPECT_EQ(nx.depth(), 0u);
  const auto one = e.nand(e.constant(false), x);
  EXPECT_TRUE(one.is_constant && one.value);
  EXPECT_EQ(e.export_ciphertext(one), nullptr);
}

TEST_F(FheEngineTest, ImportChecksShape) {
  FheEngine e(params);
  EXPECT_THROW(e.import_ciphertext(Ciphertext(BitMatrix(8), 0, 1.0)), UsageError);
}

TEST_F(FheEngineTest, ForeignHandleRejected) {
  FheEngine a(keys, 1), b(keys, 2);
  const auto x = a.input(false);
  EXPECT_THROW(b.nand(x, b.input(true)), UsageError);
}

}  // namespace
}  // namespace fhefft
