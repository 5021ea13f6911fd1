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

#include "fhefft/fhe_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

namespace fhefft {

namespace {

constexpr uint32_t kMinEll = 8;
constexpr uint32_t kMaxEll = 1000;  // noise magnitudes are reported as double

template <class Fn>
void parallel_rows(uint32_t rows, unsigned threads, Fn&& fn) {
  if (threads <= 1 || rows < 2 * threads) {
    fn(0u, rows);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const uint32_t chunk = (rows + threads - 1) / threads;
  for (uint32_t lo = 0; lo < rows; lo += chunk) {
    pool.emplace_back(fn, lo, std::min(rows, lo + chunk));
  }
  for (auto& t : pool) t.join();
}

uint64_t read_bits(std::span<const uint64_t> row, uint32_t pos,
                   uint32_t count) {
  const uint32_t word = pos / 64;
  const uint32_t shift = pos % 64;
  uint64_t v = row[word] >> shift;
  if (shift != 0 && shift + count > 64) v |= row[word + 1] << (64 - shift);
  return count == 64 ? v : v & ((uint64_t{1} << count) - 1);
}

BigInt block_value(std::span<const uint64_t> row, uint32_t offset,
                   uint32_t len) {
  std::vector<uint64_t> limbs((len + 63) / 64, 0);
  for (uint32_t b = 0; b < len; b += 64) {
    limbs[b / 64] = read_bits(row, offset + b, std::min(64u, len - b));
  }
  BigInt x;
  boost::multiprecision::import_bits(x, limbs.begin(), limbs.end(), 64, false);
  return x;
}

// Writes the ell-bit decomposition of x (0 <= x < 2^ell) as digits.
void decompose_into(const BigInt& x, uint32_t ell, int32_t* digits) {
  std::vector<uint64_t> limbs;
  boost::multiprecision::export_bits(x, std::back_inserter(limbs), 64, false);
  for (uint32_t b = 0; b < ell; ++b) {
    const size_t w = b / 64;
    digits[b] = w < limbs.size() ? static_cast<int32_t>((limbs[w] >> (b % 64)) & 1u) : 0;
  }
}

BigInt random_zq(const SchemeParams& p, const BigInt& q, std::mt19937_64& rng) {
  const uint32_t words = (p.ell + 63) / 64;
  std::vector<uint64_t> limbs(words);
  for (;;) {
    for (auto& l : limbs) l = rng();
    if (p.ell % 64 != 0) limbs.back() &= (uint64_t{1} << (p.ell % 64)) - 1;
    BigInt x;
    boost::multiprecision::import_bits(x, limbs.begin(), limbs.end(), 64, false);
    if (x != q) return x;
  }
}

BigInt centered_abs(const BigInt& x, const BigInt& q) {
  BigInt r = x % q;
  if (r < 0) r += q;
  return r > q / 2 ? BigInt(q - r) : r;
}

BigInt mod_q(BigInt x, const BigInt& q) {
  x %= q;
  if (x < 0) x += q;
  return x;
}

double to_double(const BigInt& x) { return x.convert_to<double>(); }

std::string fmt_log2(double v) {
  std::ostringstream os;
  os.precision(4);
  os << "2^" << v;
  return os.str();
}

}  // namespace

namespace detail {

double log2_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

void flatten_row(std::span<const int32_t> digits, uint32_t blocks,
                 uint32_t ell, std::span<uint64_t> out) {
  std::fill(out.begin(), out.end(), 0);
  std::vector<int64_t> work(ell);
  for (uint32_t k = 0; k < blocks; ++k) {
    const uint32_t base = k * ell;
    for (uint32_t b = 0; b < ell; ++b) work[b] = digits[base + b];
    // Signed carry propagation; a carry out of bit ell-1 has weight
    // 2^ell = 1 (mod q) and re-enters at bit 0.
    int64_t carry = 0;
    bool first = true;
    while (first || carry != 0) {
      first = false;
      for (uint32_t b = 0; b < ell; ++b) {
        const int64_t t = work[b] + carry;
        const int64_t bit = t & 1;
        carry = (t - bit) / 2;
        work[b] = bit;
      }
    }
    // 2^ell - 1 is the second encoding of zero.
    bool all_ones = true;
    for (uint32_t b = 0; b < ell && all_ones; ++b) all_ones = work[b] == 1;
    if (all_ones) continue;
    for (uint32_t b = 0; b < ell; ++b) {
      if (work[b] != 0) {
        const uint32_t pos = base + b;
        out[pos / 64] |= uint64_t{1} << (pos % 64);
      }
    }
  }
}

}  // namespace detail

// --- SchemeParams ---------------------------------------------------------

BigInt SchemeParams::q() const { return (BigInt(1) << ell) - 1; }

double SchemeParams::noise_threshold_log2() const {
  return static_cast<double>(ell) - 3.0 +
         std::log2(1.0 - std::ldexp(1.0, -static_cast<int>(ell)));
}

void SchemeParams::validate() const {
  if (n < 1) throw ParameterError("lattice dimension n must be >= 1");
  if (ell < kMinEll || ell > kMaxEll) {
    throw ParameterError("ell must be in [" + std::to_string(kMinEll) + ", " +
                         std::to_string(kMaxEll) + "]");
  }
  if (m < 1) throw ParameterError("sample count m must be >= 1");
  if (noise_bound < 1) throw ParameterError("noise_bound must be >= 1");
  const BigInt modulus = q();
  if (BigInt(8) * m * noise_bound >= modulus) {
    throw ParameterError("q is below the noise floor of fresh ciphertexts");
  }
  const BigInt floor = BigInt(8) * noise_bound *
                       boost::multiprecision::pow(BigInt(ct_side() + 1),
                                                  depth_budget);
  if (modulus <= floor) {
    throw ParameterError(
        "q too small for depth_budget " + std::to_string(depth_budget) +
        " (max admissible: " +
        std::to_string(max_depth_budget(n, ell, noise_bound)) + ")");
  }
}

uint64_t SchemeParams::hash() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (char c : std::string("fhefft/params/v1")) mix(static_cast<uint8_t>(c));
  for (uint32_t field : {n, ell, m, noise_bound, depth_budget}) {
    for (int i = 0; i < 4; ++i) mix(static_cast<uint8_t>(field >> (8 * i)));
  }
  return h;
}

uint32_t SchemeParams::max_depth_budget(uint32_t n, uint32_t ell,
                                        uint32_t noise_bound) {
  const BigInt modulus = (BigInt(1) << ell) - 1;
  const BigInt growth = BigInt((n + 1) * ell + 1);
  BigInt floor = BigInt(8) * noise_bound;
  uint32_t depth = 0;
  while (modulus > floor * growth) {
    floor *= growth;
    ++depth;
  }
  return depth;
}

SchemeParams SchemeParams::make(uint32_t n, uint32_t ell, uint32_t m,
                                uint32_t noise_bound) {
  SchemeParams p{n, ell, m, noise_bound, 0};
  if (ell >= kMinEll && ell <= kMaxEll && noise_bound >= 1) {
    p.depth_budget = max_depth_budget(n, ell, noise_bound);
  }
  p.validate();
  return p;
}

SchemeParams SchemeParams::toy() { return make(8, 29, 16, 2); }
SchemeParams SchemeParams::medium() { return make(1, 127, 16, 2); }
SchemeParams SchemeParams::deep() { return make(1, 383, 16, 2); }

// --- BitMatrix ------------------------------------------------------------

BitMatrix::BitMatrix(uint32_t side)
    : side_(side),
      words_((side + 63) / 64),
      data_(size_t{side} * ((side + 63) / 64), 0) {}

void BitMatrix::set(uint32_t r, uint32_t c, bool value) {
  uint64_t& w = data_[size_t{r} * words_ + c / 64];
  const uint64_t mask = uint64_t{1} << (c % 64);
  w = value ? (w | mask) : (w & ~mask);
}

BitMatrix BitMatrix::transposed() const {
  BitMatrix t(side_);
  for (uint32_t r = 0; r < side_; ++r) {
    const auto src = row(r);
    const uint64_t rmask = uint64_t{1} << (r % 64);
    const uint32_t rword = r / 64;
    for (uint32_t w = 0; w < words_; ++w) {
      uint64_t bits = src[w];
      while (bits != 0) {
        const uint32_t c = w * 64 + static_cast<uint32_t>(std::countr_zero(bits));
        t.data_[size_t{c} * words_ + rword] |= rmask;
        bits &= bits - 1;
      }
    }
  }
  return t;
}

uint32_t BitMatrix::max_row_weight() const {
  uint32_t best = 0;
  for (uint32_t r = 0; r < side_; ++r) {
    uint32_t w = 0;
    for (uint64_t word : row(r)) w += static_cast<uint32_t>(std::popcount(word));
    best = std::max(best, w);
  }
  return best;
}

// --- Ciphertext -----------------------------------------------------------

Ciphertext::Ciphertext(BitMatrix matrix, uint32_t level, double noise_log2,
                       double plain_log2)
    : rows_(std::move(matrix)),
      level_(level),
      noise_log2_(noise_log2),
      plain_log2_(plain_log2) {
  cols_ = rows_.transposed();
  max_row_weight_ = rows_.max_row_weight();
}

// --- Key generation, encryption, decryption -------------------------------

KeyPair keygen(const SchemeParams& params, uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  const BigInt q = params.q();
  const uint32_t cols = params.n + 1;

  std::vector<BigInt> t(params.n);
  for (auto& ti : t) ti = random_zq(params, q, rng);

  SecretKey sk{params, {}};
  sk.vector.reserve(cols);
  for (const auto& ti : t) sk.vector.push_back(mod_q(-ti, q));
  sk.vector.emplace_back(1);

  PublicKey pk{params, std::vector<BigInt>(size_t{params.m} * cols)};
  std::uniform_int_distribution<int64_t> noise(
      -static_cast<int64_t>(params.noise_bound),
      static_cast<int64_t>(params.noise_bound));
  for (uint32_t r = 0; r < params.m; ++r) {
    BigInt b = noise(rng);
    for (uint32_t c = 0; c < params.n; ++c) {
      BigInt a = random_zq(params, q, rng);
      b += a * t[c];
      pk.matrix[size_t{r} * cols + c] = std::move(a);
    }
    pk.matrix[size_t{r} * cols + params.n] = mod_q(std::move(b), q);
  }
  return {std::move(pk), std::move(sk)};
}

namespace {

Ciphertext encrypt_small(const PublicKey& pk, int32_t mu,
                         std::mt19937_64& rng) {
  const SchemeParams& p = pk.params;
  const BigInt q = p.q();
  const uint32_t side = p.ct_side();
  const uint32_t cols = p.n + 1;

  BitMatrix out(side);
  std::vector<int32_t> digits(side);
  std::vector<BigInt> acc(cols);
  uint32_t max_weight = 0;
  for (uint32_t i = 0; i < side; ++i) {
    // Row i of BitDecomp(R * A) for a fresh uniform R in {0,1}^(N x m).
    std::fill(acc.begin(), acc.end(), BigInt(0));
    uint32_t weight = 0;
    uint64_t pool = 0;
    for (uint32_t j = 0; j < p.m; ++j) {
      if (j % 64 == 0) pool = rng();
      if ((pool >> (j % 64)) & 1u) {
        ++weight;
        for (uint32_t c = 0; c < cols; ++c) acc[c] += pk.at(j, c);
      }
    }
    max_weight = std::max(max_weight, weight);
    for (uint32_t c = 0; c < cols; ++c) {
      decompose_into(acc[c] % q, p.ell, digits.data() + size_t{c} * p.ell);
    }
    digits[i] += mu;
    detail::flatten_row(digits, cols, p.ell, out.row(i));
  }
  const double noise =
      std::log2(static_cast<double>(std::max(1u, max_weight)) * p.noise_bound);
  const double plain = std::log2(std::max(1.0, static_cast<double>(mu)));
  return Ciphertext(std::move(out), 0, noise, plain);
}

// x_i = <C_i, Powersof2(s)> mod q for every row.
std::vector<BigInt> phase(const SecretKey& sk, const Ciphertext& ct) {
  const SchemeParams& p = sk.params;
  const BigInt q = p.q();
  const uint32_t side = p.ct_side();
  if (ct.side() != side) {
    throw UsageError("ciphertext side " + std::to_string(ct.side()) +
                     " does not match key (" + std::to_string(side) + ")");
  }
  std::vector<BigInt> x(side);
  for (uint32_t i = 0; i < side; ++i) {
    const auto row = ct.matrix().row(i);
    BigInt acc = 0;
    for (uint32_t k = 0; k <= p.n; ++k) {
      BigInt block = block_value(row, k * p.ell, p.ell);
      if (sk.vector[k] == 1) {
        acc += block;
      } else {
        acc += block * sk.vector[k];
      }
    }
    x[i] = acc % q;
  }
  return x;
}

// max_i |x_i - mu * v_i| (centered), v = Powersof2(s).
BigInt measured_noise(const SecretKey& sk, const std::vector<BigInt>& x,
                      const BigInt& mu) {
  const SchemeParams& p = sk.params;
  const BigInt q = p.q();
  BigInt worst = 0;
  for (uint32_t k = 0; k <= p.n; ++k) {
    for (uint32_t b = 0; b < p.ell; ++b) {
      const BigInt v = (sk.vector[k] << b) % q;
      const BigInt e = centered_abs(x[size_t{k} * p.ell + b] - mu * v, q);
      if (e > worst) worst = e;
    }
  }
  return worst;
}

}  // namespace

Ciphertext encrypt_bit(const PublicKey& pk, bool mu, std::mt19937_64& rng) {
  return encrypt_small(pk, mu ? 1 : 0, rng);
}

Ciphertext encrypt_value(const PublicKey& pk, uint64_t mu,
                         std::mt19937_64& rng) {
  if (mu >= (uint64_t{1} << 30)) {
    throw UsageError("encrypt_value supports plaintexts below 2^30");
  }
  return encrypt_small(pk, static_cast<int32_t>(mu), rng);
}

BitDecryption decrypt_bit_checked(const SecretKey& sk, const Ciphertext& ct) {
  const SchemeParams& p = sk.params;
  const BigInt q = p.q();
  const std::vector<BigInt> x = phase(sk, ct);

  // Row with v_i = 2^(ell-2), in (q/4, q/2].
  const BigInt half = BigInt(1) << (p.ell - 2);
  BigInt xr = x[size_t{p.n} * p.ell + p.ell - 2];
  if (xr > q / 2) xr -= q;
  const BigInt d0 = abs(xr);
  const BigInt d1 = abs(xr - half);
  const bool bit = d1 < d0;

  const BigInt noise = measured_noise(sk, x, bit ? BigInt(1) : BigInt(0));
  if (noise * 8 >= q) {
    throw NoiseOverflowError(
        "decryption noise " + fmt_log2(std::log2(to_double(noise))) +
        " reached q/8 = " + fmt_log2(p.noise_threshold_log2()) +
        " (level " + std::to_string(ct.level()) +
        "): depth budget exceeded or ciphertext encrypted under another key");
  }
  return {bit, to_double(noise)};
}

bool decrypt_bit(const SecretKey& sk, const Ciphertext& ct) {
  return decrypt_bit_checked(sk, ct).bit;
}

uint64_t decrypt_value(const SecretKey& sk, const Ciphertext& ct,
                       uint32_t plain_bits) {
  const SchemeParams& p = sk.params;
  if (plain_bits < 1 || plain_bits + 3 > p.ell || plain_bits > 62) {
    throw UsageError("plain_bits must be in [1, min(ell - 3, 62)]");
  }
  const BigInt q = p.q();
  const std::vector<BigInt> x = phase(sk, ct);
  const uint32_t k = p.ell - 1 - plain_bits;
  const BigInt scale = BigInt(1) << k;

  BigInt xr = x[size_t{p.n} * p.ell + k];
  if (xr > q / 2) xr -= q;
  // round(xr / 2^k)
  BigInt num = xr + (scale >> 1);
  BigInt mu = num / scale;
  if (num < 0 && mu * scale != num) mu -= 1;
  if (mu < 0 || mu >= (BigInt(1) << plain_bits)) {
    throw NoiseOverflowError("decrypted value outside the plaintext space");
  }
  const BigInt noise = measured_noise(sk, x, mu);
  if (noise * 2 >= scale) {
    throw NoiseOverflowError("decryption noise " +
                             fmt_log2(std::log2(to_double(noise))) +
                             " exceeds the plaintext spacing");
  }
  return mu.convert_to<uint64_t>();
}

// --- Evaluator ------------------------------------------------------------

namespace {

// Flatten(sign * lhs * rhs [+ I]) where rhs is given column-major.
BitMatrix product_flatten(const SchemeParams& p, const BitMatrix& lhs,
                          const BitMatrix& rhs_cols, int32_t sign,
                          bool add_identity, unsigned threads) {
  const uint32_t side = lhs.side();
  const uint32_t words = lhs.words_per_row();
  BitMatrix out(side);
  parallel_rows(side, threads, [&](uint32_t lo, uint32_t hi) {
    std::vector<int32_t> digits(side);
    for (uint32_t i = lo; i < hi; ++i) {
      const uint64_t* lrow = lhs.row(i).data();
      for (uint32_t j = 0; j < side; ++j) {
        const uint64_t* rcol = rhs_cols.row(j).data();
        int32_t pc = 0;
        for (uint32_t w = 0; w < words; ++w) {
          pc += std::popcount(lrow[w] & rcol[w]);
        }
        digits[j] = sign * pc;
      }
      if (add_identity) digits[i] += 1;
      detail::flatten_row(digits, p.n + 1, p.ell, out.row(i));
    }
  });
  return out;
}

double log2_weight(const Ciphertext& ct) {
  return std::log2(static_cast<double>(ct.max_row_weight()));
}

}  // namespace

Evaluator::Evaluator(SchemeParams params, unsigned threads)
    : params_(params), threads_(std::max(1u, threads)) {
  params_.validate();
}

void Evaluator::check_shape(const Ciphertext& ct) const {
  if (ct.side() != params_.ct_side()) {
    throw UsageError("ciphertext side " + std::to_string(ct.side()) +
                     " does not match parameters (" +
                     std::to_string(params_.ct_side()) + ")");
  }
}

Ciphertext Evaluator::finish(BitMatrix matrix, uint32_t level,
                             double noise_log2, double plain_log2) const {
  if (noise_log2 >= params_.noise_threshold_log2()) {
    throw NoiseOverflowError(
        "noise bound " + fmt_log2(noise_log2) + " reached q/8 = " +
        fmt_log2(params_.noise_threshold_log2()) + " at NAND depth " +
        std::to_string(level) + "; use parameters with a larger modulus");
  }
  return Ciphertext(std::move(matrix), level, noise_log2, plain_log2);
}

Ciphertext Evaluator::nand(const Ciphertext& a, const Ciphertext& b) const {
  check_shape(a);
  check_shape(b);
  // (I - C1*C2) v = (1 - mu1*mu2) v - mu2*e1 - C1*e2
  const double a_left = detail::log2_add(a.noise_log2(), log2_weight(a) + b.noise_log2());
  const double b_left = detail::log2_add(b.noise_log2(), log2_weight(b) + a.noise_log2());
  const bool swap = b_left < a_left;
  const Ciphertext& left = swap ? b : a;
  const Ciphertext& right = swap ? a : b;
  BitMatrix out = product_flatten(params_, left.matrix(), right.columns(), -1,
                                  true, threads_);
  return finish(std::move(out), std::max(a.level(), b.level()) + 1,
                std::min(a_left, b_left), 0.0);
}

Ciphertext Evaluator::negate(const Ciphertext& a) const {
  check_shape(a);
  const uint32_t side = a.side();
  BitMatrix out(side);
  std::vector<int32_t> digits(side);
  for (uint32_t i = 0; i < side; ++i) {
    for (uint32_t j = 0; j < side; ++j) digits[j] = -static_cast<int32_t>(a.matrix().get(i, j));
    digits[i] += 1;
    detail::flatten_row(digits, params_.n + 1, params_.ell, out.row(i));
  }
  return finish(std::move(out), a.level(), a.noise_log2(), a.plain_log2());
}

Ciphertext Evaluator::add(const Ciphertext& a, const Ciphertext& b) const {
  check_shape(a);
  check_shape(b);
  const uint32_t side = a.side();
  BitMatrix out(side);
  std::vector<int32_t> digits(side);
  for (uint32_t i = 0; i < side; ++i) {
    for (uint32_t j = 0; j < side; ++j) {
      digits[j] = static_cast<int32_t>(a.matrix().get(i, j)) +
                  static_cast<int32_t>(b.matrix().get(i, j));
    }
    detail::flatten_row(digits, params_.n + 1, params_.ell, out.row(i));
  }
  return finish(std::move(out), std::max(a.level(), b.level()),
                detail::log2_add(a.noise_log2(), b.noise_log2()),
                detail::log2_add(a.plain_log2(), b.plain_log2()));
}

Ciphertext Evaluator::const_mult(const Ciphertext& a, const BigInt& k) const {
  check_shape(a);
  const BigInt q = params_.q();
  const BigInt alpha = mod_q(k, q);
  const uint32_t side = a.side();
  // M = Flatten(alpha * I): row (blk, b) holds BitDecomp(alpha * 2^b) in
  // block blk.
  BitMatrix scaled(side);
  std::vector<int32_t> digits(params_.ell);
  for (uint32_t blk = 0; blk <= params_.n; ++blk) {
    for (uint32_t b = 0; b < params_.ell; ++b) {
      const uint32_t r = blk * params_.ell + b;
      decompose_into((alpha << b) % q, params_.ell, digits.data());
      for (uint32_t j = 0; j < params_.ell; ++j) {
        if (digits[j] != 0) scaled.set(r, blk * params_.ell + j, true);
      }
    }
  }
  const double w = std::log2(static_cast<double>(scaled.max_row_weight()));
  BitMatrix out = product_flatten(params_, scaled, a.columns(), 1, false, threads_);
  const double plain = alpha == 0 ? 0.0 : std::log2(to_double(alpha)) + a.plain_log2();
  return finish(std::move(out), a.level() + 1, w + a.noise_log2(), plain);
}

Ciphertext Evaluator::mult(const Ciphertext& a, const Ciphertext& b) const {
  check_shape(a);
  check_shape(b);
  // C1*C2 v = mu1*mu2 v + mu2*e1 + C1*e2
  const double a_left = detail::log2_add(b.plain_log2() + a.noise_log2(),
                                         log2_weight(a) + b.noise_log2());
  const double b_left = detail::log2_add(a.plain_log2() + b.noise_log2(),
                                         log2_weight(b) + a.noise_log2());
  const bool swap = b_left < a_left;
  const Ciphertext& left = swap ? b : a;
  const Ciphertext& right = swap ? a : b;
  BitMatrix out = product_flatten(params_, left.matrix(), right.columns(), 1,
                                  false, threads_);
  return finish(std::move(out), std::max(a.level(), b.level()) + 1,
                std::min(a_left, b_left), a.plain_log2() + b.plain_log2());
}

}  // namespace fhefft
