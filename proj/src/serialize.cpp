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

#include "fhefft/serialize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fhefft {

namespace {

constexpr char kPkMagic[8] = {'F', 'H', 'E', 'F', 'F', 'T', 'P', 'K'};
constexpr char kSkMagic[8] = {'F', 'H', 'E', 'F', 'F', 'T', 'S', 'K'};
constexpr char kCtMagic[8] = {'F', 'H', 'E', 'F', 'F', 'T', 'C', 'T'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* p, size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw std::runtime_error("write failed");
  }
  template <class T>
  void le(T v) {
    uint8_t buf[sizeof(T)];
    uint64_t u;
    if constexpr (std::is_same_v<T, double>) {
      std::memcpy(&u, &v, 8);
    } else {
      u = static_cast<uint64_t>(v);
    }
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<uint8_t>(u >> (8 * i));
    bytes(buf, sizeof(T));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  void bytes(void* p, size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) {
      fail("truncated input");
    }
    offset_ += n;
  }
  template <class T>
  T le() {
    uint8_t buf[sizeof(T)];
    bytes(buf, sizeof(T));
    uint64_t u = 0;
    for (size_t i = 0; i < sizeof(T); ++i) u |= uint64_t{buf[i]} << (8 * i);
    if constexpr (std::is_same_v<T, double>) {
      double d;
      std::memcpy(&d, &u, 8);
      return d;
    } else {
      return static_cast<T>(u);
    }
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(offset_, msg); }
  [[noreturn]] void fail_at(size_t offset, const std::string& msg) const {
    throw ParseError(what_ + ": " + msg + " at byte offset " +
                     std::to_string(offset));
  }
  size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::string what_;
  size_t offset_ = 0;
};

void write_params(Writer& w, const SchemeParams& p) {
  w.le<uint32_t>(p.n);
  w.le<uint32_t>(p.ell);
  w.le<uint32_t>(p.m);
  w.le<uint32_t>(p.noise_bound);
  w.le<uint32_t>(p.depth_budget);
}

SchemeParams read_params(Reader& r) {
  SchemeParams p;
  p.n = r.le<uint32_t>();
  p.ell = r.le<uint32_t>();
  p.m = r.le<uint32_t>();
  p.noise_bound = r.le<uint32_t>();
  p.depth_budget = r.le<uint32_t>();
  try {
    p.validate();
  } catch (const ParameterError& e) {
    r.fail(std::string("invalid scheme parameters (") + e.what() + ")");
  }
  return p;
}

void read_magic(Reader& r, const char (&magic)[8]) {
  const size_t start = r.offset();
  char got[8];
  r.bytes(got, 8);
  if (std::memcmp(got, magic, 8) != 0) {
    r.fail_at(start, "bad magic, expected " + std::string(magic, 8));
  }
  const auto version = r.le<uint32_t>();
  if (version != kFormatVersion) {
    r.fail("unsupported format version " + std::to_string(version));
  }
}

uint32_t element_bytes(const SchemeParams& p) { return (p.ell + 7) / 8; }

void write_elements(Writer& w, const SchemeParams& p,
                    const std::vector<BigInt>& xs) {
  const uint32_t nb = element_bytes(p);
  w.le<uint32_t>(nb);
  w.le<uint64_t>(xs.size());
  std::vector<uint8_t> buf;
  for (const auto& x : xs) {
    buf.clear();
    boost::multiprecision::export_bits(x, std::back_inserter(buf), 8, false);
    if (buf.size() > nb) throw UsageError("key element exceeds modulus width");
    buf.resize(nb, 0);
    w.bytes(buf.data(), nb);
  }
}

std::vector<BigInt> read_elements(Reader& r, const SchemeParams& p,
                                  size_t expected) {
  const auto nb = r.le<uint32_t>();
  if (nb != element_bytes(p)) r.fail("element width does not match ell");
  const auto count = r.le<uint64_t>();
  if (count != expected) r.fail("unexpected element count");
  const BigInt q = p.q();
  std::vector<BigInt> xs(count);
  std::vector<uint8_t> buf(nb);
  for (auto& x : xs) {
    r.bytes(buf.data(), nb);
    boost::multiprecision::import_bits(x, buf.begin(), buf.end(), 8, false);
    if (x >= q) r.fail("key element not reduced mod q");
  }
  return xs;
}

template <class Key>
void write_key(std::ostream& out, const char (&magic)[8], const Key& key,
               const std::vector<BigInt>& xs) {
  Writer w(out);
  w.bytes(magic, 8);
  w.le<uint32_t>(kFormatVersion);
  write_params(w, key.params);
  w.le<uint64_t>(key.params.hash());
  write_elements(w, key.params, xs);
}

SchemeParams read_key_header(Reader& r, const char (&magic)[8]) {
  read_magic(r, magic);
  const SchemeParams p = read_params(r);
  if (r.le<uint64_t>() != p.hash()) r.fail("parameter hash mismatch");
  return p;
}

void check_container_shape(const SignalContainer& c) {
  c.format.validate();
  const uint64_t expected =
      uint64_t{c.rows} * c.cols * 2 * c.format.total_bits;
  if (c.bits.size() != expected) {
    throw UsageError("container holds " + std::to_string(c.bits.size()) +
                     " bits, shape needs " + std::to_string(expected));
  }
}

template <BitEngine E, class Fn>
SignalContainer pack_common(const SignalBuffer<E>& s, Backend backend,
                            Fn&& store) {
  SignalContainer c;
  c.backend = backend;
  c.rows = static_cast<uint32_t>(s.rows);
  c.cols = static_cast<uint32_t>(s.cols);
  if (s.points.empty()) throw UsageError("cannot pack an empty signal");
  c.format = s.points.front().re.format;
  c.bits.reserve(s.points.size() * 2 * c.format.total_bits);
  for (const auto& p : s.points) {
    for (const auto* w : {&p.re, &p.im}) {
      for (const auto& b : w->bits) c.bits.push_back(store(b));
    }
  }
  check_container_shape(c);
  return c;
}

template <BitEngine E, class Fn>
SignalBuffer<E> unpack_common(const SignalContainer& c, Fn&& load) {
  check_container_shape(c);
  SignalBuffer<E> s{{}, c.rows, c.cols};
  const uint32_t F = c.format.total_bits;
  size_t k = 0;
  for (size_t i = 0; i < size_t{c.rows} * c.cols; ++i) {
    ComplexFixed<E> p{{{}, c.format}, {{}, c.format}};
    for (auto* w : {&p.re, &p.im}) {
      w->bits.reserve(F);
      for (uint32_t b = 0; b < F; ++b) w->bits.push_back(load(c.bits[k++]));
    }
    s.points.push_back(std::move(p));
  }
  return s;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

void write_public_key(std::ostream& out, const PublicKey& pk) {
  write_key(out, kPkMagic, pk, pk.matrix);
}

void write_secret_key(std::ostream& out, const SecretKey& sk) {
  write_key(out, kSkMagic, sk, sk.vector);
}

PublicKey read_public_key(std::istream& in) {
  Reader r(in, "public key");
  PublicKey pk;
  pk.params = read_key_header(r, kPkMagic);
  pk.matrix = read_elements(r, pk.params, size_t{pk.params.m} * (pk.params.n + 1));
  return pk;
}

SecretKey read_secret_key(std::istream& in) {
  Reader r(in, "secret key");
  SecretKey sk;
  sk.params = read_key_header(r, kSkMagic);
  sk.vector = read_elements(r, sk.params, size_t{sk.params.n} + 1);
  return sk;
}

void write_container(std::ostream& out, const SignalContainer& c) {
  check_container_shape(c);
  Writer w(out);
  w.bytes(kCtMagic, 8);
  w.le<uint32_t>(kFormatVersion);
  w.le<uint8_t>(c.backend == Backend::kClear ? 0 : 1);
  const uint8_t reserved[3] = {0, 0, 0};
  w.bytes(reserved, 3);
  w.le<uint64_t>(c.params.hash());
  write_params(w, c.params);
  w.le<uint32_t>(c.format.total_bits);
  w.le<uint32_t>(c.format.frac_bits);
  w.le<uint32_t>(c.rows);
  w.le<uint32_t>(c.cols);
  w.le<uint64_t>(c.bits.size());
  const uint32_t side = c.params.ct_side();
  std::vector<uint8_t> packed;
  for (const auto& b : c.bits) {
    if (c.backend == Backend::kClear) {
      w.le<uint8_t>(b.value ? 1 : 0);
      continue;
    }
    w.le<uint8_t>(static_cast<uint8_t>(b.kind));
    if (b.kind != StoredBit::Kind::kCiphertext) continue;
    if (!b.ct || b.ct->side() != side) {
      throw UsageError("stored ciphertext does not match container parameters");
    }
    w.le<uint32_t>(b.ct->level());
    w.le<double>(b.ct->noise_log2());
    packed.assign((size_t{side} * side + 7) / 8, 0);
    const BitMatrix& m = b.ct->matrix();
    for (uint32_t r = 0; r < side; ++r) {
      for (uint32_t col = 0; col < side; ++col) {
        if (m.get(r, col)) {
          const size_t idx = size_t{r} * side + col;
          packed[idx / 8] |= static_cast<uint8_t>(1u << (idx % 8));
        }
      }
    }
    w.bytes(packed.data(), packed.size());
  }
}

SignalContainer read_container(std::istream& in) {
  Reader r(in, "signal container");
  read_magic(r, kCtMagic);
  SignalContainer c;
  const auto backend = r.le<uint8_t>();
  if (backend > 1) r.fail("unknown backend tag " + std::to_string(backend));
  c.backend = backend == 0 ? Backend::kClear : Backend::kFhe;
  uint8_t reserved[3];
  r.bytes(reserved, 3);
  const auto hash = r.le<uint64_t>();
  c.params = read_params(r);
  if (hash != c.params.hash()) r.fail("parameter hash mismatch");
  c.format.total_bits = r.le<uint32_t>();
  c.format.frac_bits = r.le<uint32_t>();
  try {
    c.format.validate();
  } catch (const UsageError& e) {
    r.fail(e.what());
  }
  c.rows = r.le<uint32_t>();
  c.cols = r.le<uint32_t>();
  if (!is_power_of_two(c.rows) || !is_power_of_two(c.cols)) {
    r.fail("signal dimensions must be powers of two");
  }
  const auto count = r.le<uint64_t>();
  if (count != uint64_t{c.rows} * c.cols * 2 * c.format.total_bits) {
    r.fail("bit count does not match shape");
  }
  const uint32_t side = c.params.ct_side();
  std::vector<uint8_t> packed;
  c.bits.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    StoredBit b;
    const auto tag = r.le<uint8_t>();
    if (c.backend == Backend::kClear) {
      if (tag > 1) r.fail("clear bit must be 0 or 1");
      b.value = tag == 1;
      b.kind = b.value ? StoredBit::Kind::kOne : StoredBit::Kind::kZero;
      c.bits.push_back(std::move(b));
      continue;
    }
    if (tag > 2) r.fail("unknown bit kind " + std::to_string(tag));
    b.kind = static_cast<StoredBit::Kind>(tag);
    b.value = b.kind == StoredBit::Kind::kOne;
    if (b.kind == StoredBit::Kind::kCiphertext) {
      const auto level = r.le<uint32_t>();
      const auto noise = r.le<double>();
      if (!std::isfinite(noise)) r.fail("noise bound is not finite");
      packed.resize((size_t{side} * side + 7) / 8);
      r.bytes(packed.data(), packed.size());
      BitMatrix m(side);
      for (uint32_t row = 0; row < side; ++row) {
        for (uint32_t col = 0; col < side; ++col) {
          const size_t idx = size_t{row} * side + col;
          if ((packed[idx / 8] >> (idx % 8)) & 1u) m.set(row, col, true);
        }
      }
      b.ct = std::make_shared<const Ciphertext>(std::move(m), level, noise);
    }
    c.bits.push_back(std::move(b));
  }
  return c;
}

SignalContainer pack_signal(const ClearEngine& e,
                            const SignalBuffer<ClearEngine>& s) {
  return pack_common(s, Backend::kClear, [&](const ClearEngine::Bit& b) {
    StoredBit out;
    out.value = e.read_back(b);
    out.kind = out.value ? StoredBit::Kind::kOne : StoredBit::Kind::kZero;
    return out;
  });
}

SignalContainer pack_signal(const FheEngine& e,
                            const SignalBuffer<FheEngine>& s) {
  auto c = pack_common(s, Backend::kFhe, [&](const FheEngine::Bit& b) {
    StoredBit out;
    if (b.is_constant) {
      out.kind = b.value ? StoredBit::Kind::kOne : StoredBit::Kind::kZero;
      out.value = b.value;
    } else {
      out.kind = StoredBit::Kind::kCiphertext;
      out.ct = e.export_ciphertext(b);
    }
    return out;
  });
  c.params = e.params();
  return c;
}

SignalBuffer<ClearEngine> unpack_signal(ClearEngine& e,
                                        const SignalContainer& c) {
  if (c.backend != Backend::kClear) {
    throw UsageError("container holds encrypted bits; use the fhe backend");
  }
  return unpack_common<ClearEngine>(
      c, [&](const StoredBit& b) { return e.input(b.value); });
}

SignalBuffer<FheEngine> unpack_signal(FheEngine& e, const SignalContainer& c) {
  if (c.backend != Backend::kFhe) {
    throw UsageError("container holds cleartext bits; use the clear backend");
  }
  if (c.params.hash() != e.params().hash()) {
    throw NoiseOverflowError(
        "container was encrypted under different scheme parameters; "
        "decryption would only produce noise. Use the key pair that "
        "produced it.");
  }
  return unpack_common<FheEngine>(c, [&](const StoredBit& b) {
    if (b.kind == StoredBit::Kind::kCiphertext) {
      return e.import_ciphertext(*b.ct);
    }
    return e.constant(b.kind == StoredBit::Kind::kOne);
  });
}

TextSignal parse_signal_text(std::istream& in, const std::string& source) {
  TextSignal s;
  std::string line;
  size_t lineno = 0;
  bool shaped = false;
  auto fail = [&](const std::string& msg) {
    throw ParseError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::istringstream ss(t.substr(1));
      std::string word;
      if (ss >> word && word == "shape") {
        if (!(ss >> s.rows >> s.cols) || s.rows == 0 || s.cols == 0) {
          fail("expected '# shape ROWS COLS'");
        }
        shaped = true;
      }
      continue;
    }
    // "re,im", "re im" or a bare real value.
    std::string fields = t;
    std::replace(fields.begin(), fields.end(), ',', ' ');
    std::istringstream ss(fields);
    std::string re_s, im_s, extra;
    ss >> re_s >> im_s >> extra;
    if (!extra.empty()) fail("expected 're,im'");
    double re = 0.0, im = 0.0;
    if (!parse_double(re_s, re)) fail("bad real part");
    if (!im_s.empty() && !parse_double(im_s, im)) fail("bad imaginary part");
    s.values.emplace_back(re, im);
  }
  if (s.values.empty()) fail("no signal points");
  if (!shaped) {
    s.rows = 1;
    s.cols = s.values.size();
  }
  if (s.rows * s.cols != s.values.size()) {
    fail("shape " + std::to_string(s.rows) + "x" + std::to_string(s.cols) +
         " does not match " + std::to_string(s.values.size()) + " points");
  }
  if (!is_power_of_two(s.rows) || !is_power_of_two(s.cols)) {
    fail("signal dimensions must be powers of two");
  }
  return s;
}

void write_signal_text(std::ostream& out, const TextSignal& s) {
  if (s.rows != 1) out << "# shape " << s.rows << ' ' << s.cols << '\n';
  char buf[64];
  for (const auto& v : s.values) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.real(), v.imag());
    out << buf;
  }
}

Image read_pgm(std::istream& in, const std::string& source) {
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  size_t pos = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError(source + ": " + msg + " at byte offset " +
                     std::to_string(pos));
  };
  auto skip_space = [&] {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> uint64_t {
    skip_space();
    if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos]))) {
      fail("expected a decimal number");
    }
    uint64_t v = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
      v = v * 10 + static_cast<uint64_t>(data[pos++] - '0');
      if (v > (uint64_t{1} << 32)) fail("number too large");
    }
    return v;
  };
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5')) {
    fail("not a P2 or P5 PGM file");
  }
  const bool binary = data[1] == '5';
  pos = 2;
  Image img;
  img.cols = number();
  img.rows = number();
  const uint64_t maxval = number();
  if (img.cols == 0 || img.rows == 0) fail("empty image");
  if (maxval == 0 || maxval > 65535) fail("maxval must be in [1, 65535]");
  img.pixels.resize(img.rows * img.cols);
  if (binary) {
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
      fail("expected whitespace before raster");
    }
    ++pos;
    const size_t width = maxval < 256 ? 1 : 2;
    if (data.size() - pos < img.pixels.size() * width) fail("truncated raster");
    for (auto& p : img.pixels) {
      uint64_t v = static_cast<uint8_t>(data[pos++]);
      if (width == 2) v = (v << 8) | static_cast<uint8_t>(data[pos++]);
      if (v > maxval) fail("pixel exceeds maxval");
      p = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    for (auto& p : img.pixels) {
      const uint64_t v = number();
      if (v > maxval) fail("pixel exceeds maxval");
      p = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return img;
}

SchemeParams parse_params_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("params: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("params: expected a JSON object");
  if (j.contains("preset")) {
    const auto name = j["preset"].get<std::string>();
    if (name == "toy") return SchemeParams::toy();
    if (name == "medium") return SchemeParams::medium();
    if (name == "deep") return SchemeParams::deep();
    throw ParseError("params: unknown preset '" + name + "'");
  }
  try {
    const uint32_t n = j.at("n").get<uint32_t>();
    const uint32_t ell = j.at("ell").get<uint32_t>();
    const uint32_t m = j.value("m", 16u);
    const uint32_t b = j.value("noise_bound", 2u);
    SchemeParams p = SchemeParams::make(n, ell, m, b);
    if (j.contains("depth_budget")) {
      p.depth_budget = j["depth_budget"].get<uint32_t>();
      p.validate();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params: ") + e.what());
  }
}

std::string params_to_json(const SchemeParams& p) {
  nlohmann::ordered_json j;
  j["n"] = p.n;
  j["ell"] = p.ell;
  j["m"] = p.m;
  j["noise_bound"] = p.noise_bound;
  j["depth_budget"] = p.depth_budget;
  j["ct_side"] = p.ct_side();
  j["noise_threshold_log2"] = p.noise_threshold_log2();
  return j.dump(2);
}

TwiddleTable parse_twiddles_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    FixedFormat fmt{j.at("total_bits").get<uint32_t>(),
                    j.at("frac_bits").get<uint32_t>()};
    const auto size = j.at("size").get<size_t>();
    std::vector<Twiddle> entries;
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 2) {
        throw ParseError("twiddles: each entry must be [re, im]");
      }
      entries.push_back({e[0].get<int64_t>(), e[1].get<int64_t>()});
    }
    return TwiddleTable(size, fmt, std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("twiddles: ") + e.what());
  }
}

std::string twiddles_to_json(const TwiddleTable& t) {
  nlohmann::ordered_json j;
  j["size"] = t.size();
  j["total_bits"] = t.format().total_bits;
  j["frac_bits"] = t.format().frac_bits;
  auto arr = nlohmann::json::array();
  for (const auto& w : t.entries()) arr.push_back({w.re, w.im});
  j["entries"] = arr;
  return j.dump(2);
}

}  // namespace fhefft
