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

// Python bindings. Signals are lists of complex numbers; keys and
// containers cross the boundary as the same bytes the CLI writes.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "fhefft/error_model.hpp"
#include "fhefft/fft.hpp"
#include "fhefft/harness.hpp"
#include "fhefft/serialize.hpp"

namespace py = pybind11;
using namespace fhefft;

namespace {

FixedFormat make_format(uint32_t bits, uint32_t frac) {
  FixedFormat f{bits, frac};
  f.validate();
  return f;
}

// Shape defaults to 1 x len(values).
std::pair<size_t, size_t> shape_of(const std::vector<Complex>& v, size_t rows,
                                   size_t cols) {
  if (cols == 0) cols = rows ? v.size() / rows : 0;
  if (rows * cols != v.size()) throw UsageError("shape does not match value count");
  return {rows, cols};
}

py::dict result_dict(const TransformResult& r) {
  py::dict d;
  d["spectrum"] = r.spectrum;
  d["nand_count"] = r.gates.nand_count;
  d["max_depth"] = r.gates.max_depth;
  d["butterflies"] = r.fft.butterflies;
  return d;
}

template <class T, class Fn>
py::bytes to_bytes(const T& value, Fn write) {
  std::ostringstream out;
  write(out, value);
  return py::bytes(out.str());
}

template <class Fn>
auto from_bytes(const py::bytes& data, Fn read) {
  std::istringstream in{std::string(data)};
  return read(in);
}

py::dict report_dict(const ErrorReport& r) {
  return py::module_::import("json").attr("loads")(report_to_json(r, -1));
}

}  // namespace

PYBIND11_MODULE(fhefft, m) {
  m.doc() = "Fixed-point FFT over GSW-encrypted bits";

  auto base = py::register_exception<std::runtime_error>(m, "FhefftError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<NoiseOverflowError>(m, "NoiseOverflowError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_OverflowError);

  py::class_<SchemeParams>(m, "SchemeParams")
      .def_static("toy", &SchemeParams::toy)
      .def_static("medium", &SchemeParams::medium)
      .def_static("deep", &SchemeParams::deep)
      .def_static("from_json", &parse_params_json)
      .def("to_json", &params_to_json)
      .def_readonly("n", &SchemeParams::n)
      .def_readonly("ell", &SchemeParams::ell)
      .def_readonly("m", &SchemeParams::m)
      .def_readonly("depth_budget", &SchemeParams::depth_budget)
      .def_property_readonly("ct_side", &SchemeParams::ct_side)
      .def_property_readonly("noise_threshold_log2", &SchemeParams::noise_threshold_log2)
      .def(py::self == py::self)
      .def("__repr__", [](const SchemeParams& p) {
        return "SchemeParams(n=" + std::to_string(p.n) + ", ell=" + std::to_string(p.ell) +
               ", depth_budget=" + std::to_string(p.depth_budget) + ")";
      });

  py::class_<Ciphertext>(m, "Ciphertext")
      .def_property_readonly("level", &Ciphertext::level)
      .def_property_readonly("noise_log2", &Ciphertext::noise_log2);

  py::class_<KeyPair>(m, "KeyPair")
      .def_property_readonly("params", [](const KeyPair& k) { return k.public_key.params; })
      .def("public_key_bytes", [](const KeyPair& k) {
        return to_bytes(k.public_key, write_public_key);
      })
      .def("secret_key_bytes", [](const KeyPair& k) {
        return to_bytes(k.secret_key, write_secret_key);
      });

  m.def("keygen", &keygen, py::arg("params"), py::arg("seed") = 1);

  m.def("encrypt_bit", [](const KeyPair& k, bool bit, uint64_t seed) {
    std::mt19937_64 rng(seed);
    return encrypt_bit(k.public_key, bit, rng);
  }, py::arg("keys"), py::arg("bit"), py::arg("seed") = 1);
  m.def("decrypt_bit", [](const KeyPair& k, const Ciphertext& ct) {
    return decrypt_bit_checked(k.secret_key, ct).bit;
  });
  m.def("nand", [](const SchemeParams& p, const Ciphertext& a, const Ciphertext& b) {
    return Evaluator(p).nand(a, b);
  });

  m.def("reference_fft", [](const std::vector<Complex>& x, size_t rows, size_t cols) {
    auto [r, c] = shape_of(x, rows, cols);
    return r == 1 ? reference_fft(x) : reference_fft_2d(x, r, c);
  }, py::arg("values"), py::arg("rows") = 1, py::arg("cols") = 0);

  m.def("fft_clear", [](const std::vector<Complex>& x, size_t rows, size_t cols,
                        uint32_t bits, uint32_t frac) {
    auto [r, c] = shape_of(x, rows, cols);
    return result_dict(transform_clear(x, r, c, make_format(bits, frac)));
  }, py::arg("values"), py::arg("rows") = 1, py::arg("cols") = 0,
     py::arg("bits") = 32, py::arg("frac") = 16);

  m.def("fft_encrypted", [](const std::vector<Complex>& x, const KeyPair& keys,
                            size_t rows, size_t cols, uint32_t bits, uint32_t frac,
                            uint64_t seed, unsigned threads) {
    auto [r, c] = shape_of(x, rows, cols);
    const FixedFormat fmt = make_format(bits, frac);
    TransformResult res;
    {
      py::gil_scoped_release release;
      res = transform_fhe(x, r, c, fmt, keys, seed, threads);
    }
    return result_dict(res);
  }, py::arg("values"), py::arg("keys"), py::arg("rows") = 1, py::arg("cols") = 0,
     py::arg("bits") = 16, py::arg("frac") = 8, py::arg("seed") = 1,
     py::arg("threads") = 1);

  // Client/server flow over serialized containers.
  m.def("encrypt_signal", [](const std::vector<Complex>& x, const py::bytes& pk_bytes,
                             size_t rows, size_t cols, uint32_t bits, uint32_t frac,
                             uint64_t seed) {
    auto [r, c] = shape_of(x, rows, cols);
    const PublicKey pk = from_bytes(pk_bytes, read_public_key);
    FheEngine e(pk, seed);
    const auto s = load_signal(e, std::span<const Complex>(x), r, c, make_format(bits, frac));
    return to_bytes(pack_signal(e, s), write_container);
  }, py::arg("values"), py::arg("public_key"), py::arg("rows") = 1, py::arg("cols") = 0,
     py::arg("bits") = 16, py::arg("frac") = 8, py::arg("seed") = 1);

  m.def("fft_container", [](const py::bytes& data, unsigned threads) {
    const SignalContainer c = from_bytes(data, read_container);
    std::string out;
    {
      py::gil_scoped_release release;
      std::ostringstream os;
      if (c.backend == Backend::kClear) {
        ClearEngine e;
        write_container(os, pack_signal(e, fft_auto(e, unpack_signal(e, c))));
      } else {
        FheEngine e(c.params, threads);
        write_container(os, pack_signal(e, fft_auto(e, unpack_signal(e, c))));
      }
      out = os.str();
    }
    return py::bytes(out);
  }, py::arg("container"), py::arg("threads") = 1);

  m.def("decrypt_signal", [](const py::bytes& data, const py::bytes& sk_bytes) {
    const SignalContainer c = from_bytes(data, read_container);
    const SecretKey sk = from_bytes(sk_bytes, read_secret_key);
    if (sk.params != c.params) {
      throw NoiseOverflowError("secret key parameters differ from the ciphertext's");
    }
    FheEngine e(KeyPair{{sk.params, {}}, sk}, 0);
    return read_signal(e, unpack_signal(e, c));
  }, py::arg("container"), py::arg("secret_key"));

  m.def("error_bound", [](size_t m_points, uint32_t frac, double x_bound) {
    return fft_error_bound({std::ldexp(1.0, -static_cast<int>(frac)), x_bound, m_points, {}});
  }, py::arg("m"), py::arg("frac") = 16, py::arg("x_bound") = 1.0);
  m.def("error_bound_2d", [](size_t rows, size_t cols, uint32_t frac, double x_bound) {
    return fft_2d_error_bound(rows, cols, std::ldexp(1.0, -static_cast<int>(frac)), x_bound);
  }, py::arg("rows"), py::arg("cols"), py::arg("frac") = 16, py::arg("x_bound") = 1.0);
  m.def("nand_cost", [](const std::string& op, uint32_t bits, size_t m_points,
                        const SchemeParams& p) {
    return nand_cost({bits, p.ct_side(), m_points, m_points}, parse_cost_op(op));
  }, py::arg("op"), py::arg("bits") = 32, py::arg("m") = 8,
     py::arg("params") = SchemeParams::toy());

  m.def("run_1d_experiment", [](size_t m_points, size_t trials, uint32_t bits,
                                uint32_t frac, uint64_t seed) {
    ExperimentConfig cfg;
    cfg.format = make_format(bits, frac);
    cfg.trials = trials;
    cfg.seed = seed;
    ErrorReport r;
    {
      py::gil_scoped_release release;
      r = run_1d_experiment(m_points, cfg);
    }
    return report_dict(r);
  }, py::arg("m"), py::arg("trials") = 100, py::arg("bits") = 32,
     py::arg("frac") = 16, py::arg("seed") = 1);

  m.def("verify_spectrum", [](const std::vector<Complex>& x, const std::vector<Complex>& y,
                              size_t rows, size_t cols, uint32_t bits, uint32_t frac) {
    auto [r, c] = shape_of(x, rows, cols);
    if (y.size() != x.size()) throw UsageError("signal and spectrum sizes differ");
    return report_dict(verify_spectrum(x, y, r, c, make_format(bits, frac)));
  }, py::arg("signal"), py::arg("spectrum"), py::arg("rows") = 1, py::arg("cols") = 0,
     py::arg("bits") = 32, py::arg("frac") = 16);
}
