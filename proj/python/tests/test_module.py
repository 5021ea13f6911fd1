# Copyright 2026 The fhefft Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import cmath

import pytest

import fhefft


def naive_dft(x):
    n = len(x)
    return [sum(x[j] * cmath.exp(-2j * cmath.pi * j * k / n) for j in range(n))
            for k in range(n)]


@pytest.fixture(scope="module")
def deep_keys():
    return fhefft.keygen(fhefft.SchemeParams.deep(), seed=11)


def test_presets():
    toy = fhefft.SchemeParams.toy()
    assert (toy.n, toy.ell, toy.depth_budget) == (8, 29, 3)
    assert fhefft.SchemeParams.from_json('{"preset": "toy"}') == toy


def test_reference_matches_naive_dft():
    x = [complex(i % 3, -i / 4) for i in range(8)]
    for a, b in zip(fhefft.reference_fft(x), naive_dft(x)):
        assert abs(a - b) < 1e-12


def test_clear_fft_within_bound():
    x = [complex((i * 7 % 8) / 8, (i * 3 % 8) / 8) for i in range(8)]
    got = fhefft.fft_clear(x)["spectrum"]
    bound = fhefft.error_bound(8)
    assert bound == pytest.approx(3.0517578125e-4)
    for a, b in zip(got, naive_dft(x)):
        assert abs(a.real - b.real) <= bound
        assert abs(a.imag - b.imag) <= bound


def test_bit_nand(deep_keys):
    p = deep_keys.params
    for a in (0, 1):
        for b in (0, 1):
            ca = fhefft.encrypt_bit(deep_keys, bool(a), seed=2 * a + b)
            cb = fhefft.encrypt_bit(deep_keys, bool(b), seed=7 + a + b)
            assert fhefft.decrypt_bit(deep_keys, fhefft.nand(p, ca, cb)) == (not (a and b))


def test_encrypted_matches_clear(deep_keys):
    x = [0.5, -0.25]
    enc = fhefft.fft_encrypted(x, deep_keys, bits=8, frac=4)
    clear = fhefft.fft_clear(x, bits=8, frac=4)
    assert enc["spectrum"] == clear["spectrum"]
    assert enc["nand_count"] == clear["nand_count"]


def test_container_flow_and_wrong_key(deep_keys):
    x = [0.75, 0.125]
    ct = fhefft.encrypt_signal(x, deep_keys.public_key_bytes(), bits=8, frac=4)
    out = fhefft.fft_container(ct)
    assert fhefft.decrypt_signal(out, deep_keys.secret_key_bytes()) == [0.875, 0.625]
    other = fhefft.keygen(fhefft.SchemeParams.deep(), seed=12)
    with pytest.raises(fhefft.NoiseOverflowError):
        fhefft.decrypt_signal(ct, other.secret_key_bytes())


def test_errors_map_to_python():
    with pytest.raises(fhefft.ParseError):
        fhefft.fft_container(b"garbage bytes that are not a container")
    with pytest.raises(ValueError):
        fhefft.fft_clear([1.0, 2.0, 3.0])
    with pytest.raises(OverflowError):
        fhefft.fft_clear([100.0, 0.0], bits=8, frac=4)


def test_experiment_report():
    r = fhefft.run_1d_experiment(8, trials=10)
    assert r["trials"] == 10
    assert r["max_error"] <= r["error_bound"]
    assert fhefft.nand_cost("add", bits=32) == 1152
