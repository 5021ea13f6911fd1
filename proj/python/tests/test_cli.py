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

"""Drives the command-line tool end to end."""

import json
import os
import subprocess

import pytest

CLI = os.environ.get("FHEFFT_CLI", "")

pytestmark = pytest.mark.skipif(not CLI or not os.path.exists(CLI),
                                reason="fhefft CLI not built")


def run(*args, cwd):
    return subprocess.run([CLI, *args], cwd=cwd, capture_output=True, text=True)


def test_clear_pipeline(tmp_path):
    (tmp_path / "x.txt").write_text("1,0\n2,0.5\n-1,0\n0.25,-1\n")
    assert run("encrypt", "--signal", "x.txt", "--backend", "clear", "--out", "x.ct",
               cwd=tmp_path).returncode == 0
    assert run("fft", "--in", "x.ct", "--out", "X.ct", cwd=tmp_path).returncode == 0
    assert run("decrypt", "--in", "X.ct", "--out", "X.txt", cwd=tmp_path).returncode == 0
    first = (tmp_path / "X.txt").read_text().splitlines()[0]
    assert first == "2.25,-0.5"
    v = run("verify", "--signal", "x.txt", "--spectrum", "X.txt", cwd=tmp_path)
    assert v.returncode == 0
    assert json.loads(v.stdout)["max_error"] <= json.loads(v.stdout)["error_bound"]


def test_encrypt_decrypt_and_wrong_key(tmp_path):
    (tmp_path / "x.txt").write_text("0.5\n-0.25\n")
    assert run("keygen", "--preset", "deep", "--seed", "1", "--out", "a",
               cwd=tmp_path).returncode == 0
    assert run("keygen", "--preset", "deep", "--seed", "2", "--out", "b",
               cwd=tmp_path).returncode == 0
    assert run("encrypt", "--signal", "x.txt", "--pk", "a.pk", "--bits", "8",
               "--frac", "4", "--out", "x.ct", cwd=tmp_path).returncode == 0
    ok = run("decrypt", "--in", "x.ct", "--sk", "a.sk", cwd=tmp_path)
    assert ok.returncode == 0
    assert ok.stdout.splitlines() == ["0.5,0", "-0.25,0"]
    bad = run("decrypt", "--in", "x.ct", "--sk", "b.sk", cwd=tmp_path)
    assert bad.returncode == 3


def test_exit_codes(tmp_path):
    (tmp_path / "junk.ct").write_bytes(b"not a container")
    assert run("fft", "--in", "junk.ct", "--out", "o.ct", cwd=tmp_path).returncode == 2
    assert run("bound", "--size", "3", cwd=tmp_path).returncode != 0
    b = run("bound", "--size", "8", "--frac", "16", cwd=tmp_path)
    assert json.loads(b.stdout)["error_bound"] == pytest.approx(3.0517578125e-4)
    (tmp_path / "x.txt").write_text("1,0\n0,0\n")
    (tmp_path / "y.txt").write_text("9,0\n1,0\n")
    v = run("verify", "--signal", "x.txt", "--spectrum", "y.txt", cwd=tmp_path)
    assert v.returncode == 4


def test_eight_point_pipeline_matches_in_process(tmp_path):
    import random

    import fhefft

    rng = random.Random(5)
    x = [complex(rng.random(), rng.random()) for _ in range(8)]
    (tmp_path / "x.txt").write_text("".join(f"{v.real!r},{v.imag!r}\n" for v in x))
    for step in (("encrypt", "--signal", "x.txt", "--backend", "clear", "--out", "x.ct"),
                 ("fft", "--in", "x.ct", "--out", "X.ct"),
                 ("decrypt", "--in", "X.ct", "--out", "X.txt")):
        assert run(*step, cwd=tmp_path).returncode == 0
    got = [complex(*map(float, line.split(",")))
           for line in (tmp_path / "X.txt").read_text().splitlines()]
    assert got == fhefft.fft_clear(x)["spectrum"]
    report = json.loads(run("verify", "--signal", "x.txt", "--spectrum", "X.txt",
                            cwd=tmp_path).stdout)
    assert 1e-6 < report["mean_error"] < 1e-4
