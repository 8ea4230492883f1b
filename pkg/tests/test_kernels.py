import os
import subprocess
import sys

import numpy as np
import pytest

from leakywire import _kernels_py as py_kernels
from leakywire import kernels

c_kernels = pytest.importorskip("leakywire._kernels", reason="compiled kernels not built")


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def test_backends_agree_on_bessel(rng):
    x = rng.uniform(0.01, 60, 3000) * np.exp(1j * rng.uniform(-1.57, 1.57, 3000))
    a0, a1 = c_kernels.bessel_k01(x)
    b0, b1 = py_kernels.bessel_k01(x)
    assert np.max(np.abs(a0 - b0) / np.abs(b0)) < 1e-14
    assert np.max(np.abs(a1 - b1) / np.abs(b1)) < 1e-14


def test_backends_agree_on_line_integrand():
    p = np.linspace(0, 40, 1001)
    for shift in (0.0, 1.3):
        a = c_kernels.line_integrand(p, 3.0, 4.0, 1.5000001, shift)
        b = py_kernels.line_integrand(p, 3.0, 4.0, 1.5000001, shift)
        assert np.allclose(a, b, rtol=1e-14, atol=0)


def test_backends_agree_on_continued_integrand():
    p = np.linspace(0, 20, 1001)
    z = -1.17 - 0.029j
    tstar = z + 2.25
    a = c_kernels.continued_integrand(p, z, 3.0, 2.0, tstar, 0.01 + 0.02j)
    b = py_kernels.continued_integrand(p, z, 3.0, 2.0, tstar, 0.01 + 0.02j)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def test_shapes_preserved():
    x = np.full((3, 4), 1.5 + 0.5j)
    k0, k1 = c_kernels.bessel_k01(x)
    assert k0.shape == (3, 4) and k1.shape == (3, 4)
    assert c_kernels.line_integrand(2.0, 3.0, 1.0, 2.0, 0.0).shape == ()


def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "cython"


def test_environment_forces_python_backend():
    env = dict(os.environ, LEAKYWIRE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import leakywire.kernels as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_pole_identical_with_either_backend():
    code = "from leakywire.resonance2d import find_resonance; print(repr(find_resonance(3, 0, 3).z))"
    vals = []
    for flag in ("0", "1"):
        env = dict(os.environ, LEAKYWIRE_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        vals.append(complex(out.stdout.strip()))
    assert abs(vals[0] - vals[1]) < 1e-12
