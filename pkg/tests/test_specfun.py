import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from leakywire.specfun import (
    EULER_GAMMA,
    macdonald_k0,
    macdonald_k1,
    point_only_eigenvalue,
    s_beta,
    s_beta_real,
    s_beta_root,
    sqrt_cut_positive,
)


def test_k0_at_one_matches_integral_representation():
    # K0(x) = int_0^inf exp(-x cosh t) dt
    ref, _ = integrate.quad(lambda t: math.exp(-math.cosh(t)), 0, 30, epsabs=1e-15, epsrel=1e-13, limit=200)
    assert abs(macdonald_k0(1.0) - 0.42102443824070834) < 1e-15
    assert abs(macdonald_k0(1.0) - ref) < 1e-14


@pytest.mark.parametrize("x", [1e-3, 1e-6, 1e-9])
def test_k0_small_argument_log_behaviour(x):
    assert abs(macdonald_k0(x) + math.log(x / 2) + EULER_GAMMA) < 10 * x * x * (1 - math.log(x)) + 1e-14


def test_k0_large_argument_asymptotic():
    x = 50.0
    assert abs((macdonald_k0(x) * math.exp(x) * math.sqrt(2 * x / math.pi)).real - 1) < 3e-3
    # Hankel series 1 - 1/(8x) + 9/(2(8x)^2) - 225/(6(8x)^3) + ...
    hankel = 1 - 1 / 400 + 9 / (2 * 400**2) - 225 / (6 * 400**3) + 11025 / (24 * 400**4)
    assert abs((macdonald_k0(x) * math.exp(x) * math.sqrt(2 * x / math.pi)).real - hankel) < 1e-8


@pytest.mark.parametrize("r", [0.01, 0.5, 1.9, 2.1, 5.0, 12.0, 24.9, 25.1, 60.0])
@pytest.mark.parametrize("angle", [0.0, 0.7, -1.3, 1.5707, 2.2, -2.9])
def test_k0_k1_against_mpmath(r, angle):
    x = r * np.exp(1j * angle)
    k0 = complex(mpmath.besselk(0, x))
    k1 = complex(mpmath.besselk(1, x))
    assert abs(macdonald_k0(x) - k0) <= 1e-13 * abs(k0)
    assert abs(macdonald_k1(x) - k1) <= 1e-13 * abs(k1)


def test_k0_vectorized_matches_scalar():
    xs = np.array([0.3, 2.5 + 1j, 30 - 2j, -3 + 0.5j])
    vals = macdonald_k0(xs)
    assert vals.shape == xs.shape
    for x, v in zip(xs, vals):
        assert v == macdonald_k0(x)
    assert np.allclose(vals, special.kv(0, xs), rtol=1e-13)


@pytest.mark.parametrize("bad", [0.0, -1.0, -2.5 + 0j])
def test_k0_rejects_cut(bad):
    with pytest.raises(ValueError):
        macdonald_k0(bad)


def test_k0_rejects_underflowing_argument():
    with pytest.raises(OverflowError):
        macdonald_k0(1e-301)


@given(st.floats(min_value=1e-8, max_value=1e4))
def test_branch_consistency_on_negative_axis(kappa):
    assert sqrt_cut_positive(-kappa * kappa) == pytest.approx(1j * kappa, rel=1e-15)


@given(st.floats(-3, 3), st.floats(1e-3, 50))
@settings(max_examples=50)
def test_s_beta_real_on_negative_axis(beta, kappa):
    val = s_beta(beta, -kappa * kappa)
    assert abs(val.imag) < 1e-15
    assert val.real == pytest.approx(s_beta_real(beta, kappa), rel=1e-12, abs=1e-14)


def test_s_beta_zero_and_shift():
    k = 2 * math.exp(-EULER_GAMMA)
    assert abs(s_beta_real(0.0, k)) < 1e-16
    assert s_beta_real(0.7, k) == pytest.approx(0.7, abs=1e-15)
    assert s_beta_root(0.0) == pytest.approx(1.1229189671, abs=1e-10)


def test_s_beta_strictly_increasing():
    ks = np.geomspace(1e-3, 1e3, 200)
    vals = [s_beta_real(-0.3, k) for k in ks]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("beta", [-1, -0.5, 0, 0.5, 1])
def test_point_only_eigenvalue_2d_is_root(beta):
    eps = point_only_eigenvalue(beta, 2)
    assert abs(s_beta_real(beta, math.sqrt(-eps))) < 1e-12


def test_point_only_eigenvalue_2d_beta_zero_value():
    # -4 exp(2 psi(1)) with psi(1) = -gamma
    assert point_only_eigenvalue(0.0, 2) == pytest.approx(-4 * math.exp(-2 * EULER_GAMMA), rel=1e-15)
    assert point_only_eigenvalue(0.0, 2) == pytest.approx(-1.2609470067, abs=1e-10)


def test_point_only_eigenvalue_3d():
    assert point_only_eigenvalue(-0.1, 3) == pytest.approx(-(0.4 * math.pi) ** 2, rel=1e-15)
    assert point_only_eigenvalue(-0.1, 3) == pytest.approx(-1.5791367, abs=1e-7)
    assert point_only_eigenvalue(0.5, 3) is None
