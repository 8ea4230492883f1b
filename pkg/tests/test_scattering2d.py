import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leakywire.scattering2d import (
    amplitudes,
    lineshape_peak,
    pole_coincidence,
    reflectance_grid,
    reflection_continued,
)
from leakywire.resonance2d import find_resonance


def channel(alpha, n):
    edge = 0.25 * alpha**2
    return np.linspace(-edge, 0.0, n + 2)[1:-1]


def test_flux_conservation_on_dense_grid():
    lams = channel(3.0, 200)
    r, t = reflectance_grid(3.0, 0.0, 2.0, lams)
    assert np.max(np.abs(np.abs(r) ** 2 + np.abs(t) ** 2 - 1)) < 1e-10
    assert np.max(np.abs(r.real + np.abs(r) ** 2)) < 1e-12
    assert np.max(np.abs(t - r - 1)) < 1e-15


@settings(max_examples=25, deadline=None)
@given(
    alpha=st.floats(1.0, 5.0),
    beta=st.floats(-1.0, 1.0),
    a=st.floats(0.3, 6.0),
    frac=st.floats(0.02, 0.98),
)
def test_flux_conservation_random_parameters(alpha, beta, a, frac):
    lam = -frac * 0.25 * alpha**2
    amp = amplitudes(alpha, beta, a, lam)
    assert abs(amp.flux_defect) < 1e-10


def test_far_site_is_transparent():
    lams = channel(3.0, 20)
    r, t = reflectance_grid(3.0, 0.0, 50.0, lams)
    assert np.max(np.abs(r)) < 1e-10
    assert np.max(np.abs(t - 1)) < 1e-10


def test_site_mirror_gives_same_amplitudes():
    assert amplitudes(3.0, 0.0, -2.0, -1.0).reflection == amplitudes(3.0, 0.0, 2.0, -1.0).reflection


@pytest.mark.parametrize("lam", [-2.25, -3.0, 0.0, 0.5])
def test_outside_channel_rejected(lam):
    with pytest.raises(ValueError, match="open channel"):
        amplitudes(3.0, 0.0, 2.0, lam)


def test_reflection_has_a_simple_pole_at_the_resonance():
    pc = pole_coincidence(3.0, 0.0, 2.0)
    assert pc.residual <= 1e-10
    assert pc.simple_pole
    assert all(5 < r < 20 for r in pc.ratios)


def test_reflection_is_bounded_away_from_the_pole():
    pole = find_resonance(3.0, 0.0, 2.0).z
    for z in (-0.5 - 0.2j, -2.0 - 0.1j, -1.8 + 0.3j):
        assert abs(z - pole) > 0.1
        assert abs(reflection_continued(3.0, 0.0, 2.0, z)) < 10


def test_lineshape_peak_sits_at_the_pole():
    for a in (2.0, 3.0):
        peak = lineshape_peak(3.0, 0.0, a)
        assert peak.offset < 1.0
        assert peak.reflectance == pytest.approx(1.0, abs=1e-6)
