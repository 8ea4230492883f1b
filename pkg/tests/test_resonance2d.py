import cmath
import math

import numpy as np
import pytest

from leakywire.bs2d import build_d_matrix
from leakywire.quadrature import boundary_limit
from leakywire.resonance2d import (
    PoleSearchError,
    distance_slope_richardson,
    eta,
    eta_distance_break,
    find_complex_root,
    find_resonance,
    find_resonance_coupling_break,
    find_resonance_distance_break,
    g_term,
    mu_density,
    phi_continued,
    phi_physical,
    track_pole,
)
from leakywire.resonance2d import _pair_embedded
from leakywire.specfun import s_beta
from leakywire.system import OmegaMinus, Site, SystemSpec

LADDER = {
    2.0: -1.17526 - 0.02908j,
    3.0: -1.25363 - 0.001479j,
    4.0: -1.26029 - 7.35e-5j,
    5.0: -1.26089 - 3.66e-6j,
}


def test_mu_density_hand_value():
    alpha, a, lam, t = 3.0, 1.0, -1.0, 2.0
    root = math.sqrt(3.0)
    expected = alpha / (16 * math.pi) * (alpha + 2 * root) * math.exp(-2 * root) / (math.sqrt(2.0) * root)
    val = mu_density(lam, t, alpha, a)
    assert val.imag == 0.0
    assert val.real == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(0.0049299638287895, rel=1e-12)


def test_mu_density_rejects_singular_points():
    with pytest.raises(ValueError):
        mu_density(-1.0, 0.0, 3.0, 1.0)
    with pytest.raises(ValueError):
        mu_density(2.0, 2.0, 3.0, 1.0)


@pytest.mark.parametrize("lam", [-2.1, -1.125, -0.3])
def test_edge_of_wedge_matches_boundary_value(lam):
    alpha, a = 3.0, 2.0
    ref = phi_continued(lam, alpha, a)
    steps = [1e-3 / 2**k for k in range(6)]
    for side in (1.0, -1.0):
        lim = boundary_limit(lambda e: phi_continued(complex(lam, side * e), alpha, a), steps)
        assert abs(lim.value - ref) < 1e-7


@pytest.mark.parametrize("lam", [-2.0, -1.0, -0.2])
def test_boundary_imaginary_part_is_the_half_residue(lam):
    alpha, a = 3.0, 2.0
    val = phi_continued(lam, alpha, a)
    expected = alpha / 4 * math.exp(-alpha * a) / math.sqrt(lam + alpha**2 / 4)
    assert val.imag == pytest.approx(expected, rel=1e-12)
    assert g_term(lam, alpha, a) == pytest.approx(1j * expected, rel=1e-12)


def test_physical_sheet_is_schwarz_symmetric():
    z = -0.7 + 0.4j
    up = phi_physical(z, 3.0, 1.5)
    down = phi_physical(z.conjugate(), 3.0, 1.5)
    assert abs(up - down.conjugate()) < 1e-12


def test_physical_sheet_refuses_the_cut():
    with pytest.raises(ValueError):
        phi_physical(-1.0, 3.0, 1.0)


def test_continued_sheet_differs_from_physical_in_lower_half_plane():
    z = -1.0 - 0.3j
    alpha, a = 3.0, 1.0
    jump = phi_continued(z, alpha, a) - phi_physical(z, alpha, a)
    assert jump == pytest.approx(2 * g_term(z, alpha, a), abs=1e-12)


def test_eta_matches_determinant_below_threshold():
    alpha, beta, a = 3.0, 0.0, 1.0
    kappa = 2.0
    spec = SystemSpec(2, alpha, (Site((0.0, a), beta),))
    d = build_d_matrix(spec, kappa)
    assert abs(eta(-kappa**2, alpha, beta, a) - d.entries[0, 0]) < 1e-10


def test_large_imaginary_part_line_term_decays_relative_to_point_term():
    alpha, a = 3.0, 2.0
    ys = [0.5, 2.0, 20.0, 100.0]
    phis = [abs(phi_continued(-1 - 1j * y, alpha, a)) for y in ys]
    points = [abs(s_beta(0.0, -1 - 1j * y)) for y in ys]
    assert all(np.diff(phis) < 0)
    assert all(np.diff(points) > 0)
    ratios = np.array(phis) / np.array(points)
    assert all(np.diff(ratios) < 0)
    assert ratios[-1] < 0.1 * ratios[0]


def test_complex_newton_on_polynomial():
    pole = find_complex_root(lambda z: z * z + 1, 0.5 - 0.8j, tol=1e-14)
    assert abs(pole.z + 1j) < 1e-13
    assert pole.residual <= 1e-14


def test_complex_newton_reports_escape():
    region = OmegaMinus(3.0)
    with pytest.raises(PoleSearchError) as info:
        find_complex_root(lambda z: z - (5.0 - 1.0j), -1.0 - 0.1j, region=region)
    assert info.value.last is not None


@pytest.mark.parametrize("a,expected", sorted(LADDER.items()))
def test_single_site_resonance_ladder(a, expected):
    pole = find_resonance(3.0, 0.0, a)
    assert pole.residual <= 1e-10
    assert pole.nu < 0
    assert abs(pole.mu - expected.real) < 1e-5
    assert pole.nu == pytest.approx(expected.imag, rel=2e-3)


def test_resonance_stable_under_tighter_tolerance(tight_cfg):
    coarse = find_resonance(3.0, 0.0, 3.0)
    fine = find_resonance(3.0, 0.0, 3.0, tol=1e-13, cfg=tight_cfg)
    assert abs(coarse.z - fine.z) < 1e-9


def test_width_shrinks_with_distance():
    widths = [abs(find_resonance(3.0, 0.0, a).nu) for a in sorted(LADDER)]
    assert all(np.diff(widths) < 0)


def test_refuses_default_seed_when_not_embedded():
    with pytest.raises(ValueError, match="embedded"):
        find_resonance(2.0, 0.0, 2.0)


def test_small_distance_pole_leaves_the_strip():
    alpha, beta = 3.0, 0.0
    region = OmegaMinus(alpha)
    ladder = np.arange(2.0, 0.19, -0.05)
    seed = find_resonance(alpha, beta, 2.0).z
    track = track_pole(lambda a, z: eta(z, alpha, beta, a), ladder, seed, region)
    assert track.escaped_at is not None
    assert 0.85 <= track.escaped_at <= 1.0
    widths = [abs(p.nu) for p in track.poles]
    assert widths[-1] > 5 * widths[0]
    assert all(region.contains(p.z) or p.z.imag == 0 for p in track.poles)


def test_coupling_break_expansion_at_small_q():
    check = find_resonance_coupling_break(3.0, 0.0, 1e-3, 1.0)
    assert check.physical
    assert check.measured_linear == pytest.approx(check.predicted_linear, rel=0.05)
    assert check.measured_quadratic == pytest.approx(check.predicted_quadratic, rel=0.05)


def test_coupling_break_expansion_improves_as_q_shrinks():
    errs = []
    for q in (1e-2, 1e-3):
        check = find_resonance_coupling_break(3.0, 0.0, q, 1.0)
        errs.append(abs(check.measured_linear / check.predicted_linear - 1))
    assert errs[1] < errs[0] / 5


def test_coupling_break_rejects_zero_q():
    with pytest.raises(ValueError):
        find_resonance_coupling_break(3.0, 0.0, 0.0, 1.0)


def test_distance_break_determinants_vanish_at_mu2_for_zero_shift():
    alpha, beta, a = 3.0, 0.0, 1.0
    mu2 = -_pair_embedded(alpha, beta, a) ** 2
    for form in ("reduced", "exact"):
        assert abs(eta_distance_break(mu2, alpha, beta, a, 0.0, form)) < 1e-12


def test_distance_break_slope_by_extrapolation():
    slope, ratios = distance_slope_richardson(3.0, 0.0, 1.0)
    predicted = find_resonance_distance_break(3.0, 0.0, 1.0, 1e-2).predicted_linear
    assert slope == pytest.approx(predicted, rel=0.05)
    assert len(ratios) == 3


@pytest.mark.parametrize("delta", [0.1, 0.2, -0.1])
def test_distance_break_exact_determinant_gives_physical_pole(delta):
    check = find_resonance_distance_break(3.0, 0.0, 1.0, delta, form="exact")
    assert check.physical
    assert check.pole.nu < 0


@pytest.mark.parametrize("delta", [0.1, 0.2, -0.1])
def test_distance_break_reduced_determinant_zero_is_above_axis(delta):
    check = find_resonance_distance_break(3.0, 0.0, 1.0, delta)
    assert not check.physical
    assert 0 < check.pole.nu < 1e-2


def test_distance_break_argument_errors():
    with pytest.raises(ValueError):
        find_resonance_distance_break(3.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        find_resonance_distance_break(3.0, 0.0, 1.0, -1.5)
    with pytest.raises(ValueError):
        eta_distance_break(-1.0, 3.0, 0.0, 1.0, 0.1, form="other")


def test_pair_not_embedded_is_refused():
    with pytest.raises(ValueError, match="embedded"):
        find_resonance_coupling_break(1.0, 0.0, 1e-3, 1.0)


def test_second_sheet_values_are_analytic():
    alpha, a = 3.0, 2.0
    z0, r = -1.0 - 0.2j, 0.05
    n = 16
    pts = [z0 + r * cmath.exp(2j * math.pi * k / n) for k in range(n)]
    vals = [phi_continued(z, alpha, a) for z in pts]
    contour = sum(v * (p - z0) for v, p in zip(vals, pts)) * 2j * math.pi / n
    assert abs(contour) < 1e-9
    mean = sum(vals) / n
    assert abs(mean - phi_continued(z0, alpha, a)) < 1e-9
