import math

import numpy as np
import pytest

from leakywire.bs3d import (
    build_d_matrix_3d,
    eta_3d,
    find_eigenvalues_3d,
    find_resonance_3d,
    large_distance_limit,
    phi_plane,
    phi_plane_continued,
    phi_plane_interval_quadrature,
    plane_half_residue,
    plane_jump_check,
    theta_pair_3d,
)
from leakywire.quadrature import boundary_limit
from leakywire.resonance2d import track_pole
from leakywire.system import OmegaMinus, Site, SystemSpec


@pytest.mark.parametrize("alpha,a,kappa", [(3.0, 1.0, 2.0), (3.0, 0.1, 1.6), (2.0, 2.0, 1.01)])
def test_plane_routes_agree(alpha, a, kappa):
    v1 = phi_plane(alpha, a, kappa)
    v2 = phi_plane(alpha, a, kappa, "radial")
    assert abs(v1 - v2) < 1e-11 * max(1.0, abs(v1))


def test_plane_argument_errors():
    with pytest.raises(ValueError):
        phi_plane(3.0, 1.0, 1.5)
    with pytest.raises(ValueError):
        phi_plane(3.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        phi_plane(3.0, 1.0, 2.0, route="other")


def test_plane_coupling_vanishes_far_away():
    assert phi_plane(3.0, 40.0, 2.0) < 1e-12


def test_pair_coupling_reduces_to_single_site():
    s = Site((0.0, 0.0, 1.5), -0.1)
    assert theta_pair_3d(3.0, s, s, 2.0) == phi_plane(3.0, 1.5, 2.0)


def test_pair_coupling_decreases_with_planar_separation():
    vals = [
        theta_pair_3d(3.0, Site((0.0, 0.0, 1.0), 0.0), Site((rho, 0.0, 1.0), 0.0), 2.0)
        for rho in (0.5, 1.0, 2.0, 4.0)
    ]
    assert all(np.diff(vals) < 0)
    assert vals[0] < phi_plane(3.0, 1.0, 2.0)


def test_d_matrix_is_symmetric():
    spec = SystemSpec(3, 3.0, (Site((0.0, 0.0, 1.0), -0.1), Site((1.0, 0.5, 2.0), 0.2)))
    m = build_d_matrix_3d(spec, 2.0).entries
    assert np.array_equal(m, m.T)
    with pytest.raises(ValueError):
        build_d_matrix_3d(SystemSpec.single(3.0, 0.0, 1.0), 2.0)


@pytest.mark.parametrize("rho", [0.0, 0.5, 2.0])
def test_plane_boundary_condition(rho):
    jump, expected = plane_jump_check(3.0, 1.0, 2.0, rho)
    assert abs(jump - expected) < 1e-10 * max(1.0, abs(expected))


def test_binding_energy_grows_as_site_approaches_plane():
    kappas = [find_eigenvalues_3d(SystemSpec.single(3.0, -0.1, a, 3)).kappas[0] for a in (1.0, 0.3, 0.1, 1e-2, 1e-3)]
    assert all(np.diff(kappas) > 0)
    assert all(k > 1.5 for k in kappas)


@pytest.mark.parametrize("beta", [-0.1, -0.5])
def test_large_distance_limit(beta):
    root = find_eigenvalues_3d(SystemSpec.single(3.0, beta, 30.0, 3)).roots[0]
    k = root.bracket[1] if root.near_threshold else root.kappa
    assert abs(k - large_distance_limit(3.0, beta)) < 1e-2


def test_large_distance_limit_needs_attractive_site():
    with pytest.raises(ValueError):
        large_distance_limit(3.0, 0.2)


def test_repulsive_site_still_binds_below_plane_threshold():
    res = find_eigenvalues_3d(SystemSpec.single(2.0, 0.5, 0.3, 3))
    assert len(res.roots) == 1
    assert not res.roots[0].near_threshold
    assert -1.0 - 1e-4 < res.energies[0] < -1.0


def test_energies_lie_below_threshold():
    res = find_eigenvalues_3d(SystemSpec.single(3.0, -0.1, 1.0, 3))
    assert all(e < -2.25 for e in res.energies)


@pytest.mark.parametrize("lam", [-2.0, -1.0, -0.1])
def test_interval_value_closed_form_vs_quadrature(lam):
    closed = phi_plane_continued(lam, 3.0, 2.0)
    quad = phi_plane_interval_quadrature(lam, 3.0, 2.0)
    assert abs(closed - quad) < 1e-8


def test_interval_imaginary_part_is_constant():
    vals = [phi_plane_continued(lam, 3.0, 2.0).imag for lam in np.linspace(-2.2, -0.05, 9)]
    assert np.ptp(vals) == 0.0
    assert vals[0] == pytest.approx(3.0 / 8 * math.exp(-6.0), rel=1e-15)
    assert vals[0] == plane_half_residue(3.0, 2.0)


@pytest.mark.parametrize("lam", [-2.0, -0.5])
def test_plane_edge_of_wedge(lam):
    ref = phi_plane_continued(lam, 3.0, 2.0)
    steps = [1e-3 / 2**k for k in range(6)]
    for side in (1.0, -1.0):
        lim = boundary_limit(lambda e: phi_plane_continued(complex(lam, side * e), 3.0, 2.0), steps)
        assert abs(lim.value - ref) < 1e-8


def test_resonance_ladder_3d():
    poles = [find_resonance_3d(3.0, -0.1, a) for a in (2.0, 3.0, 4.0)]
    widths = [abs(p.nu) for p in poles]
    assert all(p.nu < 0 for p in poles)
    assert all(p.residual <= 1e-10 for p in poles)
    assert all(np.diff(widths) < 0)
    assert all(abs(eta_3d(p.z, 3.0, -0.1, a)) < 1e-9 for p, a in zip(poles, (2.0, 3.0, 4.0)))


def test_resonance_3d_seeding_rules():
    with pytest.raises(ValueError):
        find_resonance_3d(3.0, 0.1, 2.0)
    with pytest.raises(ValueError, match="embedded"):
        find_resonance_3d(3.0, -0.5, 2.0)


def test_small_distance_pole_leaves_the_strip_3d():
    alpha, beta = 3.0, -0.1
    seed = find_resonance_3d(alpha, beta, 2.0).z
    track = track_pole(
        lambda a, z: eta_3d(z, alpha, beta, a), np.arange(2.0, 0.09, -0.05), seed, OmegaMinus(alpha)
    )
    assert track.escaped_at is not None
    assert 0.8 <= track.escaped_at <= 1.0
    assert abs(track.poles[-1].nu) > 10 * abs(track.poles[0].nu)
