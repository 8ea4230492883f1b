"""Plane plus points in three dimensions.

With ``u = sqrt(p**2 + kappa**2)`` and ``p`` the planar momentum, the
plane-mediated coupling of two sites is

    Theta_jk = alpha/4pi * int_0^inf p J0(p rho) exp(-u(|a_j|+|a_k|))
                                      / ((2u - alpha) u) dp,

where ``rho`` is the planar separation. For one site (``rho = 0``) the
substitution ``u`` turns it into an exponential integral:

    phi_plane(a, kappa) = alpha/4pi * int_kappa^inf exp(-2ua)/(2u - alpha) du
                        = alpha/8pi * exp(-alpha a) E1(a (2 kappa - alpha)).

The point term is ``beta + sqrt(-z)/4pi`` (``beta + kappa/4pi`` below the
threshold); off-diagonal free couplings are ``-exp(-kappa d)/(4 pi d)``.

Continuation in ``z``: with ``w = a(2 sqrt(-z) - alpha)`` the upper sheet
uses the principal ``E1(w)`` (``Im w < 0`` there); on the interval
``(-alpha**2/4, 0)`` the boundary value is ``E1(w - i0)``, with imaginary
part ``pi``, so ``Im phi0 = (alpha/8) exp(-alpha a)`` for every ``lambda``;
on the second sheet ``w`` has ``Im w > 0`` and the continued function is
``E1(w) + 2 pi i``.
"""

import cmath
import math

import numpy as np
from scipy.special import exp1, j0

from .bs2d import ConvergenceError, DMatrix
from .quadrature import DEFAULT_CONFIG, integrate_halfline, principal_value
from .resonance2d import Pole, find_complex_root
from .roots import SpectralResult, find_matrix_roots
from .system import OmegaMinus, Sheet, SheetPoint


def _check_kappa(alpha, kappa):
    if not kappa > 0.5 * alpha:
        raise ValueError(f"kappa = {kappa!r} must exceed alpha/2 = {0.5 * alpha!r}")


def _plane_radial(alpha, depth, kappa, rho, cfg):
    def f(p):
        u = np.sqrt(p * p + kappa * kappa)
        gap = (4.0 * p * p + (2.0 * kappa - alpha) * (2.0 * kappa + alpha)) / (2.0 * u + alpha)
        out = p * np.exp(-u * depth) / (gap * u)
        if rho:
            out = out * j0(p * rho)
        return out

    width = math.sqrt(kappa * (2.0 * kappa - alpha))
    res = integrate_halfline(f, 0.0, cfg, scale=max(min(1.0, 1.0 / depth, width), 1e-12))
    if not res.converged:
        raise ConvergenceError(f"plane coupling: quadrature did not converge (error {res.error_estimate:.3g})")
    return alpha / (4.0 * math.pi) * float(res.value.real)


def phi_plane(alpha, a, kappa, route="substitution", cfg=DEFAULT_CONFIG):
    """Plane-coupling function of one site at distance ``a`` from the plane.

    Parameters
    ----------
    alpha, a : float
    kappa : float
        ``> alpha/2``.
    route : {"substitution", "radial"}
        Closed form through ``E1`` or direct quadrature over the planar momentum.

    Returns
    -------
    float
    """
    _check_kappa(alpha, kappa)
    if a <= 0:
        raise ValueError("a must be positive")
    if route == "substitution":
        return alpha / (8.0 * math.pi) * math.exp(-alpha * a) * float(exp1(a * (2.0 * kappa - alpha)))
    if route == "radial":
        return _plane_radial(alpha, 2.0 * a, kappa, 0.0, cfg)
    raise ValueError("route must be 'substitution' or 'radial'")


def theta_pair_3d(alpha, site_j, site_k, kappa, cfg=DEFAULT_CONFIG):
    """Plane-mediated coupling of two sites; equals ``phi_plane`` at coincident projections."""
    _check_kappa(alpha, kappa)
    rho = float(np.hypot(*(np.subtract(site_j.along, site_k.along))))
    if rho == 0 and site_j.depth == site_k.depth:
        return phi_plane(alpha, site_j.depth, kappa)
    if rho == 0:
        mean = 0.5 * (site_j.depth + site_k.depth)
        return alpha / (8.0 * math.pi) * math.exp(-alpha * mean) * float(exp1(mean * (2.0 * kappa - alpha)))
    return _plane_radial(alpha, site_j.depth + site_k.depth, kappa, rho, cfg)


def build_d_matrix_3d(spec, kappa, cfg=DEFAULT_CONFIG):
    """Assemble the real symmetric ``D3(kappa)``."""
    if spec.dimension != 3:
        raise ValueError("build_d_matrix_3d needs a 3D system")
    _check_kappa(spec.alpha, kappa)
    n = spec.n
    m = np.zeros((n, n))
    for j in range(n):
        for k in range(j, n):
            sj, sk = spec.sites[j], spec.sites[k]
            theta = theta_pair_3d(spec.alpha, sj, sk, kappa, cfg)
            if j == k:
                val = sj.beta + kappa / (4.0 * math.pi) - theta
            else:
                d = spec.distance(j, k)
                val = -math.exp(-kappa * d) / (4.0 * math.pi * d) - theta
            m[j, k] = m[k, j] = val
    return DMatrix(float(kappa), m, np.zeros((n, n)))


def reduced_determinant_3d(spec, kappa, cfg=DEFAULT_CONFIG):
    return float(np.linalg.det(build_d_matrix_3d(spec, kappa, cfg).entries))


def find_eigenvalues_3d(spec, tol=1e-10, cfg=DEFAULT_CONFIG, kappa_max=None):
    """Discrete spectrum below ``-alpha**2/4`` for a 3D system.

    Returns
    -------
    SpectralResult
    """
    thr = 0.5 * spec.alpha
    if kappa_max is None:
        kappa_max = max(2.0 * thr, 4.0 * math.pi * (1.0 + max(-b for b in spec.betas)) + 1.0)

    def matrix_fn(k):
        return build_d_matrix_3d(spec, k, cfg).entries

    roots = find_matrix_roots(matrix_fn, thr, kappa_max, spec.n, tol)
    return SpectralResult(roots, [-r.kappa**2 for r in roots], [], (1, spec.n))


def large_distance_limit(alpha, beta):
    """``lim_{a -> inf} kappa_a`` for one site (``beta < 0`` cases only).

    ``4 pi |beta|`` when the point level ``-(4 pi beta)**2`` lies below the
    threshold ``-alpha**2/4``; otherwise the threshold value ``alpha/2``.
    """
    if beta >= 0:
        raise ValueError("the large-distance limit is asserted for beta < 0 only")
    sigma = 4.0 * math.pi * abs(beta)
    return sigma if sigma > 0.5 * alpha else 0.5 * alpha


def plane_jump_check(alpha, a, kappa, rho, cfg=DEFAULT_CONFIG):
    """Boundary condition of the plane-perturbed Green function.

    For a source at height ``a`` the field ``G = exp(-kappa r)/(4 pi r) + C``,
    with ``C`` the plane correction, must satisfy
    ``d3 G(0+) - d3 G(0-) = -alpha G(0)`` at planar distance ``rho``. The
    free part is evaluated in closed form and its normal derivative is
    continuous, so the jump comes from ``C`` alone.

    Returns
    -------
    tuple of float
        ``(jump, -alpha * trace)``.
    """
    _check_kappa(alpha, kappa)

    def corr(p):
        u = np.sqrt(p * p + kappa * kappa)
        return p * j0(p * rho) * alpha * np.exp(-u * a) / (2.0 * u * (2.0 * u - alpha))

    def jump_density(p):
        u = np.sqrt(p * p + kappa * kappa)
        return -p * j0(p * rho) * alpha * np.exp(-u * a) / (2.0 * u - alpha)

    scale = max(min(1.0, 1.0 / a), 1e-12)
    c = integrate_halfline(corr, 0.0, cfg, scale=scale).value.real / (2.0 * math.pi)
    jump = integrate_halfline(jump_density, 0.0, cfg, scale=scale).value.real / (2.0 * math.pi)
    r = math.hypot(rho, a)
    trace = math.exp(-kappa * r) / (4.0 * math.pi * r) + c
    return float(jump), float(-alpha * trace)


# --------------------------------------------------------------------------
# Continuation across (-alpha**2/4, 0)


def _sheet_point(z, alpha):
    if isinstance(z, SheetPoint):
        z.validate(alpha)
        return z
    return SheetPoint.classify(z, alpha)


def plane_half_residue(alpha, a):
    """``Im phi0 = (alpha/8) exp(-alpha a)`` on the whole open interval."""
    return 0.125 * alpha * math.exp(-alpha * a)


def phi_plane_continued(z, alpha, a):
    """``phi_plane`` continued from the upper half-plane across the interval."""
    sp = _sheet_point(z, alpha)
    zz = sp.z
    pre = alpha / (8.0 * math.pi) * math.exp(-alpha * a)
    w = a * (2.0 * cmath.sqrt(-zz) - alpha)
    if sp.sheet is Sheet.INTERVAL:
        # E1(x - i0) for x < 0 is -Ei(-x) + i pi.
        return complex(pre * float(exp1(w.real + 0j).real), plane_half_residue(alpha, a))
    if sp.sheet is Sheet.UPPER:
        if zz.imag == 0:
            return complex(pre * float(exp1(w.real)), 0.0)
        return complex(pre * exp1(w))
    return complex(pre * (exp1(w) + 2j * math.pi))


def phi_plane_interval_quadrature(lam, alpha, a, cfg=DEFAULT_CONFIG):
    """Independent boundary value on the interval: P.V. integral plus half residue.

    ``alpha/4pi [P.V. int_{k0}^inf exp(-2ua)/(2u - alpha) du] + i (alpha/8) exp(-alpha a)``
    with ``k0 = sqrt(-lam) < alpha/2``.
    """
    k0 = math.sqrt(-lam)
    half = 0.5 * alpha
    pv = principal_value(
        lambda u: np.exp(-2.0 * u * a) / (2.0 * u - alpha), half, k0, np.inf, cfg, scale=min(1.0, 0.5 / a)
    )
    if not pv.converged:
        raise ConvergenceError("principal value did not converge")
    re = alpha / (4.0 * math.pi) * float(np.real(pv.value))
    return complex(re, plane_half_residue(alpha, a))


def eta_3d(z, alpha, beta, a):
    """``beta + sqrt(-z)/4pi - phi_plane(z)`` on the continuation domain."""
    zz = z.z if isinstance(z, SheetPoint) else complex(z)
    return beta + cmath.sqrt(-zz) / (4.0 * math.pi) - phi_plane_continued(z, alpha, a)


def find_resonance_3d(alpha, beta, a, seed=None, tol=1e-10, region=None):
    """Second-sheet resonance of one site near the plane.

    Requires ``beta < 0`` and ``-(4 pi beta)**2 > -alpha**2/4`` for the
    automatic seed at the point level.

    Returns
    -------
    Pole
    """
    region = region or OmegaMinus(alpha)
    if seed is None:
        if not beta < 0:
            raise ValueError("automatic seeding needs beta < 0")
        eps = -((4.0 * math.pi * beta) ** 2)
        if not eps > -0.25 * alpha**2:
            raise ValueError("the point level is not embedded in (-alpha**2/4, 0); supply a seed")
        seed = complex(eps, -1e-9 * abs(eps))
    pole = find_complex_root(lambda z: eta_3d(z, alpha, beta, a), seed, tol, region)
    if pole.z.imag > 1e-13 * max(1.0, abs(pole.z)):
        raise RuntimeError(f"pole {pole.z} has positive imaginary part")
    return pole


__all__ = [
    "phi_plane",
    "theta_pair_3d",
    "build_d_matrix_3d",
    "reduced_determinant_3d",
    "find_eigenvalues_3d",
    "large_distance_limit",
    "plane_jump_check",
    "plane_half_residue",
    "phi_plane_continued",
    "phi_plane_interval_quadrature",
    "eta_3d",
    "find_resonance_3d",
    "Pole",
]
