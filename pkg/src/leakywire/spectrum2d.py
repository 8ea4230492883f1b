"""Discrete and embedded spectrum of a line plus points in the plane.

Eigenfunction of a single site
------------------------------
For one site ``y = (l, a)`` and a root ``kappa`` the eigenfunction is the
line-perturbed Green function at ``y``:

    psi(x) = K0(kappa |x - y|) / 2pi
             + alpha/4pi int_R exp(-u(|a| + |x2|)) cos(p(x1 - l))
                              / ((2u - alpha) u) dp.

This is obtained from the two-dimensional momentum integral

    alpha/4pi**2 int int cos(p1 x1) cos(p2 x2) exp(-u|a|)
                         / ((2u - alpha)(p1**2 + p2**2 + kappa**2)) dp1 dp2

by doing the ``p2`` integral in closed form (residue at ``p2 = i u``,
giving ``pi exp(-u|x2|)/u``). :func:`validate_reduction` checks the
single-integral form against the iterated 2D quadrature.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate as sp_integrate
from scipy.optimize import brentq

from .bs2d import DEFAULT_CONFIG, build_d_matrix, line_integral, pair_kernel, phi_line
from .roots import SpectralResult, find_matrix_roots
from .specfun import macdonald_k0, point_only_eigenvalue, s_beta_real, s_beta_root
from .system import SystemSpec


class ReductionMismatchError(RuntimeError):
    """Single-integral eigenfunction disagrees with the 2D quadrature."""


def default_kappa_max(betas):
    """Four times the ``kappa`` where the smallest ``š_beta`` reaches 1."""
    return 4.0 * s_beta_root(min(betas) - 1.0)


def find_eigenvalues(spec, tol=1e-10, cfg=DEFAULT_CONFIG, kappa_max=None):
    """Isolated eigenvalues ``-kappa**2 < -alpha**2/4`` of a 2D system.

    Parameters
    ----------
    spec : SystemSpec
        Two-dimensional system.
    tol : float
        Residual target for ``|det D|``.
    cfg : QuadratureConfig
    kappa_max : float, optional
        Scan upper end; defaults to :func:`default_kappa_max`.

    Returns
    -------
    SpectralResult

    Raises
    ------
    RootCountError
        If fewer than 1 or more than ``n`` roots are found.
    """
    if spec.dimension != 2:
        raise ValueError("find_eigenvalues handles dimension 2")
    thr = 0.5 * spec.alpha
    if kappa_max is None:
        kappa_max = default_kappa_max(spec.betas)
    kappa_max = max(kappa_max, 4.0 * thr)
    roots = find_matrix_roots(lambda k: build_d_matrix(spec, k, cfg).entries, thr, kappa_max, spec.n, tol)
    energies = [-r.kappa**2 for r in roots]
    embedded = []
    mirror = _mirror_parameters(spec)
    if mirror is not None:
        k2 = antisymmetric_root(*mirror)
        if k2 is not None and -k2 * k2 > -thr * thr:
            embedded.append({"energy": -k2 * k2, "kappa": k2, "source": "antisymmetric mirror-pair level"})
    return SpectralResult(roots, energies, embedded, (1, spec.n))


def _mirror_parameters(spec):
    """``(beta, a)`` if the sites are mirror images across the line with equal couplings."""
    if spec.n != 2:
        return None
    s1, s2 = spec.sites
    if s1.along == s2.along and s1.position[-1] == -s2.position[-1] and s1.beta == s2.beta:
        return s1.beta, s1.depth
    return None


def _reduced_single(spec):
    if spec.dimension != 2 or spec.n != 1:
        raise ValueError("expected a single site in 2D")
    return spec.sites[0]


def single_root(alpha, beta, a, tol=1e-10, cfg=DEFAULT_CONFIG):
    """The unique ``kappa_a`` for one site at distance ``a``."""
    res = find_eigenvalues(SystemSpec.single(alpha, beta, a), tol, cfg)
    return res.roots[0]


def phi_line_contact(alpha, kappa):
    """Line-coupling function for a site on the line (``a = 0``), closed form.

    ``alpha/2pi int_0^inf dp / ((2u - alpha) u) = alpha/2pi * int_0^inf dt / (2 kappa cosh t - alpha)``
    ``= alpha/pi * arctan(sqrt((2kappa+alpha)/(2kappa-alpha))) / sqrt(4kappa**2 - alpha**2)``.
    """
    if not kappa > 0.5 * alpha:
        raise ValueError("kappa must exceed alpha/2")
    root = math.sqrt((2 * kappa - alpha) * (2 * kappa + alpha))
    return alpha / math.pi * math.atan(math.sqrt((2 * kappa + alpha) / (2 * kappa - alpha))) / root


@dataclass(frozen=True)
class SinglePointAsymptotics:
    """Large-distance limit and the ``a -> 0`` upper bound of ``kappa_a``."""

    limit_kappa_infinity: float
    kappa_zero_upper_bound: float


def single_point_asymptotics(alpha, beta):
    """Limits of the single-site root ``kappa_a``.

    ``limit_kappa_infinity = max(sqrt(-eps_beta), alpha/2)``; the upper
    bound ``kappa_0`` solves ``š_beta(kappa) = phi_0(kappa)`` with the
    contact value :func:`phi_line_contact`.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    limit = max(math.sqrt(-point_only_eigenvalue(beta, 2)), 0.5 * alpha)
    thr = 0.5 * alpha

    def f(k):
        return s_beta_real(beta, k) - phi_line_contact(alpha, k)

    lo = thr * (1 + 1e-12)
    hi = max(2 * thr, s_beta_root(beta)) * 2
    while f(hi) < 0:
        hi *= 2
    k0 = brentq(f, lo, hi, xtol=1e-15 * hi)
    return SinglePointAsymptotics(limit, k0)


@dataclass(frozen=True)
class PairSpectrum:
    """Spectrum of the mirror-symmetric pair ``(0, a)``, ``(0, -a)``.

    Attributes
    ----------
    isolated : list of float
        Isolated energies below ``-alpha**2/4``, increasing.
    embedded : float or None
        ``mu2`` when it lies in ``(-alpha**2/4, 0)``.
    pair_levels : tuple
        ``(mu1, mu2)``, the two levels of the points without the line;
        ``mu2`` is None if the antisymmetric level does not exist.
    kappa2 : float or None
        ``sqrt(-mu2)``.
    symmetric_root : float
        The ``kappa`` root of ``š - K - 2 phi``.
    """

    isolated: list
    embedded: object
    pair_levels: tuple
    kappa2: object
    symmetric_root: float


def antisymmetric_root(beta, a):
    """``kappa_2`` solving ``š_beta(kappa) + K0(2 a kappa)/2pi = 0``, or None.

    The left side increases from ``beta - ln(2a)/2pi`` at ``kappa -> 0`` to
    infinity, so a root exists iff ``beta < ln(2a)/2pi``; it lies below the
    zero of ``š_beta``.
    """
    if beta - math.log(2 * a) / (2 * math.pi) >= 0:
        return None
    hi = s_beta_root(beta)

    def f(k):
        return s_beta_real(beta, k) + pair_kernel(k, 2 * a)

    lo = hi * 0.5
    while f(lo) > 0:
        lo *= 0.5
    return brentq(f, lo, hi, xtol=4e-16 * hi)


def symmetric_point_root(beta, a):
    """``kappa_1`` solving ``š_beta(kappa) - K0(2 a kappa)/2pi = 0``."""
    lo = s_beta_root(beta)

    def f(k):
        return s_beta_real(beta, k) - pair_kernel(k, 2 * a)

    hi = 2 * lo
    while f(hi) < 0:
        hi *= 2
    return brentq(f, lo, hi, xtol=4e-16 * hi)


def symmetric_pair_spectrum(alpha, beta, a, cfg=DEFAULT_CONFIG):
    """Levels of two equal points mirrored in the line.

    The determinant factorises into ``(š + K)(š - K - 2 phi)``. The first
    factor does not involve the line: its root ``mu2`` is an eigenvalue
    for every ``alpha`` (the antisymmetric state does not feel the line),
    embedded when ``-alpha**2/4 < mu2 < 0``. The second factor has exactly
    one root in ``(alpha/2, inf)``.

    Raises
    ------
    AssertionError
        If the bracketing ``mu1 < eps_beta < mu2`` fails.
    """
    thr = 0.5 * alpha
    k1 = symmetric_point_root(beta, a)
    k2 = antisymmetric_root(beta, a)
    mu1 = -k1 * k1
    mu2 = None if k2 is None else -k2 * k2
    eps = point_only_eigenvalue(beta, 2)
    if not (mu1 < eps and (mu2 is None or eps < mu2)):
        raise AssertionError("pair levels violate mu1 < eps_beta < mu2")

    def g(k):
        s = s_beta_real(beta, k)
        return s - pair_kernel(k, 2 * a) - 2.0 * phi_line(alpha, a, k, cfg)

    roots = find_matrix_roots(lambda k: np.array([[g(k)]]), thr, max(4 * thr, 4 * k1, default_kappa_max([beta])), 1)
    ks = roots[0].kappa
    isolated = [-ks * ks]
    embedded = None
    if mu2 is not None:
        if mu2 < -thr * thr:
            isolated.append(mu2)
        elif mu2 > -thr * thr:
            embedded = mu2
    return PairSpectrum(sorted(isolated), embedded, (mu1, mu2), k2, ks)


# --------------------------------------------------------------------------
# Eigenfunction (single site)


@dataclass(frozen=True)
class EigenfunctionSample:
    """Eigenfunction value at a point plus boundary functionals.

    ``boundary_diagnostics`` holds ``Xi_point``, ``Omega_point`` (at the
    site), ``Xi_line``, ``Omega_line`` (at the projection of ``point`` on
    the line) and the relative residuals of both boundary conditions.
    """

    point: tuple
    value: complex
    boundary_diagnostics: dict


def _line_term(alpha, a, kappa, x1, x2, cfg):
    res = line_integral(alpha, abs(a) + abs(x2), kappa, x1, cfg)
    return res.value.real


def eigenfunction_value(spec, kappa, point, cfg=DEFAULT_CONFIG):
    """Unnormalised single-site eigenfunction at ``point`` (single integral)."""
    site = _reduced_single(spec)
    l, a = site.position
    x1 = point[0] - l
    x2 = point[1]
    r = math.hypot(x1, x2 - a)
    free = macdonald_k0(kappa * r).real / (2 * math.pi) if r > 0 else math.inf
    return free + _line_term(spec.alpha, a, kappa, x1, x2, cfg)


def eigenfunction_2d_quadrature(spec, kappa, point):
    """Line term of the eigenfunction by iterated 2D quadrature (oracle).

    Uses scipy's QUADPACK Fourier rule (cosine weight) in both momentum
    variables, independent of the closed-form ``p2`` integration.
    QUADPACK's accuracy warnings on the slowly converging Fourier tails
    are silenced; the comparison in :func:`validate_reduction` is the
    accuracy check.
    """
    site = _reduced_single(spec)
    alpha = spec.alpha
    l, a = site.position
    a = abs(a)
    x1 = point[0] - l
    x2 = abs(point[1])

    def inner(p1):
        u = math.sqrt(p1 * p1 + kappa * kappa)
        amp = math.exp(-u * a) / (2 * u - alpha)

        def h(p2):
            return 1.0 / (p1 * p1 + p2 * p2 + kappa * kappa)

        if x2 == 0:
            val, _ = sp_integrate.quad(h, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
        else:
            val, _ = sp_integrate.quad(h, 0, np.inf, weight="cos", wvar=x2, epsabs=1e-14, limlst=100)
        return 2.0 * amp * val

    # Near threshold the p1 integrand is a narrow peak at 0 of this width;
    # resolve it on finite pieces before handing the tail to the Fourier rule.
    width = math.sqrt(kappa * max(2 * kappa - alpha, 1e-300))
    edges = [0.0, 0.5 * width, 2 * width, 8 * width + 10.0]
    outer = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            if x1 == 0:
                piece, _ = sp_integrate.quad(inner, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)
            else:
                piece, _ = sp_integrate.quad(inner, lo, hi, weight="cos", wvar=x1, epsabs=1e-14, epsrel=1e-12, limit=200)
            outer += piece
        if x1 == 0:
            tail, _ = sp_integrate.quad(inner, edges[-1], np.inf, epsabs=1e-14, epsrel=1e-11, limit=400)
        else:
            tail, _ = sp_integrate.quad(inner, edges[-1], np.inf, weight="cos", wvar=x1, epsabs=1e-14, limlst=100)
        outer += tail
    line = alpha / (4 * math.pi**2) * 2.0 * outer
    r = math.hypot(x1, point[1] - site.position[1])
    return macdonald_k0(kappa * r).real / (2 * math.pi) + line


def validate_reduction(spec, kappa, points, tol=1e-6, hard_limit=1e-5, cfg=DEFAULT_CONFIG):
    """Compare single-integral and iterated-2D eigenfunction values.

    Returns the largest absolute difference (relative to the largest
    sampled ``|psi|``). Raises ``ReductionMismatchError`` above
    ``hard_limit``.
    """
    diffs = []
    scale = 0.0
    for pt in points:
        v1 = eigenfunction_value(spec, kappa, pt, cfg)
        v2 = eigenfunction_2d_quadrature(spec, kappa, pt)
        diffs.append(abs(v1 - v2))
        scale = max(scale, abs(v1))
    worst = max(diffs) / scale
    if worst > hard_limit:
        raise ReductionMismatchError(f"reduced eigenfunction differs from 2D quadrature by {worst:.3g}")
    return worst


def point_boundary_functionals(spec, kappa, radii=None, angles=16, cfg=DEFAULT_CONFIG):
    """``(Xi, Omega)`` at the site from a radial fit of circle averages.

    Fits ``f(rho) = -Xi ln(rho) + Omega + c1 rho**2 ln(rho) + c2 rho**2``.
    """
    site = _reduced_single(spec)
    l, a = site.position
    if radii is None:
        radii = np.geomspace(1e-4, 2e-2, 10)
    th = np.linspace(0, 2 * np.pi, angles, endpoint=False)
    avg = []
    for rho in radii:
        vals = [eigenfunction_value(spec, kappa, (l + rho * math.cos(t), a + rho * math.sin(t)), cfg) for t in th]
        avg.append(np.mean(vals))
    rho = np.asarray(radii)
    lr = np.log(rho)
    design = np.column_stack([-lr, np.ones_like(rho), rho**2 * lr, rho**2])
    coef, *_ = np.linalg.lstsq(design, np.asarray(avg), rcond=None)
    return float(coef[0]), float(coef[1])


def line_boundary_functionals(spec, kappa, x1, h=1e-4, cfg=DEFAULT_CONFIG):
    """``(Xi_line, Omega_line)`` at ``(x1, 0)`` by one-sided differences.

    ``Xi_line`` is the jump of the normal derivative across the line and
    ``Omega_line`` the trace; second-order one-sided stencils.
    """

    def f(x2):
        return eigenfunction_value(spec, kappa, (x1, x2), cfg)

    f0 = f(0.0)
    up = (-3 * f0 + 4 * f(h) - f(2 * h)) / (2 * h)
    down = (3 * f0 - 4 * f(-h) + f(-2 * h)) / (2 * h)
    return up - down, f0


def eigenfunction_eval(spec, kappa_root, points, cfg=DEFAULT_CONFIG, check_reduction=True):
    """Evaluate the single-site eigenfunction with boundary diagnostics.

    Parameters
    ----------
    spec : SystemSpec
        One site in 2D.
    kappa_root : float
        A root of ``š - phi``.
    points : sequence of (x1, x2)
        The line condition is checked at the projection ``(x1, 0)`` of each.
    check_reduction : bool
        Validate the single-integral form at (up to) 5 of the points.

    Returns
    -------
    list of EigenfunctionSample
    """
    site = _reduced_single(spec)
    beta = site.beta
    xi_p, om_p = point_boundary_functionals(spec, kappa_root, cfg=cfg)
    point_resid = abs(2 * math.pi * beta * xi_p - om_p) / max(abs(om_p), abs(xi_p))
    if check_reduction:
        usable = [p for p in points if math.hypot(p[0] - site.position[0], p[1] - site.position[1]) > 0][:5]
        if usable:
            validate_reduction(spec, kappa_root, usable, cfg=cfg)
    out = []
    for pt in points:
        xi_l, om_l = line_boundary_functionals(spec, kappa_root, pt[0], cfg=cfg)
        line_resid = abs(xi_l + spec.alpha * om_l) / max(abs(xi_l), abs(spec.alpha * om_l))
        diag = {
            "Xi_point": xi_p,
            "Omega_point": om_p,
            "point_residual": point_resid,
            "Xi_line": xi_l,
            "Omega_line": om_l,
            "line_residual": line_resid,
        }
        out.append(EigenfunctionSample(tuple(pt), eigenfunction_value(spec, kappa_root, pt, cfg), diag))
    return out


__all__ = [
    "find_eigenvalues",
    "single_root",
    "single_point_asymptotics",
    "symmetric_pair_spectrum",
    "antisymmetric_root",
    "eigenfunction_eval",
    "eigenfunction_value",
    "validate_reduction",
    "point_boundary_functionals",
    "line_boundary_functionals",
    "phi_line_contact",
    "SinglePointAsymptotics",
    "PairSpectrum",
    "EigenfunctionSample",
    "ReductionMismatchError",
]
