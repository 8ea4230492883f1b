"""Reduced Birman--Schwinger matrix for a line plus points in the plane.

For ``kappa > alpha/2`` (energy ``-kappa**2`` below the line's threshold)
the point spectrum is given by the zeros of ``det D(kappa)`` with

    D_jk = š_{beta_j}(kappa) delta_jk
           - (1 - delta_jk) K0(kappa d_jk) / 2pi
           - Theta_jk(kappa),

    Theta_jk = alpha/4pi * int_R exp(-u(|a_j|+|a_k|)) cos(p(l_j-l_k))
                                 / ((2u - alpha) u) dp,   u = sqrt(p**2+kappa**2).

``phi_line(alpha, a, kappa)`` is the diagonal ``Theta_jj`` for a site at
depth ``a``.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from . import kernels
from .quadrature import DEFAULT_CONFIG, boundary_limit, integrate_de, integrate_halfline
from .specfun import macdonald_k0, s_beta_real


class ConvergenceError(RuntimeError):
    """A quadrature or root search did not reach its tolerance."""


def _check_kappa(alpha, kappa):
    if not kappa > 0.5 * alpha:
        raise ValueError(f"kappa = {kappa!r} must exceed alpha/2 = {0.5 * alpha!r}")


def _line_scale(alpha, depth, kappa):
    # The integrand peaks at p = 0 with width ~ sqrt(kappa (2 kappa - alpha))
    # near threshold and decays like exp(-depth p) for large p.
    width = math.sqrt(kappa * (2.0 * kappa - alpha))
    return max(min(1.0, 1.0 / depth, width), 1e-12)


def line_integral(alpha, depth, kappa, shift=0.0, cfg=DEFAULT_CONFIG):
    """``alpha/4pi * int_R exp(-u depth) cos(p shift) / ((2u-alpha)u) dp``.

    Returns
    -------
    IntegralResult
        Value scaled by the prefactor (real part is the result).
    """
    _check_kappa(alpha, kappa)
    if depth <= 0:
        raise ValueError("depth must be positive")

    def f(p):
        return kernels.line_integrand(p, alpha, depth, kappa, shift)

    res = integrate_halfline(f, 0.0, cfg, scale=_line_scale(alpha, depth, kappa))
    pref = alpha / (2.0 * math.pi)  # alpha/4pi times 2 for the even integrand
    return type(res)(pref * res.value.real, pref * res.error_estimate, res.evaluations, res.converged)


def _value(res, what):
    if not res.converged:
        raise ConvergenceError(f"{what}: quadrature did not converge (error {res.error_estimate:.3g})")
    return float(res.value.real)


def phi_line(alpha, a, kappa, cfg=DEFAULT_CONFIG):
    """Line-coupling function for one site at distance ``a`` from the line.

    Parameters
    ----------
    alpha : float
        Line strength.
    a : float
        Distance from the line, ``> 0``.
    kappa : float
        ``> alpha/2``.

    Returns
    -------
    float
        Positive; decreasing in ``a``.
    """
    return _value(line_integral(alpha, 2.0 * a, kappa, 0.0, cfg), "phi_line")


def theta_pair(alpha, site_j, site_k, kappa, cfg=DEFAULT_CONFIG):
    """Line-mediated coupling between two sites (2D).

    Reduces to :func:`phi_line` when both sites share a projection and depth.
    """
    depth = site_j.depth + site_k.depth
    shift = site_j.along[0] - site_k.along[0]
    return _value(line_integral(alpha, depth, kappa, shift, cfg), "theta_pair")


@dataclass(frozen=True)
class DMatrix:
    """Reduced Birman--Schwinger matrix at one spectral point.

    Attributes
    ----------
    kappa_or_z : float or SheetPoint
    entries : ndarray, shape (n, n)
        Real for real ``kappa``; symmetric.
    assembly_log : ndarray, shape (n, n)
        Quadrature error estimate per entry.
    """

    kappa_or_z: object
    entries: np.ndarray
    assembly_log: np.ndarray

    def determinant(self):
        return float(np.linalg.det(self.entries)) if np.isrealobj(self.entries) else complex(np.linalg.det(self.entries))


def build_d_matrix(spec, kappa, cfg=DEFAULT_CONFIG):
    """Assemble ``D(kappa)`` for a 2D system.

    Entries are computed for ``j <= k`` in a fixed order and mirrored, so
    the result is exactly symmetric and independent of evaluation order.
    """
    if spec.dimension != 2:
        raise ValueError("build_d_matrix handles dimension 2; use bs3d for 3D")
    _check_kappa(spec.alpha, kappa)
    n = spec.n
    m = np.zeros((n, n))
    log = np.zeros((n, n))
    for j in range(n):
        for k in range(j, n):
            sj, sk = spec.sites[j], spec.sites[k]
            res = line_integral(spec.alpha, sj.depth + sk.depth, kappa, sj.along[0] - sk.along[0], cfg)
            theta = _value(res, f"Theta[{j},{k}]")
            if j == k:
                val = s_beta_real(sj.beta, kappa) - theta
            else:
                val = -macdonald_k0(kappa * spec.distance(j, k)).real / (2.0 * math.pi) - theta
            m[j, k] = m[k, j] = val
            log[j, k] = log[k, j] = res.error_estimate
    return DMatrix(float(kappa), m, log)


def reduced_determinant(spec, kappa, cfg=DEFAULT_CONFIG):
    """``det D(kappa)`` by LU with partial pivoting."""
    return float(np.linalg.det(build_d_matrix(spec, kappa, cfg).entries))


def determinant_by_permutations(matrix):
    """Literal Leibniz expansion ``sum_sigma sgn(sigma) prod_i M[i, sigma(i)]``.

    Exponential cost; intended as an oracle for ``n <= 3``.
    """
    m = np.asarray(matrix)
    n = m.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1.0 if inversions % 2 else 1.0
        for i in range(n):
            term = term * m[i, perm[i]]
        total += term
    return total


def pair_kernel(kappa, distance):
    """Free point-point coupling ``K0(kappa d) / 2pi`` (real ``kappa``)."""
    return macdonald_k0(kappa * distance).real / (2.0 * math.pi)


def symmetric_pair_factors(alpha, beta, a, kappa, cfg=DEFAULT_CONFIG):
    """Factors ``(š + K, š - K - 2 phi)`` of ``det D`` for sites ``(0, +-a)``."""
    s = s_beta_real(beta, kappa)
    k = pair_kernel(kappa, 2.0 * a)
    phi = phi_line(alpha, a, kappa, cfg)
    return s + k, s - k - 2.0 * phi


def krein_diagonal_check(spec, kappa, steps=None):
    """Compare ``š - phi`` with the coincidence limit of the full Green function.

    The second route evaluates the line-perturbed Green function at the
    site and a point displaced by ``eta`` along the normal, using the
    transverse (one-dimensional) Green function

        g_p(x, x') = exp(-u|x-x'|)/(2u) + alpha exp(-u(|x|+|x'|))/(2u(2u-alpha)),

    integrated over ``p`` with the double-exponential rule, and then takes
    ``beta - lim_{eta->0} [G(y, y+eta) + ln(eta)/2pi]`` by Richardson
    extrapolation. The free part uses ``K0(kappa eta)/2pi``.

    Returns
    -------
    dict
        ``direct``, ``krein`` and ``difference``.
    """
    if spec.n != 1 or spec.dimension != 2:
        raise ValueError("krein_diagonal_check needs a single site in 2D")
    alpha = spec.alpha
    _check_kappa(alpha, kappa)
    site = spec.sites[0]
    a = site.depth
    beta = site.beta
    if steps is None:
        steps = [1e-4 / 2**k for k in range(7)]

    def correction(eta):
        def g(p):
            u = np.sqrt(p * p + kappa * kappa)
            return alpha * np.exp(-u * (2.0 * a + eta)) / (2.0 * u * (2.0 * u - alpha))

        res = integrate_de(g, 0.0, tol=1e-14)
        return 2.0 * res.value.real / (2.0 * math.pi)

    def regularised(eta):
        free = macdonald_k0(kappa * eta).real / (2.0 * math.pi)
        return beta - (free + correction(eta) + math.log(eta) / (2.0 * math.pi))

    lim = boundary_limit(regularised, steps)
    direct = float(s_beta_real(beta, kappa) - phi_line(alpha, a, kappa))
    krein = float(lim.value.real)
    return {"direct": direct, "krein": krein, "difference": abs(direct - krein), "limit_error": lim.error_estimate}
