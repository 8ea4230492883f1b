"""Continuation of the reduced determinant across the open channel.

For ``z`` off ``[-alpha**2/4, inf)`` the line-coupling function is

    phi_a(z) = int_0^inf H(p) / (p**2 - t*) dp,   t* = z + alpha**2/4,
    H(p) = (i alpha / 8 pi) (alpha - 2 i w) exp(2 i w a) / w,
    w = (z - p**2)**(1/2),  Im w > 0.

(Below threshold this is the momentum integral defining ``phi_line``.)
``H`` is analytic in ``z`` across the interval ``(-alpha**2/4, 0)``; only
the pole at ``p* = sqrt(t*)`` crosses the integration path. With

    g(z) = i pi H(p*) / (2 p*) = (i alpha / 4) exp(-alpha a) / sqrt(z + alpha**2/4)

the continuation reads: upper half-plane ``phi = I``; on the interval
``phi0 = P.V. I + g``; in the lower half-plane (second sheet)
``phi- = I + 2 g``. Here ``I`` is the integral as written, which for
complex ``t*`` is evaluated by subtracting ``H(p*) = alpha exp(-alpha a)/2pi``
on a window around ``Re p*`` and integrating ``1/(p**2 - t*)`` there in
closed form. In the ``t = p**2`` variable the integrand density is
``mu(z, t) = H / (2 sqrt t)``.

The resonance functions (single site, coupling-broken and
distance-broken mirror pairs) are built from ``phi`` on the sheet picked
by the sign of ``Im z`` and from the analytic functions ``s_beta(z)`` and
``K0(d sqrt(-z))/2pi``, which need no sheet bookkeeping.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from . import kernels
from .bs2d import ConvergenceError
from .quadrature import DEFAULT_CONFIG, extrapolate_to_zero, integrate, integrate_halfline
from .specfun import macdonald_k0, macdonald_k1, point_only_eigenvalue, s_beta, s_beta_real_derivative
from .spectrum2d import antisymmetric_root
from .system import OmegaMinus, Sheet, SheetPoint

_WINDOW = 1.7


def _sheet_point(z, alpha):
    if isinstance(z, SheetPoint):
        z.validate(alpha)
        return z
    return SheetPoint.classify(z, alpha)


def mu_density(z, t, alpha, a):
    """Integrand density of the continued line function in ``t = p**2``.

    ``mu(z, t) = (i alpha / 16 pi) (alpha - 2 i w) exp(2 i w a) / (sqrt(t) w)``
    with ``w = (z - t)**(1/2)``, ``Im w > 0``. Real for real ``z < 0``.

    Raises
    ------
    ValueError
        At ``t = 0`` or ``z = t``.
    """
    zz = z.z if isinstance(z, SheetPoint) else complex(z)
    if t <= 0:
        raise ValueError("t must be positive")
    if zz == t:
        raise ValueError("mu_density is singular at z = t")
    w = 1j * cmath.sqrt(t - zz)
    val = (1j * alpha / (16 * math.pi)) * (alpha - 2j * w) * cmath.exp(2j * w * a) / (math.sqrt(t) * w)
    if zz.imag == 0 and zz.real < 0:
        return complex(val.real, 0.0)
    return val


def g_term(z, alpha, a):
    """Half-residue term ``(i alpha/4) exp(-alpha a) / sqrt(z + alpha**2/4)``."""
    return 0.25j * alpha * math.exp(-alpha * a) / cmath.sqrt(complex(z) + 0.25 * alpha**2)


def _raw_integral(z, alpha, a, cfg, principal):
    """``int_0^inf H/(p**2 - t*) dp`` (principal value when ``principal``)."""
    tstar = complex(z) + 0.25 * alpha**2
    pstar = cmath.sqrt(tstar)
    scale = min(1.0, 0.5 / a)
    near_axis = pstar.real > 0 and abs(pstar.imag) < pstar.real
    if not (principal or near_axis):

        def f(p):
            return kernels.continued_integrand(p, complex(z), alpha, a, tstar, 0.0)

        res = integrate_halfline(f, 0.0, cfg, scale=scale, points=[pstar.real] if pstar.real > 0 else [])
        return res
    hstar = alpha * math.exp(-alpha * a) / (2 * math.pi)
    big_p = _WINDOW * pstar.real

    def f_sub(p):
        return kernels.continued_integrand(p, complex(z), alpha, a, tstar, hstar)

    def f_tail(p):
        return kernels.continued_integrand(p, complex(z), alpha, a, tstar, 0.0)

    head = integrate(f_sub, 0.0, big_p, cfg)
    tail = integrate_halfline(f_tail, big_p, cfg, scale=scale)
    if principal:
        p = pstar.real
        j = math.log((big_p - p) / (big_p + p)) / (2 * p)
    else:
        j = (cmath.log(big_p - pstar) - cmath.log(-pstar) - cmath.log(big_p + pstar) + cmath.log(pstar)) / (2 * pstar)
    total = head + tail
    return type(total)(total.value + hstar * j, total.error_estimate, total.evaluations, total.converged)


def _finish(res, what):
    if not res.converged:
        raise ConvergenceError(f"{what}: quadrature did not converge (error {res.error_estimate:.3g})")
    return complex(res.value)


def phi_physical(z, alpha, a, cfg=DEFAULT_CONFIG):
    """Line function on the physical sheet, for any ``z`` off ``[-alpha**2/4, inf)``."""
    z = complex(z)
    if z.imag == 0 and z.real >= -0.25 * alpha**2:
        raise ValueError("z lies on the physical-sheet cut")
    return _finish(_raw_integral(z, alpha, a, cfg, False), "phi_physical")


def phi_continued(z, alpha, a, cfg=DEFAULT_CONFIG):
    """Line function continued from the upper half-plane across the interval.

    Parameters
    ----------
    z : complex or SheetPoint
        Upper half-plane, the open interval ``(-alpha**2/4, 0)``, the real
        axis below ``-alpha**2/4``, or the lower half-plane (second sheet).
    alpha, a : float

    Returns
    -------
    complex
    """
    sp = _sheet_point(z, alpha)
    zz = sp.z
    if sp.sheet is Sheet.UPPER:
        return _finish(_raw_integral(zz, alpha, a, cfg, False), "phi (upper)")
    if sp.sheet is Sheet.INTERVAL:
        val = _finish(_raw_integral(zz, alpha, a, cfg, True), "phi (interval)")
        return complex(val.real, 0.0) + g_term(zz, alpha, a)
    val = _finish(_raw_integral(zz, alpha, a, cfg, False), "phi (second sheet)")
    return val + 2.0 * g_term(zz, alpha, a)


def pair_kernel_continued(z, distance):
    """``K0(distance sqrt(-z)) / 2pi`` with the principal root (analytic across the interval)."""
    w = cmath.sqrt(-complex(z))
    return complex(macdonald_k0(distance * w)) / (2 * math.pi)


def eta(z, alpha, beta, a, cfg=DEFAULT_CONFIG):
    """Single-site resonance function ``s_beta(z) - phi(z)`` on the continuation domain."""
    zz = z.z if isinstance(z, SheetPoint) else complex(z)
    return s_beta(beta, zz) - phi_continued(z, alpha, a, cfg)


def eta_physical(z, alpha, beta, a, cfg=DEFAULT_CONFIG):
    """``s_beta(z) - phi(z)`` on the physical sheet (both half-planes)."""
    return s_beta(beta, complex(z)) - phi_physical(z, alpha, a, cfg)


@dataclass(frozen=True)
class Pole:
    """A converged zero ``z = mu + i nu`` of a continued determinant."""

    z: complex
    residual: float
    seed: complex
    iterations: int
    derivative_estimate: complex

    @property
    def mu(self):
        return self.z.real

    @property
    def nu(self):
        return self.z.imag


class PoleSearchError(RuntimeError):
    """Complex root search failed; ``last`` holds the final iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


def find_complex_root(f, seed, tol=1e-10, region=None, max_iter=60, trust=None, h_rel=1e-6):
    """Damped Newton iteration with a centred-difference derivative.

    Steps are capped at a trust radius (``trust``, default ``0.1 |seed|``),
    shrunk further so that iterates stay inside ``region`` if given.
    The iteration stops when ``|f| <= tol``.

    Parameters
    ----------
    f : callable
        Analytic function of a complex variable.
    seed : complex
    tol : float
    region : OmegaMinus, optional
        Iterates may touch its upper edge (the real interval) but not leave.

    Returns
    -------
    Pole

    Raises
    ------
    PoleSearchError
        On non-convergence or escape from the region.
    """
    z = complex(seed)
    trust = trust if trust is not None else 0.1 * max(abs(z), 1e-3)
    fz = f(z)
    deriv = 0j
    for it in range(1, max_iter + 1):
        h = h_rel * max(abs(z), 1e-3)
        deriv = (f(z + h) - f(z - h)) / (2 * h)
        if deriv == 0:
            raise PoleSearchError("vanishing derivative", z)
        step = -fz / deriv
        lam = 1.0
        if abs(step) > trust:
            lam = trust / abs(step)
        while True:
            znew = z + lam * step
            if region is not None and znew.imag > 0:
                # Round-off can push a nearly real pole just above the
                # axis; project back onto the interval instead of halving.
                znew = complex(znew.real, 0.0)
            if region is not None and not _in_closure(region, znew):
                lam *= 0.5
                if lam < 1e-8:
                    raise PoleSearchError(f"iterate left the second-sheet region near {znew}", z)
                continue
            fnew = f(znew)
            if abs(fnew) < abs(fz) or lam < 1e-3:
                break
            lam *= 0.5
        z, fz = znew, fnew
        if abs(fz) <= tol:
            return Pole(complex(z), float(abs(fz)), complex(seed), it, complex(deriv))
    raise PoleSearchError(f"no convergence after {max_iter} iterations (|f| = {abs(fz):.3g})", z)


def _in_closure(region, z):
    if z.imag == 0:
        lo = -0.25 * region.alpha**2 + region.edge
        return lo < z.real < -region.edge
    return region.contains(z)


def find_resonance(alpha, beta, a, seed=None, tol=1e-10, cfg=DEFAULT_CONFIG, region=None):
    """Second-sheet resonance of a single site near the line.

    Parameters
    ----------
    alpha, beta, a : float
    seed : complex, optional
        Defaults to the point-only level ``eps_beta``; then the embedded
        regime ``eps_beta > -alpha**2/4`` is required.

    Returns
    -------
    Pole
        ``Im z <= 0``.
    """
    region = region or OmegaMinus(alpha)
    if seed is None:
        eps = point_only_eigenvalue(beta, 2)
        if not eps > -0.25 * alpha**2:
            raise ValueError("eps_beta is not embedded in (-alpha**2/4, 0); supply a seed")
        seed = complex(eps, -1e-9 * abs(eps))

    def f(z):
        return eta(z, alpha, beta, a, cfg)

    pole = find_complex_root(f, seed, tol, region)
    _check_sign(pole)
    return pole


def _check_sign(pole, slack=1e-13):
    if pole.z.imag > slack * max(1.0, abs(pole.z)):
        raise PoleSearchError(f"pole {pole.z} has positive imaginary part", pole.z)


# --------------------------------------------------------------------------
# Broken mirror symmetry


def _pair_embedded(alpha, beta, a):
    k2 = antisymmetric_root(beta, a)
    if k2 is None or not -k2 * k2 > -0.25 * alpha**2:
        raise ValueError("mu2 is not embedded in (-alpha**2/4, 0) for these parameters")
    return k2


def eta_coupling_break(z, alpha, beta, q, a, cfg=DEFAULT_CONFIG):
    """Determinant for sites ``(0, a)`` with ``beta`` and ``(0, -a)`` with ``beta + q``.

    ``s(s+q) - K**2 - (2s+q) phi - 2 K phi`` with ``K = K0(2a sqrt(-z))/2pi``.
    """
    zz = z.z if isinstance(z, SheetPoint) else complex(z)
    s = s_beta(beta, zz)
    k = pair_kernel_continued(zz, 2 * a)
    phi = phi_continued(z, alpha, a, cfg)
    return s * (s + q) - k * k - (2 * s + q) * phi - 2 * k * phi


def eta_distance_break(z, alpha, beta, a, delta, form="reduced", cfg=DEFAULT_CONFIG):
    """Determinant for equal sites at ``(0, a)`` and ``(0, -a - delta)``.

    ``form="reduced"``:
        ``s**2 - K**2 - s (phi_a + phi_{a+delta}) - 2 K phi_{a+delta/2}``
    ``form="exact"``:
        ``(s - phi_a)(s - phi_{a+delta}) - (K + phi_{a+delta/2})**2``,
    with ``K = K0((2a + delta) sqrt(-z))/2pi``. The two differ by
    ``phi_a phi_{a+delta} - phi_{a+delta/2}**2 = O(delta**2)``.
    """
    zz = z.z if isinstance(z, SheetPoint) else complex(z)
    s = s_beta(beta, zz)
    k = pair_kernel_continued(zz, 2 * a + delta)
    pa = phi_continued(z, alpha, a, cfg)
    pb = phi_continued(z, alpha, a + delta, cfg)
    pc = phi_continued(z, alpha, a + 0.5 * delta, cfg)
    if form == "reduced":
        return s * s - k * k - s * (pa + pb) - 2 * k * pc
    if form == "exact":
        return (s - pa) * (s - pb) - (k + pc) ** 2
    raise ValueError("form must be 'reduced' or 'exact'")


def theta_coefficient(beta, a, kappa2):
    """``kappa2 / (š'(kappa2) + 2a K'(2a kappa2))`` with ``K = K0/2pi``."""
    kprime = -macdonald_k1(2 * a * kappa2).real / (2 * math.pi)
    return kappa2 / (s_beta_real_derivative(kappa2) + 2 * a * kprime)


def width_coefficient_coupling(alpha, beta, a, kappa2, cfg=DEFAULT_CONFIG):
    """Predicted ``nu(q)/q**2``: ``-theta g8 / (2 |š(kappa2) - phi0(mu2)|**2)``.

    ``g8 = (alpha/8) exp(-alpha a) / sqrt(mu2 + alpha**2/4)``.
    """
    mu2 = -kappa2 * kappa2
    th = theta_coefficient(beta, a, kappa2)
    g8 = 0.125 * alpha * math.exp(-alpha * a) / math.sqrt(mu2 + 0.25 * alpha**2)
    amp = s_beta(beta, mu2) - phi_continued(mu2, alpha, a, cfg)
    return -th * g8 / (2 * abs(amp) ** 2)


def kappa2_distance_derivative(beta, a, kappa2):
    """``d kappa2 / d delta`` at ``delta = 0`` for ``š(k) + K((2a+delta)k) = 0``.

    ``-kappa2 K'(2a kappa2) / (š'(kappa2) + 2a K'(2a kappa2))``, ``K = K0/2pi``.
    """
    kprime = -macdonald_k1(2 * a * kappa2).real / (2 * math.pi)
    return -kappa2 * kprime / (s_beta_real_derivative(kappa2) + 2 * a * kprime)


@dataclass(frozen=True)
class ExpansionCheck:
    """Pole of a broken-symmetry configuration with measured/predicted rates."""

    pole: Pole
    mu2: float
    kappa2: float
    measured_linear: float
    predicted_linear: float
    measured_quadratic: float
    predicted_quadratic: object

    @property
    def physical(self):
        """``Im z <= 0``, as required of a resolvent pole."""
        return self.pole.z.imag <= 0


def find_resonance_coupling_break(alpha, beta, q, a, seed=None, tol=1e-10, cfg=DEFAULT_CONFIG):
    """Pole of the coupling-broken mirror pair, seeded at the embedded ``mu2``.

    Returns
    -------
    ExpansionCheck
        ``measured_linear = (Re z - mu2)/q`` vs ``theta_coefficient``;
        ``measured_quadratic = Im z / q**2`` vs :func:`width_coefficient_coupling`.
    """
    if q == 0:
        raise ValueError("q must be nonzero")
    k2 = _pair_embedded(alpha, beta, a)
    mu2 = -k2 * k2
    th = theta_coefficient(beta, a, k2)
    if seed is None:
        seed = complex(mu2 + th * q, -1e-12)

    def f(z):
        return eta_coupling_break(z, alpha, beta, q, a, cfg)

    pole = find_complex_root(f, seed, tol, OmegaMinus(alpha), trust=max(10 * abs(th * q), 1e-6))
    _check_sign(pole)
    return ExpansionCheck(
        pole,
        mu2,
        k2,
        (pole.z.real - mu2) / q,
        th,
        pole.z.imag / q**2,
        width_coefficient_coupling(alpha, beta, a, k2, cfg),
    )


def find_resonance_distance_break(alpha, beta, a, delta, form="reduced", seed=None, tol=1e-10, cfg=DEFAULT_CONFIG):
    """Pole of the distance-broken mirror pair, seeded at ``mu2``.

    The reduced determinant is not the exact one, and its zero can sit
    just above the real axis (``Im z ~ +0.06 delta**2`` for alpha = 3,
    beta = 0, a = 1). The search is therefore not confined to the lower
    half-plane and the sign is reported through ``physical`` rather than
    enforced.

    Returns
    -------
    ExpansionCheck
        ``measured_linear = (Re z - mu2)/delta`` vs ``-2 kappa2 kappa2'``;
        ``measured_quadratic = Im z / delta**2`` (no closed-form prediction).
    """
    if delta == 0:
        raise ValueError("delta must be nonzero")
    if a + delta <= 0:
        raise ValueError("a + delta must stay positive")
    k2 = _pair_embedded(alpha, beta, a)
    mu2 = -k2 * k2
    slope = -2 * k2 * kappa2_distance_derivative(beta, a, k2)
    if seed is None:
        seed = complex(mu2 + slope * delta, -1e-12)

    def f(z):
        return eta_distance_break(z, alpha, beta, a, delta, form, cfg)

    pole = find_complex_root(f, seed, tol, None, trust=max(10 * abs(slope * delta), 1e-6))
    return ExpansionCheck(pole, mu2, k2, (pole.z.real - mu2) / delta, slope, pole.z.imag / delta**2, None)


def distance_slope_richardson(alpha, beta, a, deltas=(1e-2, 5e-3, 2.5e-3), form="reduced", cfg=DEFAULT_CONFIG):
    """Richardson estimate of ``d Re z / d delta`` at ``delta = 0``."""
    ratios = [find_resonance_distance_break(alpha, beta, a, d, form, cfg=cfg).measured_linear for d in deltas]
    return extrapolate_to_zero(np.asarray(deltas), np.asarray(ratios)).value.real, ratios


@dataclass(frozen=True)
class PoleTrack:
    """Poles followed along a parameter ladder.

    Attributes
    ----------
    parameters : tuple of float
        Values at which a pole was found, in ladder order.
    poles : tuple of Pole
    escaped_at : float or None
        First ladder value at which the search left the region.
    last_iterate : complex or None
        Final iterate of the failed search.
    """

    parameters: tuple
    poles: tuple
    escaped_at: object = None
    last_iterate: object = None


def track_pole(fn, ladder, seed, region, tol=1e-10):
    """Follow a zero of ``fn(param, z)`` along ``ladder``, reseeding at each step.

    Stops at the first parameter where the search fails or leaves
    ``region``; that parameter is reported in ``escaped_at``.
    """
    params, poles = [], []
    z = complex(seed)
    for t in ladder:
        try:
            pole = find_complex_root(lambda w, t=t: fn(t, w), z, tol, region)
        except PoleSearchError as err:
            return PoleTrack(tuple(params), tuple(poles), float(t), err.last)
        params.append(float(t))
        poles.append(pole)
        z = pole.z
    return PoleTrack(tuple(params), tuple(poles))
