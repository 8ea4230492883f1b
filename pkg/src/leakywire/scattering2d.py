"""Scattering of the line's bound mode on a single point site.

On the open channel ``lambda in (-alpha**2/4, 0)`` the guided mode
``exp(i p x1) exp(-alpha |x2| / 2)`` with ``p = sqrt(lambda + alpha**2/4)``
is partly reflected by the site. With ``eta0 = s_beta - phi0`` the boundary
value of the single-site resonance function and ``g`` the half-residue
term of the continuation,

    R(lambda) = g(lambda) / eta0(lambda),     T(lambda) = 1 + R(lambda).

Because ``Im eta0 = -|g|`` exactly, ``Re R = -|R|**2`` and the flux identity
``|R|**2 + |T|**2 = 1`` hold. The same expression continued to complex
``z`` has its poles at the zeros of ``eta``, i.e. at the resonances.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .quadrature import DEFAULT_CONFIG
from .resonance2d import eta, find_resonance, g_term

SINGULAR_ETA = 1e-14


class SingularAmplitudeError(ArithmeticError):
    """``eta0`` vanishes on the open channel (embedded eigenvalue)."""


@dataclass(frozen=True)
class Amplitudes:
    """Reflection and transmission amplitudes at one real energy."""

    lam: float
    reflection: complex
    transmission: complex

    @property
    def flux_defect(self):
        """``|T|**2 + |R|**2 - 1``."""
        return abs(self.transmission) ** 2 + abs(self.reflection) ** 2 - 1.0


def amplitudes(alpha, beta, a, lam, cfg=DEFAULT_CONFIG):
    """``R`` and ``T`` for a site at distance ``|a|`` from the line.

    Parameters
    ----------
    alpha, beta, a : float
    lam : float
        Energy strictly inside ``(-alpha**2/4, 0)``.

    Returns
    -------
    Amplitudes

    Raises
    ------
    ValueError
        If ``lam`` is outside the open channel.
    SingularAmplitudeError
        If ``|eta0(lam)|`` is below ``1e-14``.
    """
    lam = float(lam)
    if not -0.25 * alpha**2 < lam < 0:
        raise ValueError(f"lambda = {lam} is outside the open channel (-alpha**2/4, 0)")
    a = abs(a)
    e0 = eta(lam, alpha, beta, a, cfg)
    if abs(e0) < SINGULAR_ETA:
        raise SingularAmplitudeError(f"eta0 vanishes at lambda = {lam}")
    r = g_term(lam, alpha, a) / e0
    return Amplitudes(lam, r, 1.0 + r)


def reflection_continued(alpha, beta, a, z, cfg=DEFAULT_CONFIG):
    """``g(z) / eta(z)`` on the continuation domain (sheet chosen by ``Im z``)."""
    return g_term(z, alpha, abs(a)) / eta(z, alpha, beta, abs(a), cfg)


@dataclass(frozen=True)
class PoleCoincidence:
    """Growth of ``|R|`` on a ray into a resonance pole.

    Attributes
    ----------
    residual : float
        ``|eta(z_pole)|``.
    pole : complex
    distances : tuple of float
    magnitudes : tuple of float
        ``|R(z_pole + d exp(i pi/4))|`` per distance.
    ratios : tuple of float
        Successive magnitude ratios (about 10 for a simple pole).
    """

    residual: float
    pole: complex
    distances: tuple
    magnitudes: tuple
    ratios: tuple

    @property
    def simple_pole(self):
        return all(5.0 < r < 20.0 for r in self.ratios)


def pole_coincidence(alpha, beta, a, distances=(1e-2, 1e-3, 1e-4), cfg=DEFAULT_CONFIG):
    """Confirm that ``R`` blows up at the resonance pole like ``1/(z - z_pole)``."""
    pole = find_resonance(alpha, beta, a, cfg=cfg)
    direction = cmath.exp(0.25j * math.pi)
    mags = tuple(abs(reflection_continued(alpha, beta, a, pole.z + d * direction, cfg)) for d in distances)
    ratios = tuple(mags[i + 1] / mags[i] for i in range(len(mags) - 1))
    return PoleCoincidence(pole.residual, pole.z, tuple(distances), mags, ratios)


@dataclass(frozen=True)
class LineshapePeak:
    """Maximum of ``|R(lambda)|**2`` near a resonance."""

    lam: float
    reflectance: float
    pole: complex

    @property
    def offset(self):
        """``|lam - Re z_pole| / |Im z_pole|``."""
        return abs(self.lam - self.pole.real) / abs(self.pole.imag)


def lineshape_peak(alpha, beta, a, pole=None, cfg=DEFAULT_CONFIG):
    """Locate the reflectance peak next to a resonance by golden-section search."""
    if pole is None:
        pole = find_resonance(alpha, beta, a, cfg=cfg).z
    width = abs(pole.imag)
    lo_edge = -0.25 * alpha**2

    def neg_reflectance(lam):
        return -abs(amplitudes(alpha, beta, a, lam, cfg).reflection) ** 2

    span = 10.0 * width
    lo = max(pole.real - span, 0.5 * (lo_edge + pole.real))
    hi = min(pole.real + span, 0.5 * pole.real)
    res = minimize_scalar(neg_reflectance, bracket=(lo, pole.real, hi), method="golden", tol=1e-10)
    return LineshapePeak(float(res.x), float(-res.fun), complex(pole))


def reflectance_grid(alpha, beta, a, lams, cfg=DEFAULT_CONFIG):
    """``(R, T)`` arrays on a grid of open-channel energies."""
    amps = [amplitudes(alpha, beta, a, lam, cfg) for lam in lams]
    return np.array([x.reflection for x in amps]), np.array([x.transmission for x in amps])
