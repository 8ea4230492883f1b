"""Branch-aware elementary and special functions.

Conventions
-----------
* ``sqrt_cut_positive(z)`` is the square root with its cut on the positive
  half-line and ``Im >= 0``. It equals ``1j * sqrt(-z)`` with the principal
  root, so ``sqrt_cut_positive(-k**2) == 1j*k`` for ``k > 0``.
* ``s_beta(beta, z) = beta + (ln(sqrt(z)/2i) - psi(1)) / 2pi``, written as
  ``beta + (ln(w/2) + gamma) / 2pi`` with ``w = sqrt(-z)`` principal. The
  only branch point is ``z = 0``; the function is analytic across the
  negative real axis, which is what the resonance continuation needs.
* Energies are in units with hbar**2/2m = 1.
"""

import math

import numpy as np
from scipy import special

from . import kernels

EULER_GAMMA = 0.57721566490153286061
PSI1 = -EULER_GAMMA
"""Digamma function at 1."""

_TINY = 1e-300


def sqrt_cut_positive(z):
    """Square root with cut on ``[0, inf)`` and non-negative imaginary part.

    Parameters
    ----------
    z : complex or array_like

    Returns
    -------
    complex or ndarray
    """
    return 1j * np.sqrt(-np.asarray(z, dtype=np.complex128))


def sqrt_shifted(z, t):
    """First-sheet root ``(z - t)**(1/2)`` with positive imaginary part."""
    return sqrt_cut_positive(np.asarray(z, dtype=np.complex128) - t)


def _check_k_args(x):
    x = np.asarray(x, dtype=np.complex128)
    if np.any((x.imag == 0) & (x.real <= 0)):
        raise ValueError("Macdonald function evaluated on its cut (-inf, 0]")
    if np.any(np.abs(x) < _TINY):
        raise OverflowError("Macdonald function argument below 1e-300")
    return x


def _k01(x):
    x = _check_k_args(x)
    # The continued fraction does not converge in the left half-plane at
    # moderate |x|; use K_n(-y) = (-1)^n K_n(y) -/+ i pi I_n(y) there.
    r = np.abs(x)
    left = (x.real < 0) & (r > kernels.python_backend.SERIES_RADIUS)
    left &= r <= kernels.python_backend.ASYMPTOTIC_RADIUS
    if not np.any(left):
        return kernels.bessel_k01(x)
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    k0[~left], k1[~left] = kernels.bessel_k01(x[~left])
    y = -x[left]
    m = np.where(x[left].imag > 0, 1.0, -1.0)
    ky0, ky1 = kernels.bessel_k01(y)
    k0[left] = ky0 - 1j * np.pi * m * special.iv(0, y)
    k1[left] = -ky1 - 1j * np.pi * m * special.iv(1, y)
    return k0, k1


def macdonald_k0(x):
    """Macdonald function ``K0`` on the plane cut along ``(-inf, 0]``.

    Parameters
    ----------
    x : complex or array_like of complex

    Returns
    -------
    complex or ndarray
        Scalar in, scalar out.

    Raises
    ------
    ValueError
        If any argument lies on ``(-inf, 0]``.
    OverflowError
        If ``|x| < 1e-300``.
    """
    k0, _ = _k01(x)
    return k0[()] if np.ndim(k0) == 0 else k0


def macdonald_k1(x):
    """Macdonald function ``K1``; ``K0' = -K1``. Same domain as ``K0``."""
    _, k1 = _k01(x)
    return k1[()] if np.ndim(k1) == 0 else k1


def s_beta(beta, z):
    """Renormalised point-coupling function ``s_beta(z)``.

    Parameters
    ----------
    beta : float
        Point coupling (dimensionless).
    z : complex
        Energy; must not be 0.

    Returns
    -------
    complex
    """
    z = complex(z)
    if z == 0:
        raise ValueError("s_beta has a logarithmic branch point at z = 0")
    w = np.sqrt(-z)
    return beta + (np.log(w / 2.0) + EULER_GAMMA) / (2.0 * np.pi)


def s_beta_real(beta, kappa):
    """Real form ``š_beta(kappa) = s_beta(-kappa**2)`` for ``kappa > 0``."""
    kappa = np.asarray(kappa, dtype=np.float64)
    if np.any(kappa <= 0):
        raise ValueError("kappa must be positive")
    out = beta + (np.log(kappa / 2.0) + EULER_GAMMA) / (2.0 * np.pi)
    return out[()] if out.ndim == 0 else out


def s_beta_real_derivative(kappa):
    """``d š_beta / d kappa = 1 / (2 pi kappa)`` (independent of beta)."""
    return 1.0 / (2.0 * np.pi * kappa)


def s_beta_root(beta):
    """The ``kappa`` at which ``š_beta(kappa) = 0``: ``2 exp(-2 pi beta - gamma)``."""
    return 2.0 * math.exp(-2.0 * math.pi * beta - EULER_GAMMA)


def point_only_eigenvalue(beta, dimension):
    """Bound-state energy of a lone point interaction.

    Parameters
    ----------
    beta : float
        Point coupling.
    dimension : {2, 3}

    Returns
    -------
    float or None
        2D: ``-4 exp(2(-2 pi beta + psi(1)))`` for every beta.
        3D: ``-(4 pi beta)**2`` if ``beta < 0``, otherwise ``None``.
    """
    if dimension == 2:
        return -4.0 * math.exp(2.0 * (-2.0 * math.pi * beta + PSI1))
    if dimension == 3:
        return -((4.0 * math.pi * beta) ** 2) if beta < 0 else None
    raise ValueError(f"dimension must be 2 or 3, got {dimension!r}")
