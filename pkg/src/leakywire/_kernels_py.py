"""Pure-Python (NumPy) implementation of the hot numerical kernels.

This module is the reference backend. The compiled extension
``leakywire._kernels`` implements the same functions with identical
signatures; :mod:`leakywire.kernels` picks one at import time.

All functions accept and return NumPy arrays and perform no argument
validation; callers in :mod:`leakywire.specfun` do that.
"""

import numpy as np

EULER_GAMMA = 0.57721566490153286061

# |x| thresholds separating the three K0/K1 evaluation regimes.
SERIES_RADIUS = 2.0
ASYMPTOTIC_RADIUS = 25.0

_CF_MAX_ITER = 20000
_EPS = 1e-16


def _k01_series(x):
    """Temme's series for order 0 and 1 (converges fast for |x| <= 2)."""
    x2 = 0.5 * x
    ff = -np.log(x2) - EULER_GAMMA
    k0 = ff.copy()
    p = np.full_like(x, 0.5)
    q = np.full_like(x, 0.5)
    c = np.ones_like(x)
    d = x2 * x2
    s1 = p.copy()
    for i in range(1, 40):
        ff = (i * ff + p + q) / (i * i)
        c = c * d / i
        p = p / i
        q = q / i
        k0 = k0 + c * ff
        s1 = s1 + c * (p - i * ff)
        if np.all(np.abs(c) * (np.abs(ff) + np.abs(p)) < _EPS * np.abs(k0)):
            break
    return k0, s1 * 2.0 / x


def _k01_steed(x):
    """Steed's continued fraction CF2 (Temme normalisation), order 0 and 1."""
    a1 = 0.25
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _CF_MAX_ITER):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        dels = q * delh
        h = np.where(active, h + delh, h)
        s = np.where(active, s + dels, s)
        active &= np.abs(dels) >= _EPS * np.abs(s)
        if not active.any():
            break
    k0 = np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) / s
    k1 = k0 * (x + 0.5 - a1 * h) / x
    return k0, k1


def _k01_asymptotic(x):
    """Hankel expansion for large |x|, truncated at its smallest term."""
    pre = np.sqrt(np.pi / (2.0 * x)) * np.exp(-x)
    s0 = np.ones_like(x)
    s1 = np.ones_like(x)
    t0 = np.ones_like(x)
    t1 = np.ones_like(x)
    live0 = np.ones(x.shape, dtype=bool)
    live1 = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        odd = (2 * k - 1) ** 2
        n0 = t0 * (-odd) / (8.0 * k * x)
        n1 = t1 * (4.0 - odd) / (8.0 * k * x)
        live0 &= np.abs(n0) < np.abs(t0)
        live1 &= np.abs(n1) < np.abs(t1)
        t0 = np.where(live0, n0, t0)
        t1 = np.where(live1, n1, t1)
        s0 = np.where(live0, s0 + n0, s0)
        s1 = np.where(live1, s1 + n1, s1)
        live0 &= np.abs(n0) > _EPS * np.abs(s0)
        live1 &= np.abs(n1) > _EPS * np.abs(s1)
        if not (live0.any() or live1.any()):
            break
    return pre * s0, pre * s1


def bessel_k01(x):
    """Return ``(K0(x), K1(x))`` elementwise for complex ``x`` off the cut.

    Parameters
    ----------
    x : array_like of complex
        Arguments with ``|arg x| < pi``, and ``Re x >= 0`` when
        ``2 < |x| <= 25`` (the continued fraction diverges in the left
        half-plane there; :func:`leakywire.specfun.macdonald_k0` reflects
        such arguments first). No checks are made here.

    Returns
    -------
    k0, k1 : ndarray of complex
    """
    x = np.asarray(x, dtype=np.complex128)
    shape = x.shape
    x = x.ravel()
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    r = np.abs(x)
    for mask, rule in (
        (r <= SERIES_RADIUS, _k01_series),
        ((r > SERIES_RADIUS) & (r <= ASYMPTOTIC_RADIUS), _k01_steed),
        (r > ASYMPTOTIC_RADIUS, _k01_asymptotic),
    ):
        if mask.any():
            k0[mask], k1[mask] = rule(x[mask])
    return k0.reshape(shape), k1.reshape(shape)


def line_integrand(p, alpha, depth, kappa, shift):
    """Momentum integrand of the line-coupling integrals below threshold.

    Evaluates ``exp(-u*depth) * cos(p*shift) / ((2u - alpha) * u)`` with
    ``u = sqrt(p**2 + kappa**2)``. ``depth`` is the sum of the two
    transverse distances and ``shift`` the longitudinal separation.
    """
    p = np.asarray(p, dtype=np.float64)
    u = np.sqrt(p * p + kappa * kappa)
    # 2u - alpha without cancellation near threshold (kappa -> alpha/2).
    gap = (4.0 * p * p + (2.0 * kappa - alpha) * (2.0 * kappa + alpha)) / (2.0 * u + alpha)
    out = np.exp(-u * depth) / (gap * u)
    if shift != 0.0:
        out = out * np.cos(p * shift)
    return out


def continued_integrand(p, z, alpha, distance, tstar, hstar):
    """Subtracted integrand of the continued line integral.

    Evaluates ``(H(p) - hstar) / (p**2 - tstar)`` where
    ``H(p) = (i alpha / 8 pi) (alpha - 2 i w) exp(2 i w distance) / w`` and
    ``w = i sqrt(p**2 - z)`` (principal root), i.e. ``(z - p**2)**(1/2)``
    on the branch with positive imaginary part, and ``distance`` is the
    site's distance from the line.
    """
    p = np.asarray(p, dtype=np.float64)
    w = 1j * np.sqrt(p * p - z)
    h = (1j * alpha / (8.0 * np.pi)) * (alpha - 2j * w) * np.exp(2j * w * distance) / w
    return (h - hstar) / (p * p - tstar)
