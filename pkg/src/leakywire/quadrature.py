"""Adaptive quadrature, principal values and boundary limits.

The main rule is a vectorised, globally adaptive Gauss--Kronrod 7/15
scheme. Integrands receive a 1-D ``float64`` array of abscissae and must
return an array of the same shape (real or complex). Many panels are
evaluated in a single call, which is what makes the compiled kernels pay
off.

:func:`integrate_de` is an independently coded double-exponential rule
(tanh-sinh on finite intervals, exp-sinh on half-lines). It shares no node
tables with the Gauss--Kronrod rule and is used as a cross-check oracle.
"""

from dataclasses import dataclass
import math

import numpy as np

_EPMACH = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny

# Kronrod 15-point abscissae (non-negative half) and weights; the Gauss
# 7-point rule uses the odd-indexed abscissae.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-node layout on [-1, 1]: x = [-xgk[0..6], 0, xgk[6..0]].
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_KW = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[9, 11, 13]] = _WG[2::-1]


class IntegrandError(ArithmeticError):
    """The integrand returned a non-finite value.

    Attributes
    ----------
    abscissa : float
        First abscissa at which the integrand failed.
    """

    def __init__(self, abscissa, value):
        self.abscissa = float(abscissa)
        self.value = value
        super().__init__(f"integrand returned {value!r} at t = {self.abscissa!r}")


class PoleNotSimpleError(ArithmeticError):
    """The residue estimate at a principal-value pole did not stabilise."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for the adaptive rule.

    Parameters
    ----------
    abs_tol, rel_tol : float
        Convergence target ``max(abs_tol, rel_tol * |value|)``.
    max_subdivisions : int
        Maximum number of panels kept by the adaptive rule.
    truncation_decay_threshold : float
        Half-line integrals stop adding panels once a panel contributes
        less than this fraction of the accumulated absolute integral.
    """

    abs_tol: float = 1e-14
    rel_tol: float = 1e-12
    max_subdivisions: int = 4000
    truncation_decay_threshold: float = 1e-18

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.truncation_decay_threshold > 0:
            raise ValueError("truncation_decay_threshold must be positive")

    def target(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class IntegralResult:
    """Outcome of a quadrature.

    ``converged`` implies ``error_estimate <= max(abs_tol, rel_tol*|value|)``.
    """

    value: complex
    error_estimate: float
    evaluations: int
    converged: bool

    def __add__(self, other):
        return IntegralResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )


def _evaluate(f, t):
    y = np.asarray(f(t))
    if y.shape != t.shape:
        y = np.broadcast_to(y, t.shape)
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.argmax(bad))
        raise IntegrandError(t[i], y[i])
    return y


def _gk15(f, a, b):
    """Apply the 7/15 pair to every panel ``[a_i, b_i]`` at once."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    t = (c[:, None] + h[:, None] * _NODES[None, :]).ravel()
    y = _evaluate(f, t).reshape(len(a), 15)
    resk = h * (y @ _KW)
    resg = h * (y @ _GW)
    ah = np.abs(h)
    resabs = ah * (np.abs(y) @ _KW)
    mean = resk / np.where(h == 0, 1.0, 2.0 * h)
    resasc = ah * (np.abs(y - mean[:, None]) @ _KW)
    err = np.abs(resk - resg)
    scale = np.where(resasc > 0, np.minimum(1.0, (200.0 * err / np.where(resasc > 0, resasc, 1.0)) ** 1.5), 1.0)
    err = np.where((resasc > 0) & (err > 0), resasc * scale, err)
    floor = 50.0 * _EPMACH * resabs
    err = np.where(resabs > _UFLOW / (50.0 * _EPMACH), np.maximum(floor, err), err)
    return resk, err, resabs


def _adaptive(f, edges, cfg, evaluations=0, batch=16):
    """Globally adaptive refinement over the panels delimited by ``edges``."""
    a = np.asarray(edges[:-1], dtype=float)
    b = np.asarray(edges[1:], dtype=float)
    val, err, _ = _gk15(f, a, b)
    evaluations += 15 * len(a)
    frozen = np.zeros(len(a), dtype=bool)
    while True:
        total = val.sum()
        tol = cfg.target(total)
        total_err = err.sum()
        if total_err <= tol:
            return IntegralResult(complex(total), float(total_err), evaluations, True)
        cand = np.where(~frozen)[0]
        if len(cand) == 0 or len(a) >= cfg.max_subdivisions:
            return IntegralResult(complex(total), float(total_err), evaluations, False)
        order = cand[np.argsort(-err[cand], kind="stable")]
        worst = err[order[0]]
        pick = order[:batch]
        pick = pick[err[pick] >= 0.1 * worst]
        pick = pick[: max(1, cfg.max_subdivisions - len(a))]
        mid = 0.5 * (a[pick] + b[pick])
        tiny = np.abs(b[pick] - a[pick]) <= 1e3 * _EPMACH * np.maximum(np.abs(mid), _UFLOW)
        if tiny.all():
            frozen[pick] = True
            continue
        frozen[pick[tiny]] = True
        pick = pick[~tiny]
        mid = mid[~tiny]
        na = np.concatenate([a[pick], mid])
        nb = np.concatenate([mid, b[pick]])
        nval, nerr, _ = _gk15(f, na, nb)
        evaluations += 15 * len(na)
        keep = np.ones(len(a), dtype=bool)
        keep[pick] = False
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])
        frozen = np.concatenate([frozen[keep], np.zeros(len(na), dtype=bool)])
        # Keep panels sorted by position so summation order is canonical.
        idx = np.argsort(a, kind="stable")
        a, b, val, err, frozen = a[idx], b[idx], val[idx], err[idx], frozen[idx]


def integrate(f, a, b, cfg=DEFAULT_CONFIG, points=()):
    """Adaptive Gauss--Kronrod integral of ``f`` over a finite ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand.
    a, b : float
        Finite limits.
    cfg : QuadratureConfig
    points : sequence of float, optional
        Interior break points (known kinks or peaks).

    Returns
    -------
    IntegralResult
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integrate needs finite limits; use integrate_halfline")
    if a == b:
        return IntegralResult(0j, 0.0, 0, True)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    inner = sorted(p for p in points if a < p < b)
    res = _adaptive(f, [a, *inner, b], cfg)
    return IntegralResult(sign * res.value, res.error_estimate, res.evaluations, res.converged)


def halfline_edges(f, a, cfg=DEFAULT_CONFIG, scale=1.0, max_panels=80):
    """Panel edges ``a, a+L, a+3L, a+7L, ...`` truncated where ``f`` has decayed.

    Returns the edge list and a flag telling whether truncation happened.
    """
    edges = [a]
    width = float(scale)
    acc = 0.0
    prev = math.inf
    for _ in range(max_panels):
        lo = edges[-1]
        hi = lo + width
        _, _, resabs = _gk15(f, np.array([lo]), np.array([hi]))
        contrib = float(resabs[0])
        acc += contrib
        edges.append(hi)
        if contrib <= cfg.truncation_decay_threshold * acc and contrib <= prev:
            return edges, True
        if acc == 0.0 and contrib == 0.0 and len(edges) > 3:
            return edges, True
        prev = contrib
        width *= 2.0
    return edges, False


def integrate_halfline(f, a=0.0, cfg=DEFAULT_CONFIG, scale=1.0, points=()):
    """Integral of a decaying ``f`` over ``[a, inf)``.

    The half-line is covered by panels of doubling width starting at
    ``scale``; panels stop being added once one contributes less than
    ``cfg.truncation_decay_threshold`` of the running absolute integral.
    The retained panels are then refined adaptively.

    Returns
    -------
    IntegralResult
        ``converged`` is False if the tail never decayed below the
        threshold or the subdivision limit was reached.
    """
    edges, truncated = halfline_edges(f, a, cfg, scale)
    inner = [p for p in points if a < p < edges[-1]]
    edges = sorted(set(edges) | set(inner))
    res = _adaptive(f, edges, cfg, evaluations=15 * len(edges))
    return IntegralResult(res.value, res.error_estimate, res.evaluations, res.converged and truncated)


@dataclass(frozen=True)
class LimitResult:
    """Extrapolated limit with an error estimate and a divergence flag."""

    value: complex
    error_estimate: float
    diverged: bool


def boundary_limit(g, steps):
    """Extrapolate ``lim_{eps -> 0+} g(eps)`` from samples at ``steps``.

    Uses a Neville--Richardson polynomial tableau in ``eps`` and returns
    the tableau entry whose change from its predecessor is smallest.

    Parameters
    ----------
    g : callable
        Function of a positive scalar, complex-valued.
    steps : sequence of float
        Strictly decreasing positive sample points.

    Returns
    -------
    LimitResult
        ``diverged`` is set when the raw successive differences grow.
    """
    eps = np.asarray(steps, dtype=float)
    if eps.ndim != 1 or len(eps) < 2:
        raise ValueError("need at least two steps")
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ValueError("steps must be positive and strictly decreasing")
    vals = np.array([complex(g(e)) for e in eps])
    return extrapolate_to_zero(eps, vals)


def extrapolate_to_zero(eps, vals):
    """Neville--Richardson extrapolation of samples ``vals`` at ``eps`` to 0."""
    eps = np.asarray(eps, dtype=float)
    vals = np.asarray(vals, dtype=complex)
    n = len(eps)
    table = [vals.copy()]
    best = vals[-1]
    best_err = abs(vals[-1] - vals[-2])
    for j in range(1, n):
        prev = table[-1]
        cur = np.empty(n - j, dtype=complex)
        for i in range(n - j):
            # Neville: extrapolate the polynomial through points i..i+j to 0.
            cur[i] = (eps[i] * prev[i + 1] - eps[i + j] * prev[i]) / (eps[i] - eps[i + j])
        table.append(cur)
        for i in range(1, len(cur)):
            diff = abs(cur[i] - cur[i - 1])
            if diff < best_err:
                best, best_err = cur[i], diff
        if len(cur) >= 1:
            diff = abs(cur[-1] - prev[-1])
            if diff < best_err:
                best, best_err = cur[-1], diff
    d = np.abs(np.diff(vals))
    noise = math.sqrt(_EPMACH) * max(float(np.max(np.abs(vals))), _UFLOW)
    diverged = bool(len(d) >= 2 and d[-1] > d[-2] > d[0] and d[-1] > noise)
    return LimitResult(complex(best), float(best_err), diverged)


def principal_value(f, pole, lo, hi, cfg=DEFAULT_CONFIG, scale=1.0):
    """Cauchy principal value of ``f`` over ``(lo, hi)`` with a simple pole.

    Writes ``f(t) = r/(t - pole) + smooth`` on a symmetric window
    ``[pole - h, pole + h]``. Over that window the odd pole part cancels
    exactly, so the window contributes ``int_0^h f(pole+s) + f(pole-s) ds``.
    The residue ``r`` is extracted by a limit ``s -> 0`` of
    ``s (f(pole+s) - f(pole-s)) / 2`` and used to certify that the pole is
    simple.

    Parameters
    ----------
    f : callable
        Vectorised integrand.
    pole : float
        Pole location, strictly inside ``(lo, hi)``.
    lo, hi : float
        Limits; ``hi`` may be ``numpy.inf``.
    cfg : QuadratureConfig
    scale : float
        Initial panel width for a half-line remainder.

    Returns
    -------
    IntegralResult

    Raises
    ------
    PoleNotSimpleError
        If the residue estimate does not settle or the symmetric sum blows up.
    """
    if not lo < pole < hi:
        raise ValueError("pole must lie strictly inside (lo, hi)")
    left = pole - lo
    right = hi - pole
    h = min(left, right)

    def folded(s):
        return f(pole + s) + f(pole - s)

    s_seq = h * np.logspace(-2, -7, 6)
    fp = np.array([complex(np.asarray(f(np.array([pole + s])))[0]) for s in s_seq])
    fm = np.array([complex(np.asarray(f(np.array([pole - s])))[0]) for s in s_seq])
    res_lim = extrapolate_to_zero(s_seq, s_seq * (fp - fm) / 2.0)
    # For a simple pole s*(f(pole+s) + f(pole-s)) = O(s); higher-order
    # poles make it grow as s shrinks.
    even_part = np.abs(s_seq * (fp + fm))
    roundoff = 100.0 * _EPMACH * abs(res_lim.value) * (1.0 + abs(pole)) / s_seq[-1]
    if res_lim.diverged or even_part[-1] > 2.0 * even_part[0] + roundoff:
        raise PoleNotSimpleError(f"residue estimate at t = {pole!r} did not stabilise")

    total = integrate(folded, 0.0, h, cfg)
    if right > h:
        if np.isfinite(hi):
            total = total + integrate(f, pole + h, hi, cfg)
        else:
            total = total + integrate_halfline(f, pole + h, cfg, scale=scale)
    elif left > h:
        total = total + integrate(f, lo, pole - h, cfg)
    # Cancellation of r/s against r/s near s = 0 costs ~eps*|r| per node.
    sub_err = 20.0 * _EPMACH * abs(res_lim.value) + res_lim.error_estimate * _EPMACH
    return IntegralResult(total.value, total.error_estimate + sub_err, total.evaluations, total.converged)


def _de_sum(f, level_nodes):
    t, w = level_nodes
    y = _evaluate(f, t)
    return np.sum(w * y)


def integrate_de(f, a, b=np.inf, tol=1e-13, max_level=9, t_max=None):
    """Double-exponential oracle rule.

    Tanh-sinh on finite ``[a, b]``; exp-sinh on ``[a, inf)``. Nodes are
    generated on the fly from the transformation (no stored tables).

    Returns
    -------
    IntegralResult
    """
    finite = np.isfinite(b)
    if t_max is None:
        # exp-sinh needs a longer left tail for endpoint singularities.
        t_max = 4.0 if finite else 5.0
    evaluations = 0
    prev = None
    h = 1.0
    value = 0j
    for level in range(max_level + 1):
        k = np.arange(-int(t_max / h), int(t_max / h) + 1)
        s = k * h
        if finite:
            half = 0.5 * (b - a)
            u = 0.5 * np.pi * np.sinh(s)
            x = np.tanh(u)
            w = h * 0.5 * np.pi * np.cosh(s) / np.cosh(u) ** 2 * half
            # Distance to each endpoint computed without cancellation.
            gap = 1.0 / (np.exp(u) * np.cosh(u))  # 1 - tanh(u) for u >= 0
            t = np.where(x >= 0, b - half * gap, a + half * (1.0 / (np.exp(-u) * np.cosh(u))))
            keep = (t > a) & (t < b) & (w > 0)
        else:
            x = np.exp(0.5 * np.pi * np.sinh(s))
            t = a + x
            w = h * 0.5 * np.pi * np.cosh(s) * x
            keep = np.isfinite(w) & (t > a) & np.isfinite(t)
        value = _de_sum(f, (t[keep], w[keep]))
        evaluations += int(keep.sum())
        if prev is not None and abs(value - prev) <= max(tol * abs(value), 1e-300):
            return IntegralResult(complex(value), float(abs(value - prev)), evaluations, True)
        prev = value
        h *= 0.5
    return IntegralResult(complex(value), float(abs(value - prev)), evaluations, False)
