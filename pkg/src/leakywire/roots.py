"""Real root bracketing for symmetric matrix pencils ``D(kappa)``.

Roots of ``det D(kappa)`` on ``(kappa_thr, inf)`` are located through the
inertia of the real symmetric matrix: each sorted eigenvalue of ``D`` is a
continuous function of ``kappa``, and a root of the determinant is a zero
of one of them. Degenerate roots (several eigenvalues vanishing at the same
``kappa``) are therefore counted with their multiplicity, which a sign
change of the determinant alone would miss.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq


class RootCountError(RuntimeError):
    """The number of roots violates the guaranteed bounds."""


@dataclass(frozen=True)
class Root:
    """A refined root ``kappa`` of ``det D``.

    Attributes
    ----------
    kappa : float
    residual : float
        ``|det D(kappa)|``.
    bracket : tuple of float
        Final bracket from the safeguarded secant (Brent) refinement.
    multiplicity : int
    near_threshold : bool
        Root lies closer to the threshold than the scan can resolve; the
        bracket then starts at the threshold itself.
    """

    kappa: float
    residual: float
    bracket: tuple
    multiplicity: int = 1
    near_threshold: bool = False


@dataclass(frozen=True)
class SpectralResult:
    """Discrete spectrum below the threshold ``-alpha**2/4``.

    Attributes
    ----------
    roots : list of Root
        Sorted by increasing ``kappa`` (so by decreasing energy).
    energies : list of float
        ``-kappa**2`` per root, same order.
    embedded : list of dict
        Embedded eigenvalues (energy in ``(-alpha**2/4, 0)``) with provenance.
    count_bounds : tuple of int
        ``(1, n)``.
    """

    roots: list
    energies: list
    embedded: list = field(default_factory=list)
    count_bounds: tuple = (1, 1)

    @property
    def kappas(self):
        return [r.kappa for r in self.roots]

    @property
    def count(self):
        return sum(r.multiplicity for r in self.roots)


def scan_grid(kappa_thr, kappa_max, near_points=40, ratio=1.05):
    """Grid with geometric offsets from the threshold, then ratio ``ratio``.

    Offsets run from ``1e-9 * kappa_thr`` to ``(ratio - 1) * kappa_thr``;
    beyond that the grid is geometric in ``kappa`` itself.
    """
    near = kappa_thr * (1.0 + np.geomspace(1e-9, ratio - 1.0, near_points))
    far = [near[-1]]
    while far[-1] < kappa_max:
        far.append(far[-1] * ratio)
    return np.concatenate([near, far[1:]])


def _sorted_eigs(matrix_fn, kappa):
    m = np.asarray(matrix_fn(kappa), dtype=float)
    return np.linalg.eigvalsh(m)


def find_matrix_roots(matrix_fn, kappa_thr, kappa_max, n, tol=1e-10, grid=None, merge_rtol=1e-9):
    """All roots of ``det D(kappa)`` on ``(kappa_thr, kappa_max]``.

    Parameters
    ----------
    matrix_fn : callable
        ``kappa -> (n, n)`` real symmetric matrix.
    kappa_thr : float
        Excluded left end (threshold).
    kappa_max : float
        Upper end; extended by doubling until ``D`` is positive definite.
    n : int
        Matrix size.
    tol : float
        Residual target for ``|det D|`` (informational; near-threshold
        roots may not reach it at double precision).

    Returns
    -------
    list of Root

    Raises
    ------
    RootCountError
        If the count is outside ``[1, n]``.
    """
    while np.min(_sorted_eigs(matrix_fn, kappa_max)) <= 0:
        kappa_max *= 2.0
    if grid is None:
        grid = scan_grid(kappa_thr, kappa_max)
    grid = grid[grid <= kappa_max * 1.0000001]
    eigs = np.array([_sorted_eigs(matrix_fn, k) for k in grid])
    found = []
    for i in range(len(grid) - 1):
        lo, hi = grid[i], grid[i + 1]
        for idx in range(n):
            if (eigs[i, idx] < 0) != (eigs[i + 1, idx] < 0):
                found.append((lo, hi, idx))
    roots = []
    for lo, hi, idx in found:

        def g(k, idx=idx):
            return _sorted_eigs(matrix_fn, k)[idx]

        k = brentq(g, lo, hi, xtol=4 * np.finfo(float).eps * hi, rtol=4 * np.finfo(float).eps)
        resid = abs(float(np.linalg.det(matrix_fn(k))))
        roots.append(Root(float(k), resid, (float(lo), float(hi))))
    # A root below the first grid point shows up as a missing negative
    # eigenvalue there: at threshold exactly one eigenvalue diverges to -inf.
    n_neg_first = int(np.sum(eigs[0] < 0))
    if n_neg_first == 0:
        k_mid = 0.5 * (kappa_thr + grid[0])
        roots.append(
            Root(float(k_mid), abs(float(np.linalg.det(matrix_fn(grid[0])))), (float(kappa_thr), float(grid[0])), 1, True)
        )
    roots.sort(key=lambda r: r.kappa)
    merged = []
    for r in roots:
        if merged and abs(r.kappa - merged[-1].kappa) <= merge_rtol * r.kappa:
            prev = merged[-1]
            merged[-1] = Root(prev.kappa, prev.residual, prev.bracket, prev.multiplicity + 1, prev.near_threshold)
        else:
            merged.append(r)
    count = sum(r.multiplicity for r in merged)
    if not 1 <= count <= n:
        raise RootCountError(f"found {count} roots, expected between 1 and {n}")
    return merged


def kappa_for_diagonal(value_fn, target, lo, hi):
    """Solve ``value_fn(kappa) = target`` for an increasing ``value_fn``."""
    while value_fn(hi) < target:
        hi *= 2.0
    while value_fn(lo) > target:
        lo *= 0.5
    return brentq(lambda k: value_fn(k) - target, lo, hi, xtol=1e-15 * hi)
