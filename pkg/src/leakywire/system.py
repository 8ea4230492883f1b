"""Geometry, couplings and sheet-labelled energies shared by all solvers."""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np


class ConfigurationError(ValueError):
    """Invalid system description (bad geometry or coupling)."""


@dataclass(frozen=True)
class Site:
    """A point interaction.

    Parameters
    ----------
    position : tuple of float
        ``(l, a)`` in 2D or ``(x1, x2, a)`` in 3D; the last coordinate is
        the signed distance from the line/plane, which must be nonzero.
    beta : float
        Point coupling (dimensionless).
    """

    position: tuple
    beta: float

    @property
    def depth(self):
        """Unsigned distance to the line/plane."""
        return abs(self.position[-1])

    @property
    def along(self):
        """Coordinates parallel to the line/plane."""
        return tuple(self.position[:-1])


@dataclass(frozen=True)
class SystemSpec:
    """Line (2D) or plane (3D) of strength ``alpha`` plus point sites.

    Parameters
    ----------
    dimension : {2, 3}
    alpha : float
        Line/plane coupling strength, ``> 0`` (inverse length).
    sites : tuple of Site
        At least one site; none on the line/plane; pairwise distinct.

    Raises
    ------
    ConfigurationError
        On any invariant violation; the message names the offending site.
    """

    dimension: int
    alpha: float
    sites: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        if self.dimension not in (2, 3):
            raise ConfigurationError(f"dimension must be 2 or 3, got {self.dimension!r}")
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigurationError(f"alpha must be a positive number, got {self.alpha!r}")
        if not self.sites:
            raise ConfigurationError("at least one site is required")
        for i, s in enumerate(self.sites):
            if len(s.position) != self.dimension:
                raise ConfigurationError(
                    f"site {i}: position needs {self.dimension} coordinates, got {len(s.position)}"
                )
            if not all(math.isfinite(c) for c in s.position) or not math.isfinite(s.beta):
                raise ConfigurationError(f"site {i}: coordinates and beta must be finite")
            if s.position[-1] == 0:
                raise ConfigurationError(f"site {i}: lies on the interaction support (transverse coordinate 0)")
        pos = [tuple(s.position) for s in self.sites]
        for i in range(len(pos)):
            for j in range(i):
                if pos[i] == pos[j]:
                    raise ConfigurationError(f"site {i}: coincides with site {j}")

    @property
    def n(self):
        return len(self.sites)

    @property
    def betas(self):
        return np.array([s.beta for s in self.sites])

    def distance(self, j, k):
        """Euclidean distance between sites ``j`` and ``k``."""
        return math.dist(self.sites[j].position, self.sites[k].position)

    def threshold(self):
        """Bottom of the essential spectrum, ``-alpha**2/4``."""
        return -0.25 * self.alpha**2

    @classmethod
    def single(cls, alpha, beta, a, dimension=2):
        """One site at transverse distance ``a`` above the origin."""
        pos = (0.0,) * (dimension - 1) + (float(a),)
        return cls(dimension, float(alpha), (Site(pos, float(beta)),))

    @classmethod
    def mirror_pair(cls, alpha, beta, a, delta=0.0, beta2=None, dimension=2):
        """Sites at ``a`` and ``-(a + delta)`` on the same normal."""
        zero = (0.0,) * (dimension - 1)
        b2 = beta if beta2 is None else beta2
        return cls(
            dimension,
            float(alpha),
            (Site(zero + (float(a),), float(beta)), Site(zero + (-float(a) - float(delta),), float(b2))),
        )


class Sheet(Enum):
    """Where a complex energy lives in the continuation domain."""

    UPPER = "upper"
    INTERVAL = "interval"
    LOWER_SECOND = "lower_second"


@dataclass(frozen=True)
class OmegaMinus:
    """Strip in the lower half-plane used as the second-sheet region.

    ``Re z`` in ``(-alpha**2/4 + edge, -edge)`` and ``Im z`` in
    ``(-depth_fraction * alpha**2, 0)``.
    """

    alpha: float
    edge: float = 1e-8
    depth_fraction: float = 0.125

    def contains(self, z):
        lo = -0.25 * self.alpha**2 + self.edge
        return lo < z.real < -self.edge and -self.depth_fraction * self.alpha**2 < z.imag < 0

    def distance_to_boundary(self, z):
        lo = -0.25 * self.alpha**2 + self.edge
        return min(z.real - lo, -self.edge - z.real, z.imag + self.depth_fraction * self.alpha**2, -z.imag)


@dataclass(frozen=True)
class SheetPoint:
    """A complex energy with its sheet label.

    Use :meth:`classify` to build one with a consistent label.
    """

    z: complex
    sheet: Sheet

    @classmethod
    def classify(cls, z, alpha):
        """Label ``z``: upper for ``Im z > 0``, second sheet for ``Im z < 0``,
        interval for real ``z`` strictly inside ``(-alpha**2/4, 0)``.

        Real ``z < -alpha**2/4`` is the first-sheet boundary value and is
        labelled ``UPPER``.
        """
        z = complex(z)
        if z.imag > 0:
            return cls(z, Sheet.UPPER)
        if z.imag < 0:
            return cls(z, Sheet.LOWER_SECOND)
        thr = -0.25 * alpha**2
        if thr < z.real < 0:
            return cls(z, Sheet.INTERVAL)
        if z.real < thr:
            return cls(z, Sheet.UPPER)
        raise ValueError(f"z = {z} lies on a branch point or the open-channel cut [0, inf)")

    def validate(self, alpha):
        """Raise ``ValueError`` if the label contradicts the location."""
        expected = SheetPoint.classify(self.z, alpha).sheet
        if expected is not self.sheet:
            raise ValueError(f"sheet mismatch: z = {self.z} is {expected.value}, tagged {self.sheet.value}")
