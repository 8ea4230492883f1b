"""Spectra, resonances and scattering for a leaky line or plane with point sites.

The operator is the Laplacian in two or three dimensions with an
attractive delta interaction of strength ``alpha`` on a line (plane)
and finitely many point interactions of couplings ``beta_j``. All
computations reduce to small matrices of boundary functionals.

Main entry points
-----------------
find_eigenvalues, find_eigenvalues_3d
    Discrete spectrum below ``-alpha**2/4``.
find_resonance, find_resonance_3d
    Second-sheet poles near an embedded point level.
amplitudes
    Reflection and transmission of the guided mode.
"""

from .bs3d import find_eigenvalues_3d, find_resonance_3d
from .config import RunConfig, default_config, load_config
from .kernels import BACKEND
from .resonance2d import Pole, find_resonance
from .scattering2d import amplitudes
from .spectrum2d import find_eigenvalues
from .system import Site, SystemSpec

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Pole",
    "RunConfig",
    "Site",
    "SystemSpec",
    "amplitudes",
    "default_config",
    "find_eigenvalues",
    "find_eigenvalues_3d",
    "find_resonance",
    "find_resonance_3d",
    "load_config",
]
