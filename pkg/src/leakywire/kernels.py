"""Backend selection for the hot numerical kernels.

The compiled extension ``leakywire._kernels`` is used when it can be
imported; otherwise the NumPy implementation in
``leakywire._kernels_py`` is used. Setting the environment variable
``LEAKYWIRE_PURE_PYTHON=1`` forces the NumPy backend.

Attributes
----------
BACKEND : str
    ``"cython"`` or ``"python"``.
"""

import os

from . import _kernels_py

_FORCE_PY = os.environ.get("LEAKYWIRE_PURE_PYTHON", "").strip() not in ("", "0")

if _FORCE_PY:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

bessel_k01 = _impl.bessel_k01
line_integrand = _impl.line_integrand
continued_integrand = _impl.continued_integrand

python_backend = _kernels_py

__all__ = [
    "BACKEND",
    "bessel_k01",
    "line_integrand",
    "continued_integrand",
    "python_backend",
]
