import pytest

from leakywire.quadrature import QuadratureConfig


@pytest.fixture
def tight_cfg():
    return QuadratureConfig(abs_tol=1e-15, rel_tol=1e-13)
