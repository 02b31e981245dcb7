import numpy as np
import pytest

from subgeom import mg1, verify


@pytest.fixture(scope="session")
def rho05():
    """Embedded chain at rho = 0.5 with its stationary law, built once."""
    cfg = mg1.MG1Config.from_rho(0.5)
    k = mg1.embedded_matrix(cfg)
    pi = verify.stationary(k)
    return cfg, k, pi


@pytest.fixture(scope="session")
def tiny_kernel():
    """Hand-sized irreducible monotone kernel for coupling tests."""
    rows = np.array([
        [0.50, 0.30, 0.15, 0.05],
        [0.30, 0.40, 0.20, 0.10],
        [0.15, 0.30, 0.35, 0.20],
        [0.05, 0.20, 0.35, 0.40],
    ])
    return rows
