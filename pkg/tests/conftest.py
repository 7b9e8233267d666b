import pytest

from momentlab.eigenforms import delta_coefficients


@pytest.fixture(scope="session")
def delta_small():
    """Coefficient table large enough for AFE work at q <= 13."""
    return delta_coefficients(40_000)


@pytest.fixture(scope="session")
def delta_mid():
    """Table covering moment sweeps to q = 300 and L(1, f)."""
    return delta_coefficients(750_000)


@pytest.fixture(scope="session")
def delta_large():
    """Table covering the full Voronoi acceptance grid."""
    return delta_coefficients(2_200_000)
