import pytest

from cachenet import default_cache_economics, default_network_params


@pytest.fixture
def params():
    """Reference physical-layer scenario."""
    return default_network_params()


@pytest.fixture
def econ():
    """Reference economics scenario (budget 1 $/m^2)."""
    return default_cache_economics()
