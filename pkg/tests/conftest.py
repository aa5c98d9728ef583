import pytest

from ladderlab.ecc import find_small_curve


@pytest.fixture(scope="session")
def small_curve():
    """(curve, generator, prime subgroup order), generated once per session."""
    return find_small_curve()
