import pytest

from cubic_tunneling import derive_params


@pytest.fixture(scope="session")
def bench():
    """1000 electron masses, 20 meV, barrier at 1 Angstrom."""
    return derive_params(1000.0, 20.0, 1.0)


@pytest.fixture(scope="session")
def bench10():
    return derive_params(1000.0, 10.0, 1.0)
