import pytest

from metapent import load_bundled


@pytest.fixture(scope="session")
def hospital():
    return load_bundled("hospital")


@pytest.fixture(scope="session")
def minimal():
    return load_bundled("minimal")
