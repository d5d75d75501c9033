import pytest

from wayforge import scenarios


@pytest.fixture(scope="session")
def straight_scenario():
    return scenarios.load_bundled("straight")


@pytest.fixture(scope="session")
def corridor_scenario():
    return scenarios.load_bundled("corridor")


@pytest.fixture(scope="session")
def cluttered_scenario():
    return scenarios.load_bundled("cluttered")


@pytest.fixture(scope="session")
def tiny_scenario():
    return scenarios.load_bundled("tiny")
