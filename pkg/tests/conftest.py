import pytest

from lru_design import build_instance, compute_successor_sets, fixture


@pytest.fixture(scope="session")
def laptop():
    return fixture("laptop")


@pytest.fixture(scope="session")
def laptop_closures(laptop):
    return compute_successor_sets(laptop)


@pytest.fixture(scope="session")
def chain():
    return fixture("chain")


@pytest.fixture(scope="session")
def two_path():
    # single connection of weight 10 between two identical parts
    return build_instance(
        vertices=[("1", 1.0, 0.1), ("2", 1.0, 0.1)],
        edges=[("1", "2", 10.0)],
    )
