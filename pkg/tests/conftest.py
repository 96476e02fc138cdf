from __future__ import annotations

import pytest

from autodo.catalog.seeds import seed_spec


@pytest.fixture(scope="session")
def gridworld():
    return seed_spec("gridworld")


@pytest.fixture(scope="session")
def bakery():
    return seed_spec("bakery")


@pytest.fixture(scope="session")
def produce():
    return seed_spec("produce_arrangement")


@pytest.fixture(scope="session")
def maintenance():
    return seed_spec("machine_maintenance")
