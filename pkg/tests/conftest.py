"""Shared fixtures for the partition-rank tests."""

import random

import pytest

from partition_rank.core import path_instance
from partition_rank.epa_data import load_crt


@pytest.fixture
def rng():
    """Seeded generator; every sweep is reproducible."""
    return random.Random(20240607)


@pytest.fixture(scope="session")
def crt_tree():
    return load_crt()


@pytest.fixture
def small_path():
    """Path 3 - 1 - [2] - 4 - 1 with S* = {2}."""
    return path_instance([3, 1, 2, 4, 1], special=[2])
