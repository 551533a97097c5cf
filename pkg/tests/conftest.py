"""Shared fixtures and the ``--runslow`` switch."""

import numpy as np
import pytest

from arnlab.data.pendulum import gen_double_pendulum
from arnlab.data.preprocess import preprocess
from arnlab.data.split import split


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run desk-scale acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def pendulum_raw():
    """A small raw pendulum dataset: 16 series of 8 steps."""
    return gen_double_pendulum(16, 8, seed=3)


@pytest.fixture(scope="session")
def pendulum_split(pendulum_raw):
    return preprocess(split(pendulum_raw, seed=0))
