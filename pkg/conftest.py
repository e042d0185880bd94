"""
Shared pytest fixtures
"""
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config.solver_config import SolverConfig  # noqa: E402
from processors.schedule import Instance, Order  # noqa: E402
from services.instance_generator import GenSpec, generate  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running experiment-style checks")


def build_instance(rows, setup=None, initial_setup=False, label="hand"):
    """rows: (release, processing, due, deadline, revenue, weight) per order, ids 1..n"""
    n = len(rows)
    orders = tuple(Order(i + 1, *row) for i, row in enumerate(rows))
    if setup is None:
        setup = np.zeros((n + 1, n + 1))
    elif np.isscalar(setup):
        setup = np.full((n + 1, n + 1), float(setup))
    return Instance(orders=orders, setup=np.asarray(setup, dtype=float),
                    initial_setup_enabled=initial_setup, label=label)


@pytest.fixture
def make_instance():
    return build_instance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_generated():
    return generate(GenSpec(n=6, tau=0.5, R=0.5, seed=7))


@pytest.fixture
def medium_generated():
    return generate(GenSpec(n=15, tau=0.3, R=0.5, seed=11))


@pytest.fixture
def generated_batch():
    return [
        generate(GenSpec(n=n, tau=tau, R=R, seed=3, replicate=i))
        for i, (n, tau, R) in enumerate([(5, 0.1, 0.5), (6, 0.5, 0.5), (7, 0.9, 0.1),
                                          (8, 0.3, 0.9), (10, 0.5, 0.1), (10, 0.1, 0.9)])
    ]


@pytest.fixture
def quick_config():
    return SolverConfig(population_size=6, max_iterations=25, max_no_improve=8, parameter_set=None)
