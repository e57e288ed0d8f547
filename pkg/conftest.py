"""Shared fixtures for the antenna-count test suite."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from antenna_count.config import MMWAVE_CARRIER, PCS_CARRIER, ScenarioConfig  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical runs with thousands of Monte-Carlo trials")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def pcs_config():
    return ScenarioConfig(carrier_frequency=PCS_CARRIER)


@pytest.fixture
def mmwave_config():
    return ScenarioConfig(carrier_frequency=MMWAVE_CARRIER)


@pytest.fixture
def small_config():
    """Cheap PCS scenario for fast end-to-end checks."""
    return ScenarioConfig(carrier_frequency=PCS_CARRIER, M=32, K=4, n_trials=40, search_trials=20)


@pytest.fixture
def random_channel(rng):
    """Factory for i.i.d. complex Gaussian (M, K) matrices."""

    def make(M, K):
        return (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))) / np.sqrt(2)

    return make
