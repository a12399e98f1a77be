"""
Shared fixtures: Pauli observables, basis states and small grids
"""

import numpy as np
import pytest

from config import Config, ENV_TOL_EQ, reset_default_config
from hilbert import HermitianOperator, StateVector, normalize
from surface import Grid


@pytest.fixture(autouse=True)
def default_config(monkeypatch):
    """Every test starts from the built-in tolerances"""
    monkeypatch.delenv(ENV_TOL_EQ, raising=False)
    reset_default_config()
    yield
    reset_default_config()


@pytest.fixture
def sigma_x():
    return HermitianOperator.pauli('x')


@pytest.fixture
def sigma_y():
    return HermitianOperator.pauli('y')


@pytest.fixture
def sigma_z():
    return HermitianOperator.pauli('z')


@pytest.fixture
def up():
    """(1, 0)"""
    return StateVector(np.array([1.0, 0.0]))


@pytest.fixture
def down():
    return StateVector(np.array([0.0, 1.0]))


@pytest.fixture
def plus():
    """(1, 1) / sqrt 2"""
    return normalize(np.array([1.0, 1.0]))


@pytest.fixture
def half_hbar():
    return Config(hbar=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_grid():
    return Grid.square(4.0, 17)


@pytest.fixture
def medium_grid():
    return Grid.square(4.0, 33)
