"""
Shared fixtures for the simulator test suites
"""

# Fix Python path to allow imports from parent directory
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from core.building_state import BuildingParams
from schemes.base import StateSnapshot


@pytest.fixture
def default_building():
    """100 offices, eta 0.5, R = C = 10, resource 140"""
    return BuildingParams()


@pytest.fixture
def small_building():
    return BuildingParams(n_offices=8)


@pytest.fixture
def make_snapshot():
    """Factory building a StateSnapshot from plain lists"""
    def _make(temperatures, setpoints=20.0, controls=1.0, interval=0):
        temperatures = np.asarray(temperatures, dtype=float)
        n = temperatures.size
        setpoints = np.broadcast_to(np.asarray(setpoints, dtype=float), (n,)).copy()
        controls = np.broadcast_to(np.asarray(controls, dtype=float), (n,)).copy()
        return StateSnapshot(interval=interval, temperatures=temperatures,
                             setpoints=setpoints, controls=controls)
    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
