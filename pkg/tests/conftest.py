"""
Shared fixtures: the bundled scenarios and a seeded generator.
"""
import os
import sys

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.gains import Gains  # noqa: E402
from models.scenario import bundled_scenario  # noqa: E402
from models.state import SystemState  # noqa: E402


@pytest.fixture(scope="session")
def reference():
    return bundled_scenario("reference")


@pytest.fixture(scope="session")
def params(reference):
    return reference.params


@pytest.fixture
def gains():
    return Gains()


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def hover():
    return SystemState.hover()
