"""
Shared pytest fixtures for lorentz-lab
"""

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator, fresh for every test"""
    return np.random.default_rng(20240611)
