import sys
from pathlib import Path

import numpy as np
import pytest

# make the oracle helpers importable as a plain module
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def E12():
    E = np.zeros((2, 2), dtype=complex)
    E[0, 1] = 1
    return E
