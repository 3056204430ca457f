import os

import numpy as np
import pytest

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR
