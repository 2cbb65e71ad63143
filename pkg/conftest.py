"""Shared fixtures; also puts the project root on sys.path so `import src` works."""

import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.accinfo import OptimizerConfig  # noqa: E402
from src.ensembles import BinaryEnsemble, DensityMatrix, pure_state  # noqa: E402


@pytest.fixture
def fast_config():
    """Small optimizer budget for tests that only need a good estimate."""
    return OptimizerConfig(restarts=3, max_iterations=80, step_tolerance=1e-6, value_tolerance=1e-12, seed=3)


@pytest.fixture
def orthogonal_pair():
    return BinaryEnsemble(0.5, pure_state([1.0, 0.0]), pure_state([0.0, 1.0]))


@pytest.fixture
def maximally_mixed_qubit():
    return DensityMatrix(np.eye(2) / 2.0)
