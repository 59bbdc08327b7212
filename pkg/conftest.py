"""
Shared pytest fixtures: small seeded datasets and a fast dynamics setting.
"""
import numpy as np
import pytest

from core.dynamics import DynamicsConfig
from datagen.generators import gen_classification, gen_regression, gen_spiked


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def exact_dynamics():
    # step 1 lands on the fixed point of an affine field z' = a - z in one iteration
    return DynamicsConfig(step=1.0, tol=1e-12, max_iters=100)


@pytest.fixture
def regression_data():
    return gen_regression(5, 50, noise=0.1, seed=42)


@pytest.fixture
def separable_data():
    return gen_classification(2, 100, margin=0.5, seed=7)


@pytest.fixture
def spiked_data():
    return gen_spiked(6, 400, 2, 4.0, seed=3)
