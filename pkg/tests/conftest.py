# tests/conftest.py

import numpy as np
import pytest

from src.mmebench.core.operators import AffineForwardOperator
from src.mmebench.core.problem import QuadraticProblem
from src.mmebench.core.space import SpaceDescriptor, StateVector


@pytest.fixture
def rng():
    """Seeded generator so every randomized test is reproducible."""
    return np.random.default_rng(12345)


@pytest.fixture
def plane():
    """R^2 with unit weights."""
    return SpaceDescriptor.uniform(2, label="plane")


@pytest.fixture
def identity_problem(plane):
    """A0 = identity, f = 0, q* = 0 on R^2."""
    op = AffineForwardOperator.identity(plane)
    return QuadraticProblem.single(op, StateVector.zeros(plane), exact_solution=StateVector.zeros(plane),
                                   label="identity")


@pytest.fixture
def diagonal_problem(plane):
    """A0 = diag(1, 0.5), f = 0, q* = 0; the small worked instance used across the optimizer tests."""
    op = AffineForwardOperator.diagonal(plane, [1.0, 0.5])
    return QuadraticProblem.single(op, StateVector.zeros(plane), exact_solution=StateVector.zeros(plane),
                                   lipschitz_estimate=1.0, label="diag(1,0.5)")

