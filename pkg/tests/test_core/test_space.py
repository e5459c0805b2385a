# tests/test_core/test_space.py

import math

import numpy as np
import pytest

from src.mmebench.core.space import SpaceDescriptor, StateVector, ensure_finite, inner, trapezoid_weights
from src.mmebench.exceptions import ContractViolationError, NumericalOverflowError


def test_inner_unit_weights():
    """Unit weights reduce to the Euclidean dot product."""
    space = SpaceDescriptor.uniform(2)
    assert inner(space, StateVector(space, [1.0, 2.0]), StateVector(space, [3.0, 4.0])) == 11.0


def test_inner_with_zero_vector():
    """Anything paired with the zero vector gives zero."""
    space = SpaceDescriptor.uniform(3)
    u = StateVector(space, [1.5, -2.0, 7.0])
    assert inner(space, u, StateVector.zeros(space)) == 0.0


def test_inner_trapezoid_integrates_constant():
    """Trapezoid weights on three nodes with h=1 integrate the constant one to 2."""
    space = SpaceDescriptor(dim=3, weights=trapezoid_weights(3, 1.0))
    ones = StateVector.full(space, 1.0)
    assert inner(space, ones, ones) == pytest.approx(2.0)
    np.testing.assert_allclose(space.weights, [0.5, 1.0, 0.5])


def test_inner_symmetric_and_bilinear(rng):
    """<u, v> = <v, u> and linearity in the first slot."""
    space = SpaceDescriptor.trapezoid((5, 4), (0.25, 1 / 3))
    u, v, w = (StateVector(space, rng.standard_normal(space.dim)) for _ in range(3))
    assert inner(space, u, v) == pytest.approx(inner(space, v, u))
    assert inner(space, u * 2.0 + w, v) == pytest.approx(2.0 * inner(space, u, v) + inner(space, w, v))


def test_compensated_summation_agrees(rng):
    """fsum accumulation matches the plain dot product to round-off."""
    space = SpaceDescriptor.uniform(1000)
    u = StateVector(space, rng.standard_normal(1000))
    plain = inner(space, u, u, compensated=False)
    assert inner(space, u, u, compensated=True) == pytest.approx(plain, rel=1e-12)


def test_inner_rejects_foreign_vector():
    """A vector of another space is a contract violation."""
    space = SpaceDescriptor.uniform(2, label="a")
    other = SpaceDescriptor.uniform(3, label="b")
    with pytest.raises(ContractViolationError):
        inner(space, StateVector.zeros(space), StateVector.zeros(other))


def test_spaces_compare_by_weights():
    """Two descriptors with equal label, dimension and weights are the same space."""
    a = SpaceDescriptor.uniform(4, label="grid")
    b = SpaceDescriptor.uniform(4, label="grid")
    assert a == b
    assert (StateVector.full(a, 1.0) + StateVector.full(b, 2.0)).values.tolist() == [3.0] * 4


def test_descriptor_rejects_nonpositive_weights():
    """Weights must be strictly positive."""
    with pytest.raises(ContractViolationError):
        SpaceDescriptor(dim=2, weights=np.array([1.0, 0.0]))


def test_descriptor_rejects_bad_shape():
    """The logical grid shape has to hold exactly dim values."""
    with pytest.raises(ContractViolationError):
        SpaceDescriptor(dim=6, weights=np.ones(6), shape=(2, 2))


def test_trapezoid_descriptor_shape_and_total_weight():
    """Tensor trapezoid weights on the unit square sum to its area."""
    space = SpaceDescriptor.trapezoid((11, 6), (0.1, 0.2), label="square")
    assert space.shape == (11, 6)
    assert space.weights.sum() == pytest.approx(1.0)
    assert StateVector.zeros(space).as_grid().shape == (11, 6)


def test_state_vector_is_read_only():
    """Values are frozen after construction."""
    space = SpaceDescriptor.uniform(2)
    vector = StateVector(space, [1.0, 2.0])
    with pytest.raises(ValueError):
        vector.values[0] = 5.0


def test_state_vector_arithmetic():
    """axpy, scaling and negation act on the values."""
    space = SpaceDescriptor.uniform(2)
    x = StateVector(space, [1.0, 2.0])
    y = StateVector(space, [3.0, -1.0])
    assert x.axpy(2.0, y).values.tolist() == [7.0, 0.0]
    assert (-x / 2.0).values.tolist() == [-0.5, -1.0]
    assert (3 * x).values.tolist() == [3.0, 6.0]


def test_random_unit_has_unit_weighted_norm(rng):
    """random_unit normalizes in the space's own norm."""
    space = SpaceDescriptor.trapezoid((9,), (0.125,))
    vector = StateVector.random_unit(space, rng)
    assert vector.norm() == pytest.approx(1.0)
    assert vector.euclidean_norm() != pytest.approx(1.0)


def test_norm_matches_inner():
    """The norm is the square root of the self inner product."""
    space = SpaceDescriptor.uniform(2, weight=0.5)
    vector = StateVector(space, [3.0, 4.0])
    assert vector.norm() == pytest.approx(math.sqrt(12.5))


def test_arithmetic_overflow_raises(plane):
    """A sum that overflows to inf is rejected instead of producing a non-finite vector."""
    big = StateVector.full(plane, 1e308)
    with pytest.raises(NumericalOverflowError):
        big + big
    with pytest.raises(NumericalOverflowError):
        big.axpy(10.0, big)


def test_division_by_zero_raises(plane):
    """Scaling by 1/0 raises NumericalOverflowError."""
    with pytest.raises(NumericalOverflowError):
        StateVector(plane, [1.0, 0.0]) / 0.0


def test_ensure_finite(plane):
    """Finite vectors pass through unchanged; NaN entries raise with the term index."""
    vector = StateVector(plane, [1.0, 2.0])
    assert ensure_finite(vector, "iterate") is vector
    with pytest.raises(NumericalOverflowError) as excinfo:
        ensure_finite(StateVector(plane, [np.nan, 0.0]), "gradient", 3)
    assert excinfo.value.term_index == 3
    assert "gradient" in str(excinfo.value)
