# src/mmebench/core/space.py
"""
Discretized Hilbert spaces and their elements.

A SpaceDescriptor carries the quadrature weights that define the inner
product; a StateVector is a flat float64 array tied to one descriptor.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ..config import config
from ..exceptions import ContractViolationError, NumericalOverflowError

logger = logging.getLogger(__name__)


def trapezoid_weights(count: int, spacing: float) -> np.ndarray:
    """Composite trapezoid weights on `count` equispaced nodes."""
    if count < 1:
        raise ContractViolationError(f"trapezoid rule needs at least one node, got {count}")
    weights = np.full(count, spacing, dtype=np.float64)
    if count > 1:
        weights[0] *= 0.5
        weights[-1] *= 0.5
    return weights


@dataclass(frozen=True, eq=False)
class SpaceDescriptor:
    """
    Weighted Euclidean space R^dim with <u, v> = sum(weights * u * v).

    `shape` is the logical grid shape used for reshaping and export; its
    product must equal `dim`.
    """
    dim: int
    weights: np.ndarray
    label: str = "space"
    shape: tuple = ()
    spacing: tuple = ()

    def __post_init__(self):
        weights = np.ascontiguousarray(self.weights, dtype=np.float64).ravel()
        if self.dim < 1:
            raise ContractViolationError(f"space dimension must be positive, got {self.dim}")
        if weights.shape[0] != self.dim:
            raise ContractViolationError(
                f"{self.label}: expected {self.dim} weights, got {weights.shape[0]}"
            )
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
            raise ContractViolationError(f"{self.label}: weights must be finite and strictly positive")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        shape = tuple(int(n) for n in self.shape) if self.shape else (self.dim,)
        if int(np.prod(shape)) != self.dim:
            raise ContractViolationError(f"{self.label}: shape {shape} does not hold {self.dim} values")
        object.__setattr__(self, "shape", shape)

    @classmethod
    def uniform(cls, dim: int, label: str = "euclidean", weight: float = 1.0) -> "SpaceDescriptor":
        return cls(dim=dim, weights=np.full(dim, weight), label=label)

    @classmethod
    def trapezoid(cls, counts: Sequence[int], spacings: Sequence[float],
                  label: str = "grid") -> "SpaceDescriptor":
        """Tensor-product trapezoid weights over a uniform grid (boundary nodes included)."""
        if len(counts) != len(spacings):
            raise ContractViolationError("counts and spacings must have the same length")
        weights = np.ones(1)
        for count, spacing in zip(counts, spacings):
            weights = np.multiply.outer(weights, trapezoid_weights(count, spacing))
        counts = tuple(int(c) for c in counts)
        return cls(dim=int(np.prod(counts)), weights=weights.ravel(), label=label,
                   shape=counts, spacing=tuple(float(s) for s in spacings))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, SpaceDescriptor):
            return NotImplemented
        return (self.dim == other.dim and self.label == other.label
                and np.array_equal(self.weights, other.weights))

    def __hash__(self) -> int:
        return hash((self.dim, self.label))

    def check(self, vector: "StateVector", role: str = "vector") -> None:
        if vector.space is not self and vector.space != self:
            raise ContractViolationError(
                f"{role} belongs to '{vector.space.label}' (dim {vector.space.dim}), "
                f"expected '{self.label}' (dim {self.dim})"
            )


@dataclass(frozen=True, eq=False)
class StateVector:
    """An element of a SpaceDescriptor; values are read-only float64.

    Arithmetic results are checked: a non-finite sum, difference or scaled
    vector raises NumericalOverflowError.
    """
    space: SpaceDescriptor
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True).ravel()
        if values.shape[0] != self.space.dim:
            raise ContractViolationError(
                f"'{self.space.label}' expects {self.space.dim} values, got {values.shape[0]}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, space: SpaceDescriptor) -> "StateVector":
        return cls(space, np.zeros(space.dim))

    @classmethod
    def full(cls, space: SpaceDescriptor, value: float) -> "StateVector":
        return cls(space, np.full(space.dim, float(value)))

    @classmethod
    def random_unit(cls, space: SpaceDescriptor, rng: np.random.Generator) -> "StateVector":
        """Gaussian direction normalized in the space's norm; never the zero vector."""
        while True:
            values = rng.standard_normal(space.dim)
            length = math.sqrt(float(np.dot(space.weights * values, values)))
            if length > 0.0:
                return cls(space, values / length)

    def as_grid(self) -> np.ndarray:
        return self.values.reshape(self.space.shape)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def norm(self) -> float:
        return math.sqrt(max(inner(self.space, self, self), 0.0))

    def euclidean_norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def _coerce(self, other: "StateVector") -> np.ndarray:
        self.space.check(other, "operand")
        return other.values

    def _result(self, values: np.ndarray, what: str) -> "StateVector":
        return ensure_finite(StateVector(self.space, values), what)

    def __add__(self, other: "StateVector") -> "StateVector":
        return self._result(self.values + self._coerce(other), "sum")

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self._result(self.values - self._coerce(other), "difference")

    def __mul__(self, scalar: Union[int, float]) -> "StateVector":
        return self._result(self.values * float(scalar), "scaled vector")

    __rmul__ = __mul__

    def __truediv__(self, scalar: Union[int, float]) -> "StateVector":
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            values = self.values / float(scalar)
        return self._result(values, "scaled vector")

    def __neg__(self) -> "StateVector":
        return StateVector(self.space, -self.values)

    def axpy(self, alpha: float, other: "StateVector") -> "StateVector":
        """self + alpha * other."""
        return self._result(self.values + float(alpha) * self._coerce(other), "axpy")


def inner(space: SpaceDescriptor, u: StateVector, v: StateVector,
          compensated: Optional[bool] = None) -> float:
    """
    Weighted inner product sum_i w_i u_i v_i.

    Args:
        space: Space both vectors must belong to.
        u, v: Operands.
        compensated: Use math.fsum accumulation; defaults to
            MMEBENCH_COMPENSATED_SUMMATION.

    Raises:
        ContractViolationError: If either vector belongs to another space.
    """
    space.check(u, "left operand")
    space.check(v, "right operand")
    return inner_values(space.weights, u.values, v.values, compensated)


def inner_values(weights: np.ndarray, u: np.ndarray, v: np.ndarray,
                 compensated: Optional[bool] = None) -> float:
    """Array-level inner product used on hot paths after space checks."""
    if compensated is None:
        compensated = config.COMPENSATED_SUMMATION
    if compensated:
        return math.fsum((weights * u * v).tolist())
    return float(np.dot(weights * u, v))


def ensure_finite(vector: StateVector, what: str, term_index: Optional[int] = None) -> StateVector:
    """Return `vector` unchanged, or raise NumericalOverflowError naming `what`."""
    if not vector.is_finite():
        logger.error(f"Non-finite values in {what}")
        raise NumericalOverflowError(f"non-finite values in {what}", term_index)
    return vector
