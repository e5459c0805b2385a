# src/mmebench/core/operators.py
"""
Affine forward operators A q = A0 q + A(0) with an exact adjoint of A0.

The linear part and its adjoint are supplied as array-level callables so
PDE solvers can work on raw numpy buffers; the public methods wrap them in
StateVectors and check spaces.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..config import config
from ..exceptions import ContractViolationError
from ..models import AdjointReport
from .space import SpaceDescriptor, StateVector, inner, inner_values

logger = logging.getLogger(__name__)

ArrayMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class AffineForwardOperator:
    domain: SpaceDescriptor
    codomain: SpaceDescriptor
    linear_map: ArrayMap = field(repr=False)
    adjoint_map: ArrayMap = field(repr=False)
    offset: Optional[StateVector] = None
    label: str = "operator"

    def __post_init__(self):
        offset = self.offset if self.offset is not None else StateVector.zeros(self.codomain)
        self.codomain.check(offset, f"{self.label} offset")
        object.__setattr__(self, "offset", offset)

    def apply_linear(self, q: StateVector) -> StateVector:
        """A0 q."""
        self.domain.check(q, f"{self.label} input")
        return StateVector(self.codomain, self._run(self.linear_map, q.values, self.codomain.dim))

    def apply_adjoint(self, p: StateVector) -> StateVector:
        """A* p, adjoint of A0 for the weighted inner products of both spaces."""
        self.codomain.check(p, f"{self.label} adjoint input")
        return StateVector(self.domain, self._run(self.adjoint_map, p.values, self.domain.dim))

    def apply(self, q: StateVector) -> StateVector:
        """A q = A0 q + A(0)."""
        return self.apply_linear(q) + self.offset

    def _run(self, fn: ArrayMap, values: np.ndarray, expected: int) -> np.ndarray:
        out = np.asarray(fn(values), dtype=np.float64).ravel()
        if out.shape[0] != expected:
            raise ContractViolationError(
                f"{self.label}: map returned {out.shape[0]} values, expected {expected}"
            )
        return out

    @classmethod
    def diagonal(cls, space: SpaceDescriptor, factors: np.ndarray,
                 offset: Optional[StateVector] = None, label: str = "diagonal") -> "AffineForwardOperator":
        """Self-adjoint multiplication operator on a single space."""
        factors = np.array(factors, dtype=np.float64, copy=True).ravel()
        if factors.shape[0] != space.dim:
            raise ContractViolationError(f"{label}: {factors.shape[0]} factors for dim {space.dim}")
        factors.setflags(write=False)
        return cls(domain=space, codomain=space, linear_map=lambda v: factors * v,
                   adjoint_map=lambda v: factors * v, offset=offset, label=label)

    @classmethod
    def identity(cls, space: SpaceDescriptor, label: str = "identity") -> "AffineForwardOperator":
        return cls(domain=space, codomain=space, linear_map=lambda v: v.copy(),
                   adjoint_map=lambda v: v.copy(), label=label)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, domain: SpaceDescriptor, codomain: SpaceDescriptor,
                    offset: Optional[StateVector] = None, label: str = "matrix") -> "AffineForwardOperator":
        """
        Dense operator; the adjoint honours both weightings:
        A* = W_dom^{-1} M^T W_cod.
        """
        matrix = np.array(matrix, dtype=np.float64, copy=True)
        if matrix.shape != (codomain.dim, domain.dim):
            raise ContractViolationError(
                f"{label}: matrix shape {matrix.shape} != ({codomain.dim}, {domain.dim})"
            )
        matrix.setflags(write=False)
        w_dom = domain.weights
        w_cod = codomain.weights
        return cls(domain=domain, codomain=codomain,
                   linear_map=lambda v: matrix @ v,
                   adjoint_map=lambda p: (matrix.T @ (w_cod * p)) / w_dom,
                   offset=offset, label=label)


def verify_adjoint(op: AffineForwardOperator, trials: Optional[int] = None,
                   tol: float = 1e-10, rng: Optional[np.random.Generator] = None) -> AdjointReport:
    """
    Randomized check of <A0 q, p> = <q, A* p>.

    The defect of each probe is scaled by max(|A0 q| |p|, |q| |A* p|) so the
    report is meaningful for operators of any magnitude.
    """
    trials = config.ADJOINT_TRIALS if trials is None else trials
    if trials < 1:
        raise ContractViolationError(f"verify_adjoint needs trials >= 1, got {trials}")
    rng = rng if rng is not None else np.random.default_rng(config.SEED)

    worst = 0.0
    for _ in range(trials):
        q = StateVector.random_unit(op.domain, rng)
        p = StateVector.random_unit(op.codomain, rng)
        a_q = op.apply_linear(q)
        a_star_p = op.apply_adjoint(p)
        lhs = inner(op.codomain, a_q, p)
        rhs = inner(op.domain, q, a_star_p)
        scale = max(a_q.norm(), a_star_p.norm())
        defect = abs(lhs - rhs) / scale if scale > 0.0 else abs(lhs - rhs)
        worst = max(worst, defect)

    passed = bool(worst <= tol)
    log = logger.info if passed else logger.warning
    log(f"Adjoint check for {op.label}: max defect {worst:.3e} over {trials} trials (tol {tol:.1e})")
    return AdjointReport(label=op.label, trials=trials, max_defect=worst, tol=tol, passed=passed)


def linear_part_norm_sq(op: AffineForwardOperator, s: StateVector) -> float:
    """|A0 s|^2 in the codomain norm."""
    a_s = op.apply_linear(s)
    return max(inner_values(op.codomain.weights, a_s.values, a_s.values), 0.0)

