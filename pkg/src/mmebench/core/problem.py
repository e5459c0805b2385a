# src/mmebench/core/problem.py
"""
Quadratic least-squares problems J(q) = 1/2 sum_l |A_l q - f_l|^2.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import config
from ..exceptions import ContractViolationError, InvalidParameterError, NumericalOverflowError
from .operators import AffineForwardOperator, linear_part_norm_sq
from .space import SpaceDescriptor, StateVector, ensure_finite, inner, inner_values

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProblemTerm:
    operator: AffineForwardOperator
    data: StateVector

    def __post_init__(self):
        self.operator.codomain.check(self.data, f"data of {self.operator.label}")


@dataclass(frozen=True, eq=False)
class QuadraticProblem:
    """
    A composite quadratic problem with an optional exact solution.

    `noiseless=False` marks data that was not generated by this problem's own
    operators (refined-grid data); the consistency check of q* is then
    skipped.
    """
    terms: Tuple[ProblemTerm, ...]
    exact_solution: Optional[StateVector] = None
    lipschitz_estimate: Optional[float] = None
    label: str = "problem"
    noiseless: bool = True
    _cache: Dict[str, float] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ContractViolationError(f"{self.label}: a problem needs at least one term")
        domain = terms[0].operator.domain
        for index, term in enumerate(terms):
            if term.operator.domain != domain:
                raise ContractViolationError(
                    f"{self.label}: term {index} has domain '{term.operator.domain.label}', "
                    f"expected '{domain.label}'"
                )
        object.__setattr__(self, "terms", terms)
        if self.exact_solution is not None:
            domain.check(self.exact_solution, "exact solution")
        if self.lipschitz_estimate is not None and self.lipschitz_estimate < 0.0:
            raise InvalidParameterError(f"{self.label}: negative Lipschitz estimate")

    @classmethod
    def single(cls, operator: AffineForwardOperator, data: StateVector, **kwargs) -> "QuadraticProblem":
        return cls(terms=(ProblemTerm(operator, data),), **kwargs)

    @property
    def domain(self) -> SpaceDescriptor:
        return self.terms[0].operator.domain

    def residuals(self, q: StateVector) -> List[StateVector]:
        """A_l q - f_l for every term."""
        self.domain.check(q, "iterate")
        out = []
        for index, term in enumerate(self.terms):
            try:
                out.append(term.operator.apply(q) - term.data)
            except NumericalOverflowError as e:
                raise NumericalOverflowError("residual is not finite", index) from e
        return out

    def evaluate(self, q: StateVector) -> Tuple[float, StateVector]:
        """J(q) and grad J(q) from one pass over the residuals."""
        value = 0.0
        grad = np.zeros(self.domain.dim)
        for index, (term, r) in enumerate(zip(self.terms, self.residuals(q))):
            part = 0.5 * inner_values(term.operator.codomain.weights, r.values, r.values)
            if not math.isfinite(part):
                raise NumericalOverflowError("functional is not finite", index)
            value += part
            g = ensure_finite(term.operator.apply_adjoint(r), "gradient", index)
            grad += g.values
        return value, StateVector(self.domain, grad)

    def normal_apply(self, v: StateVector) -> StateVector:
        """B v = sum_l A_l* A_l0 v."""
        out = np.zeros(self.domain.dim)
        for term in self.terms:
            out += term.operator.apply_adjoint(term.operator.apply_linear(v)).values
        return StateVector(self.domain, out)

    def linear_norm_sq(self, s: StateVector) -> float:
        """sum_l |A_l0 s|^2."""
        return sum(linear_part_norm_sq(term.operator, s) for term in self.terms)

    def lipschitz(self) -> float:
        """Supplied L, or a cached power-iteration estimate."""
        if self.lipschitz_estimate is not None:
            return self.lipschitz_estimate
        if "lipschitz" not in self._cache:
            self._cache["lipschitz"] = estimate_operator_norm(self)
        return self._cache["lipschitz"]

    def distance(self, q: StateVector) -> Optional[float]:
        if self.exact_solution is None:
            return None
        return (q - self.exact_solution).norm()

    def validate_exact_solution(self, rtol: float = 1e-20) -> None:
        """Check J(q*) <= rtol * max(1, J(0)) for noiseless problems."""
        if self.exact_solution is None or not self.noiseless:
            return
        at_solution = functional_value(self, self.exact_solution)
        at_zero = functional_value(self, StateVector.zeros(self.domain))
        limit = rtol * max(1.0, at_zero)
        if at_solution > limit:
            logger.error(f"{self.label}: J(q*) = {at_solution:.3e} exceeds {limit:.3e}")
            raise ContractViolationError(
                f"{self.label}: supplied exact solution is inconsistent, J(q*) = {at_solution:.3e}"
            )
        logger.debug(f"{self.label}: J(q*) = {at_solution:.3e}, J(0) = {at_zero:.3e}")


def functional_value(problem: QuadraticProblem, q: StateVector) -> float:
    """J(q) = 1/2 sum_l |A_l q - f_l|^2."""
    value = 0.0
    for index, (term, r) in enumerate(zip(problem.terms, problem.residuals(q))):
        part = 0.5 * inner(term.operator.codomain, r, r)
        if not math.isfinite(part):
            raise NumericalOverflowError("functional is not finite", index)
        value += part
    return value


def gradient(problem: QuadraticProblem, q: StateVector) -> StateVector:
    """grad J(q) = sum_l A_l*(A_l q - f_l)."""
    return problem.evaluate(q)[1]


def estimate_operator_norm(problem: QuadraticProblem, iterations: Optional[int] = None,
                           rng: Optional[np.random.Generator] = None) -> float:
    """
    Power iteration on B = sum_l A_l* A_l0.

    Args:
        problem: Problem whose normal operator is probed.
        iterations: Number of applications of B (default MMEBENCH_POWER_ITERATIONS).
        rng: Source of the random start vector.

    Returns:
        float: Rayleigh quotient <Bv, v>/<v, v> after the last iteration, an
            estimate of L = |A0|^2. Zero for an all-zero operator.
    """
    iterations = config.POWER_ITERATIONS if iterations is None else iterations
    if iterations < 1:
        raise ContractViolationError(f"power iteration needs iterations >= 1, got {iterations}")
    rng = rng if rng is not None else np.random.default_rng(config.SEED)

    v = StateVector.random_unit(problem.domain, rng)
    rayleigh = 0.0
    for _ in range(iterations):
        bv = problem.normal_apply(v)
        rayleigh = inner(problem.domain, bv, v) / inner(problem.domain, v, v)
        length = bv.norm()
        if length == 0.0:
            # Start vector in the kernel; one fresh draw before concluding B = 0.
            v = StateVector.random_unit(problem.domain, rng)
            bv = problem.normal_apply(v)
            length = bv.norm()
            if length == 0.0:
                logger.info(f"{problem.label}: normal operator vanishes, L = 0")
                return 0.0
            rayleigh = inner(problem.domain, bv, v)
        v = bv / length
    logger.debug(f"{problem.label}: power iteration L = {rayleigh:.6e} after {iterations} iterations")
    return max(rayleigh, 0.0)


def fundamental_identity_defect(problem: QuadraticProblem, q: StateVector) -> float:
    """|<q - q*, grad J(q)> - 2 J(q)| / max(1, 2 J(q))."""
    if problem.exact_solution is None:
        raise ContractViolationError(f"{problem.label}: identity check needs an exact solution")
    value, grad = problem.evaluate(q)
    lhs = inner(problem.domain, q - problem.exact_solution, grad)
    return abs(lhs - 2.0 * value) / max(1.0, 2.0 * value)

