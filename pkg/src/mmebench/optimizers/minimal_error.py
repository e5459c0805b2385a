# src/mmebench/optimizers/minimal_error.py
"""
The minimal-error family.

Every member chooses the point closest to the exact solution on an affine set
through q_k. Distances are computable without knowing q* because of the
identity <q - q*, grad J(q)> = 2 J(q):

- Polyak step            alpha = J / |grad J|^2 along -grad J
- minimal-error step     alpha = 2 J / |grad J|^2 along -grad J
- m-moment step (MME)    direction s_k = projection of -grad J onto the
                         orthogonal complement of the last m steps,
                         alpha = 2 J / |s_k|^2

MME with an empty history is the minimal-error step; m = None keeps every
step (the infinite-moment method).
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..config import config
from ..core.problem import QuadraticProblem
from ..core.space import StateVector, inner_values
from ..exceptions import DegenerateDirectionError
from ..models import StepDiagnostics, StopReason
from .base import BaseMethod, IterateState, stop_diagnostics, zero_gradient_stop

logger = logging.getLogger(__name__)


def _gradient_step(problem: QuadraticProblem, q: StateVector, k: int,
                   scale: float) -> Tuple[StateVector, StepDiagnostics]:
    value, grad = problem.evaluate(q)
    grad_norm_sq = inner_values(problem.domain.weights, grad.values, grad.values)
    stop = zero_gradient_stop(k, value, grad_norm_sq)
    if stop is not None:
        return q, stop
    alpha = scale * value / grad_norm_sq
    q_next = q.axpy(-alpha, grad)
    diag = StepDiagnostics(k=k, functional=value, grad_norm=math.sqrt(grad_norm_sq), alpha=alpha,
                           sin2_phi=1.0, step_norm=alpha * math.sqrt(grad_norm_sq))
    return q_next, diag


def step_polyak(problem: QuadraticProblem, q: StateVector, k: int = 0) -> Tuple[StateVector, StepDiagnostics]:
    """q - (J / |grad J|^2) grad J."""
    return _gradient_step(problem, q, k, 1.0)


def step_minimal_error(problem: QuadraticProblem, q: StateVector,
                       k: int = 0) -> Tuple[StateVector, StepDiagnostics]:
    """q - (2J / |grad J|^2) grad J; twice the Polyak displacement."""
    return _gradient_step(problem, q, k, 2.0)


def project_out(s: np.ndarray, state: IterateState, weights: np.ndarray, passes: int = 2) -> np.ndarray:
    """Modified Gram-Schmidt against the stored unit steps, repeated `passes` times."""
    for _ in range(passes):
        for record in state.history:
            s = s - inner_values(weights, s, record.unit) * record.unit
    return s


def step_mme(problem: QuadraticProblem, state: IterateState, m: Optional[int],
             degeneracy_tolerance: Optional[float] = None) -> Tuple[StateVector, StepDiagnostics]:
    """
    One m-moment minimal-error step from state.q.

    Args:
        problem: Problem being minimized.
        state: Run memory; its step history is trimmed to the last m steps
            and receives the new step.
        m: Number of retained steps, None for an unbounded history.
        degeneracy_tolerance: Stop when sin^2 phi_k = |s_k|^2/|grad J|^2 falls
            below this value.

    Returns:
        Tuple[StateVector, StepDiagnostics]: q_{k+1} and the diagnostics of q_k.
    """
    tolerance = config.DEGENERACY_TOLERANCE if degeneracy_tolerance is None else degeneracy_tolerance
    if state.history.maxlen != m:
        state.history = deque(state.history, maxlen=m)

    q = state.q
    weights = problem.domain.weights
    value, grad = problem.evaluate(q)
    grad_norm_sq = inner_values(weights, grad.values, grad.values)
    stop = zero_gradient_stop(state.k, value, grad_norm_sq)
    if stop is not None:
        return q, stop

    s = project_out(-grad.values, state, weights)
    s_norm_sq = inner_values(weights, s, s)
    sin2_phi = min(s_norm_sq / grad_norm_sq, 1.0)
    if sin2_phi < tolerance:
        logger.debug(f"MME degenerate at k={state.k}: sin^2 phi = {sin2_phi:.3e}")
        return q, stop_diagnostics(state.k, value, math.sqrt(grad_norm_sq), StopReason.DEGENERATE,
                                   degenerate=True, sin2_phi=sin2_phi)

    alpha = 2.0 * value / s_norm_sq
    direction = StateVector(problem.domain, s)
    h = direction * alpha
    state.record_step(h, keep_history=True)
    state.last_direction = direction
    diag = StepDiagnostics(k=state.k, functional=value, grad_norm=math.sqrt(grad_norm_sq),
                           alpha=alpha, sin2_phi=sin2_phi,
                           step_norm=alpha * math.sqrt(s_norm_sq))
    return q + h, diag


@dataclass(frozen=True)
class MomentumCoefficients:
    """Solution of the two-parameter minimal-distance problem along (-grad J, h_{k-1})."""
    alpha: float
    gamma: float
    beta: float
    determinant: float
    normalized_determinant: float


def momentum_coefficients(problem: QuadraticProblem, q: StateVector,
                          previous_step: StateVector) -> MomentumCoefficients:
    """
    Solve for (alpha, gamma) in q_{k+1} = q_k - alpha grad J + gamma h_{k-1}.

    Uses <q_k - q*, h_{k-1}> = 0, which holds after any minimal-error step.
    The normalized determinant equals sin^2 phi_k.
    """
    weights = problem.domain.weights
    value, grad = problem.evaluate(q)
    g = grad.values
    h = previous_step.values
    gg = inner_values(weights, g, g)
    gh = inner_values(weights, g, h)
    hh = inner_values(weights, h, h)
    determinant = gg * hh - gh * gh
    if determinant <= 0.0:
        raise DegenerateDirectionError("gradient is collinear with the previous step")
    alpha = 2.0 * value * hh / determinant
    gamma = 2.0 * value * gh / determinant
    return MomentumCoefficients(alpha=alpha, gamma=gamma, beta=gh / hh, determinant=determinant,
                                normalized_determinant=determinant / (gg * hh))


def mme_gram_step(problem: QuadraticProblem, q: StateVector,
                  steps: Sequence[StateVector]) -> StateVector:
    """
    MME step from the full (m+1)x(m+1) Gram system, newest step first.

    Does not assume the stored steps are mutually orthogonal; only that each
    was distance-minimal along itself, so that
    <q_k - q*, h_{k-i}> = sum_{j<i} <h_{k-j}, h_{k-i}>.
    """
    weights = problem.domain.weights
    value, grad = problem.evaluate(q)
    g = grad.values
    hs = [h.values for h in steps]
    size = len(hs) + 1
    gram = np.empty((size, size))
    rhs = np.zeros(size)
    gram[0, 0] = inner_values(weights, g, g)
    rhs[0] = 2.0 * value
    for i, hi in enumerate(hs, start=1):
        gram[0, i] = gram[i, 0] = -inner_values(weights, g, hi)
        for j, hj in enumerate(hs, start=1):
            gram[i, j] = inner_values(weights, hi, hj)
        rhs[i] = -sum(gram[j, i] for j in range(1, i))
    coefficients = scipy.linalg.solve(gram, rhs, assume_a="sym")
    step = -coefficients[0] * g
    for c, h in zip(coefficients[1:], hs):
        step = step + c * h
    return StateVector(problem.domain, q.values + step)


class PolyakMethod(BaseMethod):
    def step(self, state):
        return step_polyak(self.problem, state.q, state.k)


class MinimalErrorMethod(BaseMethod):
    def step(self, state):
        return step_minimal_error(self.problem, state.q, state.k)


class MomentMinimalErrorMethod(BaseMethod):
    """MME(m); the history bound comes from MethodConfig.history_limit."""

    def step(self, state):
        return step_mme(self.problem, state, self.config.history_limit,
                        self.config.degeneracy_tolerance)
