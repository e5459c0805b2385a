# src/mmebench/optimizers/baselines.py
"""
Classical first-order baselines.

All of them generate iterates in q0 + K_n, the Krylov manifold of the
normal operator, so none can beat the infinite-moment minimal-error method
in distance to q*.

Parameterizations:
    gradient_descent_fixed  q - step * grad J, step = 1/L by default
    heavy_ball_adaptive     h_k = -a grad J + b h_{k-1} with
                            a = 4/(sqrt L + sqrt mu)^2,
                            b = ((sqrt L - sqrt mu)/(sqrt L + sqrt mu))^2,
                            mu = running minimum of the curvature
                            <grad J_k - grad J_{k-1}, h_{k-1}>/|h_{k-1}|^2
    cg_fr / cg_pr / cg_ortho  s_k = -grad J + beta s_{k-1}, exact line search;
                            PR restarts (beta = 0) when beta < 0
    similar_triangles       accelerated scheme with step 1/L:
                            a_{k+1} = (1 + sqrt(1 + 4 L A_k)) / (2 L)
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..core.problem import QuadraticProblem
from ..core.space import StateVector, inner_values
from ..exceptions import DegenerateDirectionError, InvalidParameterError
from ..models import StepDiagnostics, StopReason
from .base import BaseMethod, IterateState, sin2_against, stop_diagnostics

logger = logging.getLogger(__name__)


def exact_line_search_alpha(problem: QuadraticProblem, q: StateVector, s: StateVector,
                            grad: Optional[StateVector] = None) -> float:
    """
    argmin_alpha J(q + alpha s) = -<grad J(q), s> / sum_l |A_l0 s|^2.

    Raises:
        DegenerateDirectionError: If s lies in the kernel of every A_l0.
    """
    if grad is None:
        grad = problem.evaluate(q)[1]
    curvature = problem.linear_norm_sq(s)
    if not curvature > 0.0:
        raise DegenerateDirectionError("direction is annihilated by every linear part")
    return -inner_values(problem.domain.weights, grad.values, s.values) / curvature


def _evaluate(problem: QuadraticProblem, state: IterateState):
    value, grad = problem.evaluate(state.q)
    grad_norm_sq = inner_values(problem.domain.weights, grad.values, grad.values)
    if value == 0.0 or grad_norm_sq == 0.0:
        return value, grad, grad_norm_sq, stop_diagnostics(
            state.k, value, math.sqrt(grad_norm_sq), StopReason.TARGET_REACHED)
    return value, grad, grad_norm_sq, None


def _lipschitz(problem: QuadraticProblem) -> float:
    lipschitz = problem.lipschitz()
    if not lipschitz > 0.0:
        raise InvalidParameterError(f"{problem.label}: baseline needs a positive Lipschitz constant")
    return lipschitz


def gradient_descent_fixed(problem: QuadraticProblem, state: IterateState,
                           step: Optional[float] = None) -> Tuple[StateVector, StepDiagnostics]:
    """q - step * grad J with step = 1/L unless given."""
    value, grad, grad_norm_sq, stop = _evaluate(problem, state)
    if stop is not None:
        return state.q, stop
    alpha = step if step is not None else 1.0 / _lipschitz(problem)
    h = grad * (-alpha)
    state.record_step(h)
    diag = StepDiagnostics(k=state.k, functional=value, grad_norm=math.sqrt(grad_norm_sq),
                           alpha=alpha, sin2_phi=1.0, step_norm=alpha * math.sqrt(grad_norm_sq))
    return state.q + h, diag


def heavy_ball_adaptive(problem: QuadraticProblem, state: IterateState) -> Tuple[StateVector, StepDiagnostics]:
    weights = problem.domain.weights
    value, grad, grad_norm_sq, stop = _evaluate(problem, state)
    if stop is not None:
        return state.q, stop
    lipschitz = _lipschitz(problem)

    previous = state.last_step
    if previous is None or state.last_gradient is None:
        a, b = 1.0 / lipschitz, 0.0
        h_values = -a * grad.values
    else:
        prev_sq = inner_values(weights, previous.values, previous.values)
        curvature = inner_values(weights, grad.values - state.last_gradient.values, previous.values) / prev_sq
        if curvature > 0.0:
            curvature = min(curvature, lipschitz)
            state.curvature_floor = curvature if state.curvature_floor is None \
                else min(state.curvature_floor, curvature)
        mu = state.curvature_floor if state.curvature_floor is not None else lipschitz
        root_l, root_mu = math.sqrt(lipschitz), math.sqrt(mu)
        a = 4.0 / (root_l + root_mu) ** 2
        b = ((root_l - root_mu) / (root_l + root_mu)) ** 2
        h_values = -a * grad.values + b * previous.values

    sin2 = sin2_against(grad.values, None if previous is None else previous.values, weights, grad_norm_sq)
    h = StateVector(problem.domain, h_values)
    state.last_gradient = grad
    state.record_step(h)
    diag = StepDiagnostics(k=state.k, functional=value, grad_norm=math.sqrt(grad_norm_sq),
                           alpha=a, sin2_phi=sin2, step_norm=h.norm())
    return state.q + h, diag


def _conjugate_gradient(problem: QuadraticProblem, state: IterateState,
                        variant: str) -> Tuple[StateVector, StepDiagnostics]:
    weights = problem.domain.weights
    value, grad, grad_norm_sq, stop = _evaluate(problem, state)
    if stop is not None:
        return state.q, stop

    previous = state.last_direction
    restart = False
    beta = 0.0
    if previous is not None and state.last_gradient is not None:
        g_prev = state.last_gradient.values
        g_prev_sq = inner_values(weights, g_prev, g_prev)
        if variant == "fr":
            beta = grad_norm_sq / g_prev_sq
        elif variant == "pr":
            beta = inner_values(weights, grad.values, grad.values - g_prev) / g_prev_sq
            if beta < 0.0:
                beta, restart = 0.0, True
        else:
            beta = inner_values(weights, grad.values, previous.values) / \
                inner_values(weights, previous.values, previous.values)
        s_values = -grad.values + beta * previous.values
    else:
        s_values = -grad.values

    s = StateVector(problem.domain, s_values)
    try:
        alpha = exact_line_search_alpha(problem, state.q, s, grad)
    except DegenerateDirectionError:
        logger.debug(f"CG-{variant} direction in the kernel at k={state.k}")
        return state.q, stop_diagnostics(state.k, value, math.sqrt(grad_norm_sq),
                                         StopReason.DEGENERATE, degenerate=True)
    sin2 = sin2_against(grad.values, None if previous is None else previous.values, weights, grad_norm_sq)
    h = s * alpha
    state.last_direction = s
    state.last_gradient = grad
    state.record_step(h)
    diag = StepDiagnostics(k=state.k, functional=value, grad_norm=math.sqrt(grad_norm_sq),
                           alpha=alpha, sin2_phi=sin2, step_norm=abs(alpha) * s.norm(), restart=restart)
    return state.q + h, diag


def cg_fr(problem: QuadraticProblem, state: IterateState) -> Tuple[StateVector, StepDiagnostics]:
    """Fletcher-Reeves: beta = |g_k|^2 / |g_{k-1}|^2."""
    return _conjugate_gradient(problem, state, "fr")


def cg_pr(problem: QuadraticProblem, state: IterateState) -> Tuple[StateVector, StepDiagnostics]:
    """Polak-Ribiere: beta = <g_k, g_k - g_{k-1}> / |g_{k-1}|^2, restart on beta < 0."""
    return _conjugate_gradient(problem, state, "pr")


def cg_ortho(problem: QuadraticProblem, state: IterateState) -> Tuple[StateVector, StepDiagnostics]:
    """beta = <g_k, s_{k-1}> / |s_{k-1}|^2, so s_k is orthogonal to s_{k-1}."""
    return _conjugate_gradient(problem, state, "ortho")


def similar_triangles(problem: QuadraticProblem, state: IterateState) -> Tuple[StateVector, StepDiagnostics]:
    """
    One step of the similar-triangles accelerated method.

    state.q is the primary sequence x_k, state.anchor the auxiliary u_k and
    state.weight_sum the accumulated A_k.
    """
    weights = problem.domain.weights
    value, grad, grad_norm_sq, stop = _evaluate(problem, state)
    if stop is not None:
        return state.q, stop
    lipschitz = _lipschitz(problem)

    x = state.q
    u = state.anchor if state.anchor is not None else x
    big_a = state.weight_sum
    a = (1.0 + math.sqrt(1.0 + 4.0 * lipschitz * big_a)) / (2.0 * lipschitz)
    big_a_next = big_a + a
    y = (u.values * a + x.values * big_a) / big_a_next
    grad_y = problem.evaluate(StateVector(problem.domain, y))[1]
    u_next = u.values - a * grad_y.values
    x_next = StateVector(problem.domain, (u_next * a + x.values * big_a) / big_a_next)

    h = x_next - x
    previous = state.last_step
    sin2 = sin2_against(grad.values, None if previous is None else previous.values, weights, grad_norm_sq)
    state.anchor = StateVector(problem.domain, u_next)
    state.weight_sum = big_a_next
    state.last_gradient = grad
    if np.any(h.values):
        state.record_step(h)
    diag = StepDiagnostics(k=state.k, functional=value, grad_norm=math.sqrt(grad_norm_sq),
                           alpha=a, sin2_phi=sin2, step_norm=h.norm())
    return x_next, diag


class GradientDescentMethod(BaseMethod):
    def step(self, state):
        return gradient_descent_fixed(self.problem, state, self.config.step)


class HeavyBallMethod(BaseMethod):
    def step(self, state):
        return heavy_ball_adaptive(self.problem, state)


class ConjugateGradientMethod(BaseMethod):
    """CG with the beta rule chosen by the config kind."""

    def __init__(self, problem, config, variant: str):
        super().__init__(problem, config)
        self.variant = variant

    def step(self, state):
        return _conjugate_gradient(self.problem, state, self.variant)


class SimilarTrianglesMethod(BaseMethod):
    def step(self, state):
        return similar_triangles(self.problem, state)
