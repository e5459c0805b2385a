# src/mmebench/optimizers/runner.py

import logging
import time
from typing import Optional

from ..core.problem import QuadraticProblem
from ..core.space import StateVector
from ..exceptions import NumericalOverflowError
from ..models import MethodConfig, MethodKind, RunRecord, StepDiagnostics, StopReason
from .base import BaseMethod
from .baselines import (
    ConjugateGradientMethod,
    GradientDescentMethod,
    HeavyBallMethod,
    SimilarTrianglesMethod,
)
from .minimal_error import MinimalErrorMethod, MomentMinimalErrorMethod, PolyakMethod

logger = logging.getLogger(__name__)


def make_method(problem: QuadraticProblem, config: MethodConfig) -> BaseMethod:
    """Instantiate the method class for config.kind."""
    kind = config.kind
    if kind == MethodKind.MINIMAL_ERROR:
        return MinimalErrorMethod(problem, config)
    if kind == MethodKind.MOMENT_MINIMAL_ERROR:
        return MomentMinimalErrorMethod(problem, config)
    if kind == MethodKind.POLYAK:
        return PolyakMethod(problem, config)
    if kind == MethodKind.GRADIENT_DESCENT_FIXED:
        return GradientDescentMethod(problem, config)
    if kind == MethodKind.HEAVY_BALL_ADAPTIVE:
        return HeavyBallMethod(problem, config)
    if kind == MethodKind.CG_FR:
        return ConjugateGradientMethod(problem, config, "fr")
    if kind == MethodKind.CG_PR:
        return ConjugateGradientMethod(problem, config, "pr")
    if kind == MethodKind.CG_ORTHO:
        return ConjugateGradientMethod(problem, config, "ortho")
    if kind == MethodKind.SIMILAR_TRIANGLES:
        return SimilarTrianglesMethod(problem, config)
    raise ValueError(f"Unknown method kind: {kind}")


def _target_reason(diag: StepDiagnostics, config: MethodConfig) -> Optional[StopReason]:
    if config.target_functional is not None and diag.functional <= config.target_functional:
        return StopReason.TARGET_REACHED
    if (config.target_distance is not None and diag.distance_to_solution is not None
            and diag.distance_to_solution <= config.target_distance):
        return StopReason.TARGET_REACHED
    return None


def _attach_distances(problem: QuadraticProblem, q: StateVector, diag: StepDiagnostics) -> None:
    if problem.exact_solution is None:
        return
    error = q - problem.exact_solution
    diag.distance_to_solution = error.norm()
    diag.distance_euclidean = error.euclidean_norm()


def run(problem: QuadraticProblem, q0: StateVector, config: MethodConfig,
        keep_iterates: bool = False) -> RunRecord:
    """
    Iterate the configured method from q0.

    Stops on the iteration budget, a degenerate direction, a met target or a
    non-finite functional. Each StepDiagnostics row describes the iterate the
    step started from; the final iterate is summarized on the record itself.

    Args:
        problem (QuadraticProblem): Problem to minimize.
        q0 (StateVector): Starting point in the problem domain.
        config (MethodConfig): Method, budget and stopping rules.
        keep_iterates (bool): Also return q_0, ..., q_final on the record.

    Returns:
        RunRecord: Per-step diagnostics, the final iterate and the stop reason.
    """
    problem.domain.check(q0, "starting point")
    method = make_method(problem, config)
    state = method.initial_state(q0)
    per_step = []
    iterates = [q0] if keep_iterates else None
    stop_reason = StopReason.BUDGET
    failure_index = None
    message = None
    accepted = 0

    started = time.perf_counter()
    for k in range(config.max_iterations):
        state.k = k
        try:
            q_next, diag = method.step(state)
        except NumericalOverflowError as e:
            logger.error(f"{config.label}: numerical failure at k={k}: {e}")
            stop_reason, failure_index, message = StopReason.NUMERICAL_FAILURE, k, str(e)
            break

        _attach_distances(problem, state.q, diag)
        if diag.stop is None:
            target = _target_reason(diag, config)
            if target is not None:
                diag.stop = target
                q_next = state.q
        per_step.append(diag)

        if diag.stop is not None:
            stop_reason = diag.stop
            if stop_reason == StopReason.NUMERICAL_FAILURE:
                failure_index = k
                message = "gradient vanished while J > 0; the data is inconsistent"
            break
        if not q_next.is_finite():
            stop_reason, failure_index, message = StopReason.NUMERICAL_FAILURE, k, "iterate is not finite"
            break
        state.q = q_next
        accepted += 1
        if keep_iterates:
            iterates.append(q_next)
    wall_time = time.perf_counter() - started

    final_q = state.q
    final_grad_norm = None
    try:
        final_functional, final_grad = problem.evaluate(final_q)
        final_grad_norm = final_grad.norm()
    except NumericalOverflowError as e:
        final_functional = float("inf")
        message = message or str(e)
    final_distance = problem.distance(final_q)
    final_euclidean = None
    if problem.exact_solution is not None:
        final_euclidean = (final_q - problem.exact_solution).euclidean_norm()

    logger.info(
        f"{config.label} on {problem.label}: {stop_reason.value} after {accepted} steps, "
        f"J = {final_functional:.3e}"
        + (f", distance = {final_distance:.3e}" if final_distance is not None else "")
        + f" ({wall_time:.2f}s)"
    )
    return RunRecord(method=config, per_step=per_step, final_q=final_q, stop_reason=stop_reason,
                     wall_time=wall_time, final_functional=final_functional,
                     final_grad_norm=final_grad_norm, final_index=accepted,
                     final_distance=final_distance, final_distance_euclidean=final_euclidean,
                     failure_index=failure_index, message=message, iterates=iterates)
