# tests/test_optimizers/test_baselines.py

import numpy as np
import pytest

from src.mmebench.core.operators import AffineForwardOperator
from src.mmebench.core.problem import QuadraticProblem, functional_value
from src.mmebench.core.space import StateVector, inner
from src.mmebench.exceptions import DegenerateDirectionError, InvalidParameterError
from src.mmebench.models import MethodConfig, MethodKind, StopReason
from src.mmebench.optimizers.base import IterateState
from src.mmebench.optimizers.baselines import (
    cg_ortho,
    exact_line_search_alpha,
    gradient_descent_fixed,
    heavy_ball_adaptive,
)
from src.mmebench.optimizers.runner import run
from src.mmebench.services.verification import BASELINE_KINDS, random_spd_problem


def test_line_search_identity_steepest_descent(identity_problem, plane):
    """Along -grad J the identity problem is solved with alpha = 1."""
    q = StateVector(plane, [3.0, -1.0])
    s = -identity_problem.evaluate(q)[1]
    assert exact_line_search_alpha(identity_problem, q, s) == pytest.approx(1.0)


def test_line_search_diagonal_instance(diagonal_problem, plane):
    """alpha = 1.0625 / 1.015625 along s = (-1, -0.25)."""
    q = StateVector(plane, [1.0, 1.0])
    s = StateVector(plane, [-1.0, -0.25])
    assert exact_line_search_alpha(diagonal_problem, q, s) == pytest.approx(1.04615384615, rel=1e-10)


def test_line_search_is_a_minimizer(rng):
    """No random alpha does better than the exact one."""
    problem = random_spd_problem(6, rng)
    q = StateVector(problem.domain, rng.standard_normal(6))
    s = StateVector(problem.domain, rng.standard_normal(6))
    best = exact_line_search_alpha(problem, q, s)
    best_value = functional_value(problem, q.axpy(best, s))
    for alpha in rng.uniform(best - 5.0, best + 5.0, 100):
        assert best_value <= functional_value(problem, q.axpy(alpha, s)) + 1e-12


def test_line_search_kernel_direction(plane):
    """A direction annihilated by A0 has no minimizer."""
    op = AffineForwardOperator.diagonal(plane, [1.0, 0.0])
    problem = QuadraticProblem.single(op, StateVector.zeros(plane))
    with pytest.raises(DegenerateDirectionError):
        exact_line_search_alpha(problem, StateVector(plane, [1.0, 1.0]), StateVector(plane, [0.0, 1.0]))


@pytest.mark.parametrize("kind", BASELINE_KINDS)
def test_baselines_solve_identity(identity_problem, plane, kind):
    """Every baseline reaches q* of the identity problem within 50 iterations."""
    record = run(identity_problem, StateVector(plane, [2.0, -3.0]), MethodConfig(kind=kind, max_iterations=50))
    assert record.final_distance <= 1e-8
    assert record.stop_reason in (StopReason.TARGET_REACHED, StopReason.BUDGET)


@pytest.mark.parametrize("kind", [MethodKind.CG_FR, MethodKind.CG_PR])
def test_conjugate_gradients_terminate(rng, kind):
    """Fletcher-Reeves and Polak-Ribiere solve a 10-dimensional SPD problem to round-off."""
    problem = random_spd_problem(10, rng)
    q0 = StateVector.zeros(problem.domain)
    record = run(problem, q0, MethodConfig(kind=kind, max_iterations=20))
    assert record.final_functional <= 1e-16 * functional_value(problem, q0)


def test_cg_ortho_direction_orthogonal_to_previous(rng):
    """Consecutive CG-ortho directions are orthogonal."""
    problem = random_spd_problem(7, rng)
    state = IterateState.start(StateVector(problem.domain, rng.standard_normal(7)))
    state.q, _ = cg_ortho(problem, state)
    first = state.last_direction
    state.k = 1
    state.q, _ = cg_ortho(problem, state)
    second = state.last_direction
    assert abs(inner(problem.domain, first, second)) <= 1e-10 * first.norm() * second.norm()


def test_gradient_descent_uses_inverse_lipschitz(diagonal_problem, plane):
    """Default step is 1/L."""
    state = IterateState.start(StateVector(plane, [1.0, 1.0]))
    q_next, diag = gradient_descent_fixed(diagonal_problem, state)
    assert diag.alpha == 1.0
    np.testing.assert_allclose(q_next.values, [0.0, 0.75])


def test_gradient_descent_explicit_step(diagonal_problem, plane):
    """An explicit step overrides 1/L."""
    state = IterateState.start(StateVector(plane, [1.0, 1.0]))
    q_next, diag = gradient_descent_fixed(diagonal_problem, state, step=0.5)
    np.testing.assert_allclose(q_next.values, [0.5, 0.875])


def test_baseline_needs_positive_lipschitz(plane):
    """A zero Lipschitz constant cannot define a step."""
    op = AffineForwardOperator.diagonal(plane, [1.0, 1.0])
    problem = QuadraticProblem.single(op, StateVector(plane, [1.0, 0.0]), lipschitz_estimate=0.0)
    with pytest.raises(InvalidParameterError):
        heavy_ball_adaptive(problem, IterateState.start(StateVector.zeros(plane)))


def test_heavy_ball_first_step_is_gradient_descent(diagonal_problem, plane):
    """Without a previous step the heavy ball moves along -grad J / L."""
    state = IterateState.start(StateVector(plane, [1.0, 1.0]))
    q_next, diag = heavy_ball_adaptive(diagonal_problem, state)
    np.testing.assert_allclose(q_next.values, [0.0, 0.75])
    assert state.last_gradient is not None


@pytest.mark.parametrize("kind", [MethodKind.HEAVY_BALL_ADAPTIVE, MethodKind.SIMILAR_TRIANGLES,
                                  MethodKind.CG_ORTHO, MethodKind.GRADIENT_DESCENT_FIXED])
def test_baselines_reduce_functional(rng, kind):
    """Each baseline lowers J substantially on a moderately conditioned problem."""
    problem = random_spd_problem(12, rng)
    q0 = StateVector.zeros(problem.domain)
    record = run(problem, q0, MethodConfig(kind=kind, max_iterations=200))
    assert record.final_functional < 1e-1 * functional_value(problem, q0)


def test_infinite_mme_dominates_conjugate_gradients(rng):
    """Step by step MME(inf) is at least as close to q* as CG-FR."""
    problem = random_spd_problem(10, rng)
    q0 = StateVector.zeros(problem.domain)
    mme = run(problem, q0, MethodConfig.mme(None, max_iterations=6))
    cg = run(problem, q0, MethodConfig(kind=MethodKind.CG_FR, max_iterations=6))
    for ours, theirs in zip(mme.per_step, cg.per_step):
        assert ours.distance_to_solution <= theirs.distance_to_solution * (1 + 1e-9) + 1e-12
