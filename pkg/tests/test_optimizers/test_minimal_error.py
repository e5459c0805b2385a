# tests/test_optimizers/test_minimal_error.py

import numpy as np
import pytest

from src.mmebench.core.operators import AffineForwardOperator
from src.mmebench.core.problem import QuadraticProblem
from src.mmebench.core.space import StateVector, inner
from src.mmebench.exceptions import DegenerateDirectionError
from src.mmebench.models import MethodConfig, StopReason
from src.mmebench.optimizers.base import IterateState
from src.mmebench.optimizers.minimal_error import (
    mme_gram_step,
    momentum_coefficients,
    step_minimal_error,
    step_mme,
    step_polyak,
)
from src.mmebench.optimizers.runner import run
from src.mmebench.services.verification import random_spd_problem


def _mme_steps(problem, q0, m, count):
    """Runs `count` MME(m) steps; returns the state and the accepted steps oldest first."""
    state = IterateState.start(q0, m)
    steps = []
    for k in range(count):
        state.k = k
        q_next, diag = step_mme(problem, state, m)
        assert diag.stop is None
        steps.append(q_next - state.q)
        state.q = q_next
    return state, steps


def test_polyak_halves_identity_iterate(identity_problem, plane):
    """J=2, grad=(2,0), alpha=0.5 moves (2,0) to (1,0)."""
    q_next, diag = step_polyak(identity_problem, StateVector(plane, [2.0, 0.0]))
    assert q_next.values.tolist() == [1.0, 0.0]
    assert diag.functional == 2.0
    assert diag.alpha == 0.5


def test_polyak_at_solution_takes_no_step(identity_problem, plane):
    """At q* the step reports J=0 and stops."""
    q = StateVector.zeros(plane)
    q_next, diag = step_polyak(identity_problem, q)
    assert q_next is q
    assert diag.functional == 0.0
    assert diag.stop == StopReason.TARGET_REACHED


def test_polyak_on_diagonal_instance(diagonal_problem, plane):
    """(1,1) - (0.625/1.0625)(1, 0.25)."""
    q_next, diag = step_polyak(diagonal_problem, StateVector(plane, [1.0, 1.0]))
    np.testing.assert_allclose(q_next.values, [0.41176470588, 0.85294117647], rtol=1e-10)
    assert diag.functional == pytest.approx(0.625)


def test_minimal_error_exact_for_identity(identity_problem, plane, rng):
    """alpha = 1 lands on q* for the identity operator."""
    q = StateVector(plane, rng.standard_normal(2))
    q_next, diag = step_minimal_error(identity_problem, q)
    assert diag.alpha == pytest.approx(1.0)
    np.testing.assert_allclose(q_next.values, [0.0, 0.0], atol=1e-14)


def test_minimal_error_step_length(diagonal_problem, plane):
    """alpha = 1.25 / 1.0625 on the diagonal instance."""
    q = StateVector(plane, [1.0, 1.0])
    q_next, diag = step_minimal_error(diagonal_problem, q)
    assert diag.alpha == pytest.approx(1.17647058824, rel=1e-10)
    polyak_next, _ = step_polyak(diagonal_problem, q)
    np.testing.assert_allclose((q_next - q).values, 2.0 * (polyak_next - q).values)


def test_minimal_error_decreases_distance(rng):
    """Every minimal-error step strictly reduces the distance to q*."""
    problem = random_spd_problem(6, rng)
    q = StateVector(problem.domain, rng.standard_normal(6))
    for _ in range(10):
        q_next, _ = step_minimal_error(problem, q)
        assert problem.distance(q_next) < problem.distance(q)
        q = q_next


def test_mme_first_step_is_minimal_error(rng):
    """With an empty history MME is the minimal-error step."""
    problem = random_spd_problem(5, rng)
    q0 = StateVector(problem.domain, rng.standard_normal(5))
    state = IterateState.start(q0, 3)
    mme_next, mme_diag = step_mme(problem, state, 3)
    me_next, me_diag = step_minimal_error(problem, q0)
    np.testing.assert_allclose(mme_next.values, me_next.values, rtol=1e-14)
    assert mme_diag.sin2_phi == 1.0
    assert mme_diag.alpha == pytest.approx(me_diag.alpha)


def test_mme_m1_consecutive_steps_orthogonal(rng):
    """Each step is orthogonal to the one before it."""
    problem = random_spd_problem(8, rng)
    q0 = StateVector(problem.domain, rng.standard_normal(8))
    _, (h0, h1) = _mme_steps(problem, q0, 1, 2)
    assert abs(inner(problem.domain, h1, h0)) <= 1e-10 * h1.norm() * h0.norm()


def test_mme_history_respects_m(rng):
    """Only the last m steps are kept."""
    problem = random_spd_problem(8, rng)
    q0 = StateVector(problem.domain, rng.standard_normal(8))
    state, _ = _mme_steps(problem, q0, 2, 5)
    assert len(state.history) == 2


def test_mme_infinite_terminates_in_dimension_steps(rng):
    """MME(inf) reaches q* within n steps on an n-dimensional SPD problem."""
    problem = random_spd_problem(5, rng)
    q0 = StateVector.zeros(problem.domain)
    record = run(problem, q0, MethodConfig.mme(None, max_iterations=5))
    assert record.final_distance <= 1e-8

    basis = np.eye(5)
    normal = np.column_stack([problem.normal_apply(StateVector(problem.domain, e)).values for e in basis])
    rhs = -problem.evaluate(q0)[1].values
    np.testing.assert_allclose(record.final_q.values, np.linalg.solve(normal, rhs), atol=1e-8)


def test_mme_degenerate_direction_stops(diagonal_problem, plane):
    """sin^2 phi below the tolerance stops without moving."""
    state = IterateState.start(StateVector(plane, [1.0, 1.0]), 1)
    state.q, _ = step_mme(diagonal_problem, state, 1)
    state.k = 1
    q_next, diag = step_mme(diagonal_problem, state, 1, degeneracy_tolerance=0.9)
    assert diag.stop == StopReason.DEGENERATE
    assert diag.degenerate
    assert diag.sin2_phi == pytest.approx(0.735, abs=1e-3)
    assert q_next is state.q


def test_mme_zero_gradient_with_positive_functional_fails(plane):
    """Inconsistent data that stalls the gradient is a numerical failure."""
    op = AffineForwardOperator.diagonal(plane, [1.0, 0.0])
    problem = QuadraticProblem.single(op, StateVector(plane, [0.0, 1.0]))
    state = IterateState.start(StateVector.zeros(plane), 1)
    _, diag = step_mme(problem, state, 1)
    assert diag.stop == StopReason.NUMERICAL_FAILURE


def test_momentum_coefficients_match_mme1(rng):
    """The two-parameter solve reproduces the MME(1) step and its sin^2 phi."""
    problem = random_spd_problem(6, rng)
    q0 = StateVector(problem.domain, rng.standard_normal(6))
    state, (h0,) = _mme_steps(problem, q0, 1, 1)
    q1 = state.q
    state.k = 1
    q2, diag = step_mme(problem, state, 1)

    coefficients = momentum_coefficients(problem, q1, h0)
    grad = problem.evaluate(q1)[1]
    momentum_q2 = q1.axpy(-coefficients.alpha, grad).axpy(coefficients.gamma, h0)
    np.testing.assert_allclose(momentum_q2.values, q2.values, rtol=1e-9, atol=1e-12)
    assert coefficients.normalized_determinant == pytest.approx(diag.sin2_phi, rel=1e-9)


def test_momentum_coefficients_collinear_raise(identity_problem, plane):
    """A previous step parallel to the gradient leaves no plane to search."""
    q = StateVector(plane, [1.0, 0.0])
    with pytest.raises(DegenerateDirectionError):
        momentum_coefficients(identity_problem, q, StateVector(plane, [2.0, 0.0]))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_gram_system_matches_projection(rng, m):
    """Solving the full Gram system gives the projected MME step."""
    problem = random_spd_problem(9, rng)
    q0 = StateVector(problem.domain, rng.standard_normal(9))
    state, steps = _mme_steps(problem, q0, m, m + 1)
    q = state.q
    state.k = m + 1
    q_next, _ = step_mme(problem, state, m)
    gram_next = mme_gram_step(problem, q, list(reversed(steps[-m:])))
    np.testing.assert_allclose(gram_next.values, q_next.values, rtol=1e-7, atol=1e-9)
