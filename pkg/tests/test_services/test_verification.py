# tests/test_services/test_verification.py

import numpy as np
import pytest

from src.mmebench.core.space import StateVector
from src.mmebench.models import MethodConfig
from src.mmebench.services.verification import (
    SUITES,
    random_diagonal_model,
    random_spd_problem,
    run_suite,
    trace_steps,
)


@pytest.mark.parametrize("name", ["lemma1", "telescoping", "theorem1", "theorem3", "theorem5", "theorem6"])
def test_fast_suites_pass(name):
    """The spectral and dense-matrix suites pass with the default seed."""
    report = run_suite(name, seed=0)
    assert report.checks
    assert report.passed, [c.model_dump() for c in report.failures]


@pytest.mark.slow
@pytest.mark.parametrize("name", ["adjoint", "identity2J", "theorem4"])
def test_pde_suites_pass(name):
    """Suites that sweep every PDE family at desk resolution."""
    report = run_suite(name, seed=0)
    assert report.passed, [c.model_dump() for c in report.failures]


def test_unknown_suite():
    """Names outside the registry are refused."""
    with pytest.raises(KeyError):
        run_suite("theorem99")


def test_suite_registry():
    """Every suite is reachable by name."""
    assert set(SUITES) == {"adjoint", "identity2J", "lemma1", "telescoping", "theorem1", "theorem3",
                           "theorem4", "theorem5", "theorem6"}


def test_trace_steps_returns_accepted_steps(rng):
    """One accepted step per iteration until the budget."""
    problem = random_spd_problem(6, rng)
    trace = trace_steps(problem, StateVector.zeros(problem.domain), MethodConfig.mme(2), 4)
    assert len(trace) == 4
    assert [diag.k for diag, _ in trace] == [0, 1, 2, 3]
    assert all(step.norm() > 0.0 for _, step in trace)


def test_random_diagonal_model_is_reproducible():
    """Fresh generators with one seed give one model."""
    first = random_diagonal_model(5, np.random.default_rng(3))
    second = random_diagonal_model(5, np.random.default_rng(3))
    np.testing.assert_array_equal(first.spectrum.eigenvalues, second.spectrum.eigenvalues)
    np.testing.assert_array_equal(first.q0.values, second.q0.values)
