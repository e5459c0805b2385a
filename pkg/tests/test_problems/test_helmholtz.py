# tests/test_problems/test_helmholtz.py

import math

import numpy as np
import pytest

from src.mmebench.core.operators import verify_adjoint
from src.mmebench.core.problem import functional_value
from src.mmebench.core.space import StateVector
from src.mmebench.exceptions import InvalidParameterError
from src.mmebench.problems.base import exact_solution_field
from src.mmebench.problems.helmholtz import (
    HelmholtzModelSetup,
    helmholtz_exact,
    make_helmholtz_operator,
    synthesize_sine_series,
)
from src.mmebench.spectral.model import make_helmholtz_spectrum


@pytest.fixture(scope="module")
def helmholtz():
    return make_helmholtz_operator(HelmholtzModelSetup(kappa=1.0, n_modes=200))


def test_exact_solution_profile():
    """q*(y) = y - y^2."""
    assert helmholtz_exact(0.5) == pytest.approx(0.25)
    assert helmholtz_exact(np.array([0.0, 1.0])).tolist() == [0.0, 0.0]


def test_exact_solution_norm(helmholtz):
    """|q*|^2 in L2(0, 1) is 1/30."""
    _, problem = helmholtz
    assert problem.exact_solution.norm() == pytest.approx(math.sqrt(1.0 / 30.0), rel=1e-6)


def test_exact_solution_fits_data(helmholtz):
    """The model data is consistent at kappa = 1."""
    operator, problem = helmholtz
    residual = operator.apply(problem.exact_solution)
    assert np.max(np.abs(residual.values)) <= 1e-8


def test_initial_functional(helmholtz):
    """J(0) is of order 1.8e-4."""
    _, problem = helmholtz
    value = functional_value(problem, StateVector.zeros(problem.domain))
    assert 1.77e-4 / 2 <= value <= 1.77e-4 * 2


def test_operator_is_self_consistent(helmholtz):
    """The diagonal operator passes the adjoint probe."""
    operator, _ = helmholtz
    assert verify_adjoint(operator, trials=5).passed


def test_normal_operator_matches_spectrum():
    """A0* A0 has the closed-form eigenvalues."""
    operator, _ = make_helmholtz_operator(HelmholtzModelSetup(kappa=1.0, n_modes=20))
    spectrum = make_helmholtz_spectrum(1.0, 20)
    for n in range(5):
        e = np.zeros(20)
        e[n] = 1.0
        image = operator.apply_adjoint(operator.apply_linear(StateVector(operator.domain, e)))
        assert image.values[n] == pytest.approx(spectrum.eigenvalues[n], rel=1e-12)


def test_other_kappa_has_no_exact_solution(caplog):
    """Away from kappa = 1 the data is not generated by q*."""
    _, problem = make_helmholtz_operator(HelmholtzModelSetup(kappa=0.5, n_modes=10))
    assert problem.exact_solution is None
    assert "no exact solution" in caplog.text


@pytest.mark.parametrize("kwargs", [{"kappa": math.pi}, {"kappa": -0.1}, {"n_modes": 0}])
def test_invalid_setup(kwargs):
    """kappa must lie in [0, pi) and at least one mode is needed."""
    with pytest.raises(InvalidParameterError):
        HelmholtzModelSetup(**kwargs)


def test_sine_series_synthesis():
    """The sine coefficients of q* reproduce y - y^2 on the sample points."""
    coefficients = exact_solution_field(HelmholtzModelSetup(n_modes=200)).values
    y, values = synthesize_sine_series(coefficients, 399)
    np.testing.assert_allclose(values, helmholtz_exact(y), atol=1e-5)


def test_sine_series_needs_enough_points():
    """Fewer points than modes cannot be synthesized."""
    with pytest.raises(InvalidParameterError):
        synthesize_sine_series(np.ones(5), 3)
