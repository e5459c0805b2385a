# tests/test_spectral/test_model.py

import logging
import math

import mpmath
import numpy as np
import pytest

from src.mmebench.exceptions import ContractViolationError, InvalidParameterError
from src.mmebench.models import MethodConfig, MethodKind
from src.mmebench.optimizers.runner import run
from src.mmebench.spectral.model import (
    DiagonalProblem,
    Spectrum,
    make_geometric_spectrum,
    make_heat_spectrum,
    make_helmholtz_spectrum,
    run_gradient_descent_spectral,
)


def test_helmholtz_spectrum_kappa_zero():
    """kappa = 0 reduces to 1/cosh^2(pi n)."""
    spectrum = make_helmholtz_spectrum(0.0, 6)
    expected = [1.0 / math.cosh(math.pi * n) ** 2 for n in range(1, 7)]
    np.testing.assert_allclose(spectrum.eigenvalues, expected, rtol=1e-13)


def test_helmholtz_first_eigenvalue():
    """lambda_1 = sech^2(sqrt(pi^2 - 1)) at kappa = 1."""
    spectrum = make_helmholtz_spectrum(1.0, 3)
    with mpmath.workdps(50):
        expected = float(mpmath.sech(mpmath.sqrt(mpmath.pi ** 2 - 1)) ** 2)
    assert spectrum.largest == pytest.approx(expected, rel=1e-15)
    assert spectrum.largest == pytest.approx(1.03e-2, rel=1e-2)


def test_helmholtz_ratio_tends_to_exp_minus_two_pi():
    """Consecutive ratios approach e^(-2 pi)."""
    values = make_helmholtz_spectrum(1.0, 16).eigenvalues
    ratios = values[8:] / values[7:-1]
    np.testing.assert_allclose(ratios, math.exp(-2 * math.pi), rtol=1e-2)


def test_helmholtz_spectrum_truncates_on_underflow(caplog):
    """200 requested modes keep only those above the smallest normal double."""
    with caplog.at_level(logging.WARNING):
        spectrum = make_helmholtz_spectrum(1.0, 200)
    assert 100 < len(spectrum) < 200
    assert np.all(spectrum.eigenvalues > 0.0)
    assert "truncated" in caplog.text


def test_helmholtz_rejects_large_kappa():
    """kappa >= pi makes the first frequency imaginary."""
    with pytest.raises(InvalidParameterError):
        make_helmholtz_spectrum(math.pi, 5)


def test_heat_first_eigenvalue():
    """lambda_1 = exp(-2 pi^2) at kappa = 1."""
    assert make_heat_spectrum(1.0, 3).largest == pytest.approx(2.675e-9, rel=1e-3)


def test_heat_ratios_exact():
    """lambda_{n+1}/lambda_n = exp(-2 pi^2 kappa^2 (2n+1))."""
    kappa = 0.3
    values = make_heat_spectrum(kappa, 6).eigenvalues
    for n in range(1, 6):
        expected = math.exp(-2 * math.pi ** 2 * kappa ** 2 * (2 * n + 1))
        assert values[n] / values[n - 1] == pytest.approx(expected, rel=1e-12)


def test_heat_spectrum_stiffens_with_kappa():
    """Larger kappa gives smaller eigenvalues mode by mode."""
    soft = make_heat_spectrum(0.2, 5).eigenvalues
    stiff = make_heat_spectrum(0.4, 5).eigenvalues
    assert np.all(stiff < soft)


def test_heat_spectrum_underflow_is_truncated():
    """kappa = 1 underflows after a handful of modes."""
    spectrum = make_heat_spectrum(1.0, 200)
    assert len(spectrum) == 5


def test_spectrum_must_decrease():
    """Eigenvalues are strictly decreasing and positive."""
    with pytest.raises(ContractViolationError):
        Spectrum(np.array([1.0, 1.0]))
    with pytest.raises(ContractViolationError):
        Spectrum(np.array([1.0, -0.5]))


def test_spectrum_needs_two_modes():
    """A single eigenvalue is not a spectrum; the factories reject n_modes = 1."""
    with pytest.raises(ContractViolationError):
        Spectrum(np.array([1.0]))
    with pytest.raises(InvalidParameterError):
        make_geometric_spectrum(1)
    with pytest.raises(InvalidParameterError):
        make_helmholtz_spectrum(1.0, 1)


def test_heat_spectrum_underflow_to_one_mode_is_rejected():
    """kappa = 3 leaves a single representable eigenvalue."""
    with pytest.raises(InvalidParameterError):
        make_heat_spectrum(3.0, 10)


def test_geometric_spectrum_endpoints():
    """Log-spaced from largest to smallest."""
    spectrum = make_geometric_spectrum(5, 1.0, 1e-4)
    assert spectrum.largest == 1.0
    assert spectrum.eigenvalues[-1] == pytest.approx(1e-4)
    assert spectrum.eigenvalues[1] == pytest.approx(0.1)


def test_diagonal_problem_rescales_random_xi(rng):
    """Random xi is normalized to the requested initial distance."""
    model = DiagonalProblem.from_spectrum(make_geometric_spectrum(8), initial_distance=2.0, rng=rng)
    assert model.initial_distance == pytest.approx(2.0)
    assert model.problem.distance(model.q0) == pytest.approx(2.0)
    assert model.problem.lipschitz() == 1.0


def test_diagonal_problem_checks_length():
    """xi must have one coefficient per mode."""
    with pytest.raises(ContractViolationError):
        DiagonalProblem(make_geometric_spectrum(4), np.ones(3))


def test_spectral_gradient_descent_start():
    """k = 0 returns |xi|^2."""
    model = DiagonalProblem(make_geometric_spectrum(4), np.array([1.0, 2.0, 0.0, 2.0]))
    distances = run_gradient_descent_spectral(model, 1.0, 0)
    assert distances.tolist() == [9.0]


def test_spectral_gradient_descent_matches_iteration(rng):
    """The closed form agrees with iterating q - alpha grad J."""
    model = DiagonalProblem.from_spectrum(make_geometric_spectrum(10, 1.0, 1e-2), rng=rng)
    closed = run_gradient_descent_spectral(model, 0.8, 25)
    record = run(model.problem, model.q0,
                 MethodConfig(kind=MethodKind.GRADIENT_DESCENT_FIXED, step=0.8, max_iterations=25))
    iterated = [d.distance_to_solution ** 2 for d in record.per_step] + [record.final_distance ** 2]
    np.testing.assert_allclose(iterated, closed, rtol=1e-10)
    assert np.all(np.diff(closed) <= 0.0)


def test_spectral_gradient_descent_rejects_long_step():
    """alpha > 1/lambda_1 is refused."""
    model = DiagonalProblem(make_geometric_spectrum(3), np.ones(3))
    with pytest.raises(InvalidParameterError):
        run_gradient_descent_spectral(model, 1.5, 10)
