# src/mmebench/spectral/model.py
"""
Diagonal models of compact self-adjoint normal operators.

A model lives in its own eigenbasis: B = diag(lambda_n), A0 = diag(sqrt(lambda_n)),
q* = 0 and q0 = xi. Closed-form spectra of the Helmholtz continuation and
retrospective heat problems are evaluated in extended precision (mpmath) and
rounded once.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from ..core.operators import AffineForwardOperator
from ..core.problem import QuadraticProblem
from ..core.space import SpaceDescriptor, StateVector
from ..exceptions import ContractViolationError, InvalidParameterError

logger = logging.getLogger(__name__)

EXTENDED_DPS = 40
SMALLEST_NORMAL = np.finfo(np.float64).tiny


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Strictly positive, strictly decreasing eigenvalues."""
    eigenvalues: np.ndarray
    label: str = "spectrum"

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=np.float64, copy=True).ravel()
        if values.size < 2:
            raise ContractViolationError(
                f"{self.label}: a spectrum needs at least two eigenvalues, got {values.size}")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise ContractViolationError(f"{self.label}: eigenvalues must be finite and positive")
        if np.any(np.diff(values) >= 0.0):
            raise ContractViolationError(f"{self.label}: eigenvalues must be strictly decreasing")
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)

    def __len__(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def largest(self) -> float:
        return float(self.eigenvalues[0])


def helmholtz_frequency(kappa: float, n: int) -> mpmath.mpf:
    """omega_n = sqrt(pi^2 n^2 - kappa^2), evaluated in the current mpmath precision."""
    return mpmath.sqrt((mpmath.pi * n) ** 2 - mpmath.mpf(kappa) ** 2)


def _check_helmholtz_kappa(kappa: float) -> None:
    if kappa < 0.0 or not kappa < np.pi:
        raise InvalidParameterError(f"kappa must satisfy 0 <= kappa < pi, got {kappa}")


def helmholtz_mode_factors(kappa: float, n_modes: int) -> np.ndarray:
    """1/cosh(omega_n) for n = 1..n_modes; entries beyond double range are 0."""
    _check_helmholtz_kappa(kappa)
    with mpmath.workdps(EXTENDED_DPS):
        return np.array([float(mpmath.sech(helmholtz_frequency(kappa, n)))
                         for n in range(1, n_modes + 1)])


def _truncate(values: np.ndarray, label: str) -> np.ndarray:
    keep = values >= SMALLEST_NORMAL
    if not keep.all():
        count = int(np.argmin(keep))
        logger.warning(f"{label}: eigenvalues underflow beyond mode {count}; "
                       f"spectrum truncated from {values.size} to {count} modes")
        values = values[:count]
        if count < 2:
            raise InvalidParameterError(f"{label}: only {count} eigenvalue(s) above the smallest normal double")
    return values


def make_helmholtz_spectrum(kappa: float, n_modes: int) -> Spectrum:
    """
    lambda_n = 1/cosh^2(sqrt(pi^2 n^2 - kappa^2)), n = 1..n_modes.

    Raises:
        InvalidParameterError: If kappa >= pi or n_modes < 2.
    """
    _check_helmholtz_kappa(kappa)
    if n_modes < 2:
        raise InvalidParameterError(f"n_modes must be at least 2, got {n_modes}")
    with mpmath.workdps(EXTENDED_DPS):
        values = np.array([float(mpmath.sech(helmholtz_frequency(kappa, n)) ** 2)
                           for n in range(1, n_modes + 1)])
    label = f"helmholtz(kappa={kappa:g})"
    return Spectrum(_truncate(values, label), label)


def make_heat_spectrum(kappa: float, n_modes: int) -> Spectrum:
    """
    lambda_n = exp(-2 pi^2 kappa^2 n^2), truncated where it underflows.
    """
    if not kappa > 0.0:
        raise InvalidParameterError(f"kappa must be positive, got {kappa}")
    if n_modes < 2:
        raise InvalidParameterError(f"n_modes must be at least 2, got {n_modes}")
    with mpmath.workdps(EXTENDED_DPS):
        rate = 2 * mpmath.pi ** 2 * mpmath.mpf(kappa) ** 2
        values = np.array([float(mpmath.exp(-rate * n * n)) for n in range(1, n_modes + 1)])
    label = f"heat(kappa={kappa:g})"
    return Spectrum(_truncate(values, label), label)


def make_geometric_spectrum(n_modes: int, largest: float = 1.0, smallest: float = 1e-3) -> Spectrum:
    """Log-spaced eigenvalues from `largest` down to `smallest`."""
    if n_modes < 2 or not 0.0 < smallest < largest:
        raise InvalidParameterError("geometric spectrum needs n_modes >= 2 and 0 < smallest < largest")
    return Spectrum(np.geomspace(largest, smallest, n_modes), f"geometric({largest:g}..{smallest:g})")


@dataclass(frozen=True, eq=False)
class DiagonalProblem:
    """
    Spectral model with q* = 0 and q0 = xi.

    The derived QuadraticProblem has A0 = diag(sqrt(lambda)), f = 0 and the
    exact Lipschitz constant lambda_1.
    """
    spectrum: Spectrum
    xi: np.ndarray
    problem: QuadraticProblem = field(init=False, repr=False)

    def __post_init__(self):
        xi = np.array(self.xi, dtype=np.float64, copy=True).ravel()
        if xi.size != len(self.spectrum):
            raise ContractViolationError(
                f"xi has {xi.size} coefficients for a spectrum of {len(self.spectrum)} modes"
            )
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

        space = SpaceDescriptor.uniform(len(self.spectrum), label=f"modes:{self.spectrum.label}")
        operator = AffineForwardOperator.diagonal(space, np.sqrt(self.spectrum.eigenvalues),
                                                  label=f"diag:{self.spectrum.label}")
        problem = QuadraticProblem.single(
            operator, StateVector.zeros(space),
            exact_solution=StateVector.zeros(space),
            lipschitz_estimate=self.spectrum.largest,
            label=f"diagonal:{self.spectrum.label}",
        )
        object.__setattr__(self, "problem", problem)

    @classmethod
    def from_spectrum(cls, spectrum: Spectrum, xi: Optional[np.ndarray] = None,
                      initial_distance: Optional[float] = None,
                      rng: Optional[np.random.Generator] = None) -> "DiagonalProblem":
        """
        Args:
            spectrum: Eigenvalues of B.
            xi: Coefficients of q0 - q*; a random Gaussian direction when omitted.
            initial_distance: Rescale xi to this norm (defaults to 1 for random xi).
            rng: Source for the random direction.
        """
        if xi is None:
            rng = rng if rng is not None else np.random.default_rng(0)
            xi = rng.standard_normal(len(spectrum))
            initial_distance = 1.0 if initial_distance is None else initial_distance
        xi = np.asarray(xi, dtype=np.float64)
        if initial_distance is not None:
            length = float(np.linalg.norm(xi))
            if length == 0.0:
                raise ContractViolationError("cannot rescale a zero coefficient vector")
            xi = xi * (initial_distance / length)
        return cls(spectrum=spectrum, xi=xi)

    @property
    def q0(self) -> StateVector:
        return StateVector(self.problem.domain, self.xi)

    @property
    def initial_distance(self) -> float:
        return float(np.linalg.norm(self.xi))


def run_gradient_descent_spectral(problem: DiagonalProblem, alpha: float, k: int) -> np.ndarray:
    """
    Squared distances |q_j - q*|^2 = sum_n xi_n^2 (1 - alpha lambda_n)^(2j), j = 0..k.

    Raises:
        InvalidParameterError: If alpha is not in (0, 1/lambda_1].
    """
    largest = problem.spectrum.largest
    if not 0.0 < alpha <= (1.0 / largest) * (1.0 + 1e-12):
        raise InvalidParameterError(f"step {alpha:.6g} outside (0, 1/lambda_1 = {1.0 / largest:.6g}]")
    if k < 0:
        raise ContractViolationError(f"k must be non-negative, got {k}")
    contraction = (1.0 - alpha * problem.spectrum.eigenvalues) ** 2
    factors = contraction[None, :] ** np.arange(k + 1, dtype=np.float64)[:, None]
    return factors @ (problem.xi ** 2)
