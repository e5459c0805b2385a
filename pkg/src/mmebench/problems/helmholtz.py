# src/mmebench/problems/helmholtz.py
"""
Boundary continuation for the Helmholtz equation on the unit square:

    u_xx + u_yy + kappa^2 u = r,  u_x(0, y) = g(y),  u(x, 0) = u(x, 1) = 0,

with r = -x (2 - y + y^2), g = y - y^2 and the unknown q = u(1, y). The
forward map returns u(0, y); the observed data is f = 0.

The state is the sine-coefficient vector of q on (0, 1), so the inner
product of L2(0, 1) has weight 1/2 per coefficient. Mode n solves

    u_n'' - omega_n^2 u_n = rho_n x,  u_n'(0) = g_n,  u_n(1) = q_n,

which gives u_n(0) = q_n / cosh(omega_n) + C_n with a q-independent C_n.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import mpmath
import numpy as np
import scipy.fft

from ..core.operators import AffineForwardOperator
from ..core.problem import QuadraticProblem
from ..core.space import SpaceDescriptor, StateVector
from ..exceptions import InvalidParameterError
from ..spectral.model import EXTENDED_DPS, helmholtz_frequency, helmholtz_mode_factors
from .base import exact_solution_field

logger = logging.getLogger(__name__)

CONSISTENT_KAPPA = 1.0


@dataclass(frozen=True)
class HelmholtzModelSetup:
    kappa: float = 1.0
    n_modes: int = 200

    def __post_init__(self):
        if self.n_modes < 1:
            raise InvalidParameterError(f"n_modes must be positive, got {self.n_modes}")
        if self.kappa < 0.0 or not self.kappa < np.pi:
            raise InvalidParameterError(f"kappa must satisfy 0 <= kappa < pi, got {self.kappa}")

    @property
    def has_exact_solution(self) -> bool:
        return abs(self.kappa - CONSISTENT_KAPPA) < 1e-12


def sine_space(n_modes: int) -> SpaceDescriptor:
    return SpaceDescriptor.uniform(n_modes, label=f"sine-modes({n_modes})", weight=0.5)


def _parabola_coefficient(n: int) -> mpmath.mpf:
    """Sine coefficient of y - y^2: 8/(pi n)^3 for odd n."""
    return 8 / (mpmath.pi * n) ** 3 if n % 2 else mpmath.mpf(0)


def _constant_coefficient(n: int) -> mpmath.mpf:
    """Sine coefficient of 1: 4/(pi n) for odd n."""
    return 4 / (mpmath.pi * n) if n % 2 else mpmath.mpf(0)


def helmholtz_offset(setup: HelmholtzModelSetup) -> np.ndarray:
    """Coefficients of A(0) = u(0, y) for q = 0."""
    offsets = np.zeros(setup.n_modes)
    with mpmath.workdps(EXTENDED_DPS):
        for n in range(1, setup.n_modes + 1):
            omega = helmholtz_frequency(setup.kappa, n)
            g_n = _parabola_coefficient(n)
            # r = -x (2 - (y - y^2))
            rho = -(2 * _constant_coefficient(n) - g_n)
            c2 = (g_n + rho / omega ** 2) / omega
            c1 = rho * mpmath.sech(omega) / omega ** 2 - c2 * mpmath.tanh(omega)
            offsets[n - 1] = float(c1)
    return offsets


def helmholtz_exact(y: np.ndarray) -> np.ndarray:
    """q*(y) = y - y^2."""
    y = np.asarray(y, dtype=np.float64)
    return y - y * y


def synthesize_sine_series(coefficients: np.ndarray, n_points: Optional[int] = None
                           ) -> Tuple[np.ndarray, np.ndarray]:
    """
    Values of sum_n c_n sin(pi n y) at y_k = k/(n_points + 1), k = 1..n_points.

    Uses a type-I discrete sine transform; n_points defaults to the number of
    coefficients.
    """
    coefficients = np.asarray(coefficients, dtype=np.float64).ravel()
    n_points = coefficients.size if n_points is None else n_points
    if n_points < coefficients.size:
        raise InvalidParameterError(f"{n_points} points cannot resolve {coefficients.size} modes")
    padded = np.zeros(n_points)
    padded[:coefficients.size] = coefficients
    y = np.arange(1, n_points + 1) / (n_points + 1)
    return y, scipy.fft.dst(padded, type=1) / 2.0


@exact_solution_field.register
def _(setup: HelmholtzModelSetup) -> StateVector:
    with mpmath.workdps(EXTENDED_DPS):
        coefficients = [float(_parabola_coefficient(n)) for n in range(1, setup.n_modes + 1)]
    return StateVector(sine_space(setup.n_modes), coefficients)


def make_helmholtz_operator(setup: HelmholtzModelSetup) -> Tuple[AffineForwardOperator, QuadraticProblem]:
    """
    Diagonal spectral operator with factors 1/cosh(omega_n) and the offset of
    the inhomogeneous data.

    Raises:
        InvalidParameterError: If kappa >= pi.
    """
    space = sine_space(setup.n_modes)
    factors = helmholtz_mode_factors(setup.kappa, setup.n_modes)
    offset = StateVector(space, helmholtz_offset(setup))
    label = f"helmholtz(kappa={setup.kappa:g}, modes={setup.n_modes})"
    operator = AffineForwardOperator.diagonal(space, factors, offset=offset, label=label)

    exact = None
    if setup.has_exact_solution:
        exact = exact_solution_field(setup)
    else:
        logger.warning(f"{label}: model data is consistent only for kappa = 1; no exact solution attached")

    problem = QuadraticProblem.single(operator, StateVector.zeros(space), exact_solution=exact,
                                      lipschitz_estimate=float(factors[0] ** 2), label=label)
    logger.info(f"Built {label}")
    return operator, problem
