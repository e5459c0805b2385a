# src/mmebench/spectral/adversarial.py
"""
Slow starting points for N-step Krylov methods.

For q0 - q* = sum_n xi_n w_n every method whose iterates stay in q0 + K_N
ends at a point with squared distance at least

    Psi_min = min_eta sum_n xi_n^2 (1 + sum_{i=1..N} eta_i lambda_n^i)^2.

Putting most of the mass on one deep mode M makes Psi_min stay above any
epsilon < 1 once M is large enough.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from ..exceptions import ContractViolationError, InvalidParameterError, NeedsLongerSpectrumError
from ..models import AdversarialCertificate
from .model import Spectrum

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e14
GRADIENT_CERTIFICATE = 1e-8


@dataclass(frozen=True)
class PsiSolution:
    psi: float
    eta_hat: np.ndarray
    gradient_norm: float
    condition_estimate: float
    ill_conditioned: bool


def _weighted_monomials(spectrum: Spectrum, xi: np.ndarray, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rows xi_n (lambda_n/lambda_1)^i, i = 1..N, over the support of xi."""
    support = np.flatnonzero(xi)
    scaled = spectrum.eigenvalues[support] / spectrum.largest
    powers = np.arange(1, N + 1, dtype=np.float64)
    rows = xi[support][:, None] * scaled[:, None] ** powers[None, :]
    return rows, xi[support]


def solve_psi(spectrum: Spectrum, xi: np.ndarray, N: int) -> PsiSolution:
    """
    Minimize Psi through the N x N normal system in rescaled monomials.

    The normal matrix is factored with symmetric (Bunch-Kaufman) pivoting;
    past the condition limit the weighted Vandermonde least-squares problem
    is solved by SVD instead. The gradient norm is reported in the rescaled
    coordinates.
    """
    if N < 1:
        raise ContractViolationError(f"N must be positive, got {N}")
    xi = np.asarray(xi, dtype=np.float64).ravel()
    if xi.size != len(spectrum):
        raise ContractViolationError(f"xi has {xi.size} entries for {len(spectrum)} modes")

    rows, weights = _weighted_monomials(spectrum, xi, N)
    if weights.size == 0:
        return PsiSolution(0.0, np.zeros(N), 0.0, 1.0, False)

    normal = rows.T @ rows
    rhs = -rows.T @ weights
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        condition = float(np.linalg.cond(normal))
    ill_conditioned = not condition <= CONDITION_LIMIT
    if ill_conditioned:
        logger.debug(f"Psi normal system ill-conditioned (cond ~ {condition:.2e}); using SVD least squares")
        eta_scaled = scipy.linalg.lstsq(rows, -weights, lapack_driver="gelsd")[0]
    else:
        eta_scaled = scipy.linalg.solve(normal, rhs, assume_a="sym")

    residual = weights + rows @ eta_scaled
    psi = float(residual @ residual)
    gradient_norm = float(np.linalg.norm(2.0 * rows.T @ residual))
    with np.errstate(over="ignore", invalid="ignore"):
        eta_hat = eta_scaled / spectrum.largest ** np.arange(1, N + 1, dtype=np.float64)
    return PsiSolution(psi, eta_hat, gradient_norm, condition, ill_conditioned)


def psi_min(spectrum: Spectrum, xi: np.ndarray, N: int) -> Tuple[float, np.ndarray]:
    """Minimum of Psi over eta in R^N and the minimizer in the original monomials."""
    solution = solve_psi(spectrum, xi, N)
    return solution.psi, solution.eta_hat


def psi_value(spectrum: Spectrum, xi: np.ndarray, eta: np.ndarray) -> float:
    """Psi(eta) evaluated directly."""
    eta = np.asarray(eta, dtype=np.float64)
    lam = spectrum.eigenvalues
    powers = lam[:, None] ** np.arange(1, eta.size + 1, dtype=np.float64)[None, :]
    return float(np.sum(np.asarray(xi) ** 2 * (1.0 + powers @ eta) ** 2))


def adversarial_coefficients(n_modes: int, N: int, epsilon: float, M: int) -> np.ndarray:
    """xi_1..xi_N = sqrt((1-eps)/(2N)), xi_M = sqrt((1+eps)/2), zero elsewhere (M is 1-based)."""
    xi = np.zeros(n_modes)
    xi[:N] = math.sqrt((1.0 - epsilon) / (2.0 * N))
    xi[M - 1] = math.sqrt((1.0 + epsilon) / 2.0)
    return xi


def _annihilating_value(spectrum: Spectrum, N: int, epsilon: float, M: int) -> float:
    """Psi at the polynomial with roots at lambda_1..lambda_N."""
    lam = spectrum.eigenvalues
    product = float(np.prod(1.0 - lam[M - 1] / lam[:N]))
    return 0.5 * (1.0 + epsilon) * product ** 2


def adversarial_initial_point(spectrum: Spectrum, N: int, epsilon: float) -> AdversarialCertificate:
    """
    Find a tail mode M > N for which Psi_min exceeds epsilon.

    M is searched by doubling the offset from N + 1, then refined by
    bisection between the last failing and the first certifying index. An
    index certifies when Psi_min > epsilon and the gradient of Psi at the
    minimizer is at most GRADIENT_CERTIFICATE.

    Raises:
        InvalidParameterError: If epsilon is outside (0, 1) or N < 1.
        NeedsLongerSpectrumError: If no mode of the spectrum certifies.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if N < 1:
        raise InvalidParameterError(f"N must be positive, got {N}")
    n_modes = len(spectrum)
    if n_modes < N + 1:
        raise NeedsLongerSpectrumError(0.0, n_modes)

    def attempt(M: int) -> PsiSolution:
        return solve_psi(spectrum, adversarial_coefficients(n_modes, N, epsilon, M), N)

    def certifies(solution: PsiSolution) -> bool:
        return solution.psi > epsilon and solution.gradient_norm <= GRADIENT_CERTIFICATE

    best = 0.0
    failing = None
    offset = 1
    M = N + 1
    while True:
        solution = attempt(M)
        logger.debug(f"Adversarial search N={N}: M={M}, psi_min={solution.psi:.6g}, "
                     f"gradient {solution.gradient_norm:.2e}")
        if certifies(solution):
            break
        best = max(best, solution.psi)
        failing = M
        if M == n_modes:
            logger.warning(f"Adversarial search exhausted {n_modes} modes (best psi_min {best:.6g})")
            raise NeedsLongerSpectrumError(best, n_modes)
        offset *= 2
        M = min(N + offset, n_modes)

    if failing is not None:
        low, high = failing, M
        while high - low > 1:
            middle = (low + high) // 2
            trial = attempt(middle)
            if certifies(trial):
                high, solution = middle, trial
            else:
                low = middle
        M = high

    xi = adversarial_coefficients(n_modes, N, epsilon, M)
    certificate = AdversarialCertificate(
        N=N, epsilon=epsilon, M=M, xi=xi.tolist(), psi_min=solution.psi,
        eta_hat=solution.eta_hat.tolist(), spectrum_label=spectrum.label,
        psi_tilde=_annihilating_value(spectrum, N, epsilon, M),
        upper_threshold=(1.0 + 3.0 * epsilon) / 4.0,
        lower_threshold=(1.0 - epsilon) / 4.0,
        gradient_norm=solution.gradient_norm,
        condition_estimate=solution.condition_estimate,
        ill_conditioned=solution.ill_conditioned,
    )
    logger.info(f"Adversarial point certified: N={N}, eps={epsilon}, M={M}, psi_min={solution.psi:.6g}")
    return certificate
