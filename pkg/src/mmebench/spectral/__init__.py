# src/mmebench/spectral/__init__.py
from .adversarial import adversarial_initial_point, psi_min, psi_value, solve_psi
from .model import (
    DiagonalProblem,
    Spectrum,
    helmholtz_mode_factors,
    make_geometric_spectrum,
    make_heat_spectrum,
    make_helmholtz_spectrum,
    run_gradient_descent_spectral,
)

__all__ = [
    "DiagonalProblem",
    "Spectrum",
    "adversarial_initial_point",
    "helmholtz_mode_factors",
    "make_geometric_spectrum",
    "make_heat_spectrum",
    "make_helmholtz_spectrum",
    "psi_min",
    "psi_value",
    "run_gradient_descent_spectral",
    "solve_psi",
]
