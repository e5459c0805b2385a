# src/mmebench/services/problem_factory.py
"""
Builds a problem and its common starting point from an experiment's
problem selector and parameters.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from ..core.problem import QuadraticProblem
from ..core.space import StateVector
from ..exceptions import InvalidParameterError
from ..models import AdversarialCertificate, ProblemSelector
from ..problems.heat import DEFAULT_H, DEFAULT_TAU, DESK_H, DESK_TAU, HeatSetup, make_heat_operator
from ..problems.helmholtz import HelmholtzModelSetup, make_helmholtz_operator
from ..problems.thermoacoustic import ThermoacousticSetup, initial_guess, make_thermoacoustic_problem
from ..spectral.adversarial import adversarial_initial_point
from ..spectral.model import (
    DiagonalProblem,
    Spectrum,
    make_geometric_spectrum,
    make_heat_spectrum,
    make_helmholtz_spectrum,
)
from ..utils.helper import make_rng

logger = logging.getLogger(__name__)

# Accepted keys per selector with their defaults.
PROBLEM_PARAMETERS: Dict[ProblemSelector, Dict[str, Any]] = {
    ProblemSelector.HELMHOLTZ: {"kappa": 1.0, "n_modes": 200},
    ProblemSelector.HEAT1D: {"kappa": 1.0, "h": 0.01, "tau": 2e-5, "data_refinement": 1},
    ProblemSelector.HEAT3D: {"kappa_max": 0.4, "h": None, "tau": None, "desk": False, "data_refinement": 1},
    ProblemSelector.THERMOACOUSTIC: {"h": 0.02, "tau": 0.002, "initial_value": 0.0, "data_refinement": 1},
    ProblemSelector.DIAGONAL: {"spectrum": "helmholtz", "n_modes": 20, "kappa": 1.0, "smallest": 1e-3,
                               "initial_distance": 1.0},
    ProblemSelector.ADVERSARIAL: {"spectrum": "helmholtz", "n_modes": 200, "kappa": 1.0, "smallest": 1e-3,
                                  "N": 2, "epsilon": 0.5},
}


@dataclass
class BuiltProblem:
    problem: QuadraticProblem
    q0: StateVector
    description: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    certificate: Optional[AdversarialCertificate] = None
    coordinates: Optional[List[np.ndarray]] = None
    spectrum: Optional[Spectrum] = None


def resolve_parameters(selector: ProblemSelector, params: Mapping[str, Any]) -> Dict[str, Any]:
    """Defaults overlaid with `params`; unknown keys are rejected."""
    defaults = PROBLEM_PARAMETERS[selector]
    unknown = sorted(set(params) - set(defaults))
    if unknown:
        raise InvalidParameterError(f"unknown parameters for {selector.value}: {', '.join(unknown)}")
    resolved = dict(defaults)
    resolved.update(params)
    return resolved


def make_spectrum(kind: str, n_modes: int, kappa: float = 1.0, smallest: float = 1e-3) -> Spectrum:
    if kind == "helmholtz":
        return make_helmholtz_spectrum(kappa, n_modes)
    if kind == "heat":
        return make_heat_spectrum(kappa, n_modes)
    if kind == "geometric":
        return make_geometric_spectrum(n_modes, 1.0, smallest)
    raise InvalidParameterError(f"unknown spectrum '{kind}' (helmholtz | heat | geometric)")


def build_problem(selector: ProblemSelector, params: Optional[Mapping[str, Any]] = None,
                  seed: int = 0) -> BuiltProblem:
    """
    Args:
        selector: Problem family.
        params: Family parameters (see PROBLEM_PARAMETERS).
        seed: Seed for random starting points.

    Returns:
        BuiltProblem: The problem with the q0 shared by every method.
    """
    selector = ProblemSelector(selector)
    p = resolve_parameters(selector, params or {})

    if selector == ProblemSelector.HELMHOLTZ:
        setup = HelmholtzModelSetup(kappa=float(p["kappa"]), n_modes=int(p["n_modes"]))
        _, problem = make_helmholtz_operator(setup)
        built = BuiltProblem(problem, StateVector.zeros(problem.domain), problem.label, p)

    elif selector in (ProblemSelector.HEAT1D, ProblemSelector.HEAT3D):
        if selector == ProblemSelector.HEAT1D:
            setup = HeatSetup.one_dimensional(kappa=float(p["kappa"]), h=float(p["h"]), tau=float(p["tau"]),
                                              data_refinement=int(p["data_refinement"]))
        else:
            h = p["h"] if p["h"] is not None else (DESK_H if p["desk"] else DEFAULT_H)
            tau = p["tau"] if p["tau"] is not None else (DESK_TAU if p["desk"] else DEFAULT_TAU)
            setup = HeatSetup(dimension=3, kappa=float(p["kappa_max"]), h=float(h), tau=float(tau),
                              data_refinement=int(p["data_refinement"]))
        _, problem = make_heat_operator(setup)
        grid = setup.grid
        built = BuiltProblem(problem, StateVector.zeros(problem.domain), problem.label, p,
                             coordinates=[grid.interior_nodes(a) for a in range(grid.dim)])

    elif selector == ProblemSelector.THERMOACOUSTIC:
        setup = ThermoacousticSetup(h=float(p["h"]), tau=float(p["tau"]),
                                    initial_value=float(p["initial_value"]),
                                    data_refinement=int(p["data_refinement"]))
        problem = make_thermoacoustic_problem(setup)
        grid = setup.grid
        built = BuiltProblem(problem, initial_guess(setup), problem.label, p,
                             coordinates=[grid.nodes(0), grid.nodes(1)])

    elif selector == ProblemSelector.DIAGONAL:
        spectrum = make_spectrum(str(p["spectrum"]), int(p["n_modes"]), float(p["kappa"]), float(p["smallest"]))
        model = DiagonalProblem.from_spectrum(spectrum, initial_distance=float(p["initial_distance"]),
                                              rng=make_rng(seed, stream=1))
        built = BuiltProblem(model.problem, model.q0, model.problem.label, p, spectrum=spectrum)

    else:
        spectrum = make_spectrum(str(p["spectrum"]), int(p["n_modes"]), float(p["kappa"]), float(p["smallest"]))
        certificate = adversarial_initial_point(spectrum, int(p["N"]), float(p["epsilon"]))
        model = DiagonalProblem(spectrum=spectrum, xi=np.asarray(certificate.xi))
        built = BuiltProblem(model.problem, model.q0, f"adversarial:{spectrum.label}", p,
                             certificate=certificate, spectrum=spectrum)

    logger.info(f"Problem ready: {built.description} ({built.problem.domain.dim} unknowns)")
    return built
