# src/mmebench/problems/heat.py
"""
Retrospective Cauchy problem for u_t = kappa(x)^2 Lap u on the unit cube (or
interval) with zero Dirichlet boundary: recover u(., 0) = q from u(., 1).

States live on the interior nodes of a uniform grid with weights h^d. The
forward map is explicit Euler in time; the adjoint is its exact transpose,
run as a reversed loop with the transposed update.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..core.operators import AffineForwardOperator
from ..core.problem import QuadraticProblem
from ..core.space import SpaceDescriptor, StateVector
from ..exceptions import InvalidParameterError
from .base import exact_solution_field
from .grid import GridSpec

logger = logging.getLogger(__name__)

DEFAULT_H = 0.04
DEFAULT_TAU = 1e-3
DESK_H = 0.1
DESK_TAU = 0.01


@dataclass(frozen=True)
class HeatSetup:
    """
    `kappa` is the constant coefficient, or kappa_max of the piecewise field
    (kappa_max inside the central cube 0.4 < x_i < 0.6, kappa_max/5 elsewhere).
    """
    dimension: int = 3
    kappa: float = 0.4
    piecewise: bool = True
    h: float = DEFAULT_H
    tau: float = DEFAULT_TAU
    final_time: float = 1.0
    data_refinement: int = 1

    def __post_init__(self):
        if self.dimension not in (1, 3):
            raise InvalidParameterError(f"heat problems are 1-D or 3-D, got dimension {self.dimension}")
        if not self.kappa > 0.0:
            raise InvalidParameterError(f"kappa must be positive, got {self.kappa}")
        if self.data_refinement not in (1, 2):
            raise InvalidParameterError(f"data_refinement must be 1 or 2, got {self.data_refinement}")

    @classmethod
    def one_dimensional(cls, kappa: float = 1.0, h: float = 0.01, tau: float = 2e-5, **kwargs) -> "HeatSetup":
        return cls(dimension=1, kappa=kappa, piecewise=False, h=h, tau=tau, **kwargs)

    @property
    def grid(self) -> GridSpec:
        return GridSpec.unit(self.h, self.tau, self.dimension, self.final_time)

    @property
    def label(self) -> str:
        field = f"kappa_max={self.kappa:g}" if self.piecewise else f"kappa={self.kappa:g}"
        return f"heat{self.dimension}d({field}, h={self.h:g}, tau={self.tau:g})"


def interior_space(grid: GridSpec, label: str = "interior") -> SpaceDescriptor:
    shape = tuple(c - 1 for c in grid.cells)
    dim = int(np.prod(shape))
    return SpaceDescriptor(dim=dim, weights=np.full(dim, grid.h ** grid.dim), label=label,
                           shape=shape, spacing=(grid.h,) * grid.dim)


def _mesh(grid: GridSpec):
    axes = [grid.interior_nodes(axis) for axis in range(grid.dim)]
    return np.meshgrid(*axes, indexing="ij")


def kappa_squared_field(setup: HeatSetup, grid: GridSpec) -> np.ndarray:
    """kappa(x)^2 sampled at interior nodes."""
    shape = tuple(c - 1 for c in grid.cells)
    if not setup.piecewise:
        return np.full(shape, setup.kappa ** 2)
    inside = np.ones(shape, dtype=bool)
    for coordinate in _mesh(grid):
        inside &= (coordinate > 0.4) & (coordinate < 0.6)
    kappa = np.where(inside, setup.kappa, setup.kappa / 5.0)
    return kappa ** 2


def dirichlet_laplacian(u: np.ndarray, h: float) -> np.ndarray:
    """Standard (2d+1)-point Laplacian with zero boundary values."""
    padded = np.pad(u, 1)
    out = -2.0 * u.ndim * u
    core = [slice(1, -1)] * u.ndim
    for axis in range(u.ndim):
        for shifted in (slice(None, -2), slice(2, None)):
            index = list(core)
            index[axis] = shifted
            out = out + padded[tuple(index)]
    return out / (h * h)


def heat_exact_3d(x1: np.ndarray, x2: np.ndarray, x3: np.ndarray) -> np.ndarray:
    """q*(x) = sin(2 pi x1) sin^2(2 pi x2) sin^3(2 pi x3)."""
    return np.sin(2 * np.pi * x1) * np.sin(2 * np.pi * x2) ** 2 * np.sin(2 * np.pi * x3) ** 3


def heat_exact_1d(x: np.ndarray) -> np.ndarray:
    """q*(x) = sin(pi x) + sin(2 pi x)/2."""
    return np.sin(np.pi * x) + 0.5 * np.sin(2 * np.pi * x)


def _sample_exact(setup: HeatSetup, grid: GridSpec) -> np.ndarray:
    mesh = _mesh(grid)
    if setup.dimension == 3:
        return heat_exact_3d(*mesh)
    return heat_exact_1d(mesh[0])


@exact_solution_field.register
def _(setup: HeatSetup) -> StateVector:
    grid = setup.grid
    return StateVector(interior_space(grid, setup.label), _sample_exact(setup, grid).ravel())


def _propagators(grid: GridSpec, kappa_sq: np.ndarray) -> Tuple[Callable, Callable]:
    shape = kappa_sq.shape
    scaled = grid.tau * kappa_sq
    steps = grid.steps
    h = grid.h

    def forward(values: np.ndarray) -> np.ndarray:
        u = values.reshape(shape).copy()
        for _ in range(steps):
            u += scaled * dirichlet_laplacian(u, h)
        return u.ravel()

    def adjoint(values: np.ndarray) -> np.ndarray:
        # weights are uniform, so the adjoint is the plain transpose (I + tau L K)^N
        v = values.reshape(shape).copy()
        for _ in reversed(range(steps)):
            v += grid.tau * dirichlet_laplacian(kappa_sq * v, h)
        return v.ravel()

    return forward, adjoint


def _refined_data(setup: HeatSetup, grid: GridSpec) -> np.ndarray:
    """Final-time field from a grid with h/2 and tau/4, restricted to the coarse nodes."""
    fine = grid.refined(space_factor=2, time_factor=4)
    fine.check_heat_stability(setup.kappa)
    forward, _ = _propagators(fine, kappa_squared_field(setup, fine))
    field = forward(_sample_exact(setup, fine).ravel()).reshape(tuple(c - 1 for c in fine.cells))
    return field[(slice(1, None, 2),) * grid.dim].ravel()


def constant_kappa_lipschitz(kappa: float, grid: GridSpec) -> float:
    """|A0|^2 for constant kappa from the extreme eigenvalues of the discrete Laplacian."""
    low = grid.dim * 4.0 / grid.h ** 2 * np.sin(np.pi * grid.h / 2.0) ** 2
    high = grid.dim * 4.0 / grid.h ** 2 * np.cos(np.pi * grid.h / 2.0) ** 2
    factors = np.abs(1.0 - grid.tau * kappa ** 2 * np.array([low, high]))
    return float(np.max(factors) ** (2 * grid.steps))


def make_heat_operator(setup: HeatSetup, grid: Optional[GridSpec] = None
                       ) -> Tuple[AffineForwardOperator, QuadraticProblem]:
    """
    Final-time observation operator and its inverse-crime problem.

    Raises:
        StabilityViolationError: If kappa_max^2 tau 2d / h^2 > 1.
    """
    grid = grid if grid is not None else setup.grid
    grid.check_heat_stability(setup.kappa)
    space = interior_space(grid, setup.label)
    kappa_sq = kappa_squared_field(setup, grid)
    forward, adjoint = _propagators(grid, kappa_sq)
    operator = AffineForwardOperator(domain=space, codomain=space, linear_map=forward,
                                     adjoint_map=adjoint, label=setup.label)

    exact = StateVector(space, _sample_exact(setup, grid).ravel())
    if setup.data_refinement == 2:
        data = StateVector(space, _refined_data(setup, grid))
        logger.info(f"{setup.label}: data generated on a refined grid")
    else:
        data = operator.apply(exact)
    lipschitz = None if setup.piecewise else constant_kappa_lipschitz(setup.kappa, grid)
    problem = QuadraticProblem.single(operator, data, exact_solution=exact, label=setup.label,
                                      lipschitz_estimate=lipschitz, noiseless=setup.data_refinement == 1)
    logger.info(f"Built {setup.label}: {space.dim} unknowns, {grid.steps} time steps")
    return operator, problem
