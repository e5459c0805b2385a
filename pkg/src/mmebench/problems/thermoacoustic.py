# src/mmebench/problems/thermoacoustic.py
"""
Thermoacoustic inverse problem on the unit square: recover u(., 0) = q of

    u_tt = u_xx + u_yy,  u_t(., 0) = 0,  zero Neumann data on every side,

from the traces of u on the faces x = 0, x = 1 and y = 1 over t in [0, 1].

The grid is node-centred with trapezoid weights; ghost reflection gives a
Neumann Laplacian L that is self-adjoint in the weighted inner product.
Leapfrog in time: u^1 = u^0 + (tau^2/2) L u^0, u^{n+1} = M u^n - u^{n-1}
with M = 2 + tau^2 L. Every level u^n is a polynomial in L applied to q,
so the exact adjoint of (trace o time loop) is a reverse three-term sweep.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from ..core.operators import AffineForwardOperator
from ..core.problem import ProblemTerm, QuadraticProblem
from ..core.space import SpaceDescriptor, StateVector
from ..exceptions import InvalidParameterError
from .base import exact_solution_field
from .grid import GridSpec

logger = logging.getLogger(__name__)

BACKGROUND = 0.1


class Face(str, Enum):
    LEFT = "x0"
    RIGHT = "x1"
    TOP = "y1"


OBSERVED_FACES = (Face.LEFT, Face.RIGHT, Face.TOP)


@dataclass(frozen=True)
class ThermoacousticSetup:
    h: float = 0.02
    tau: float = 0.002
    final_time: float = 1.0
    initial_value: float = 0.0
    data_refinement: int = 1

    def __post_init__(self):
        if self.data_refinement not in (1, 2):
            raise InvalidParameterError(f"data_refinement must be 1 or 2, got {self.data_refinement}")

    @property
    def grid(self) -> GridSpec:
        return GridSpec.unit(self.h, self.tau, 2, self.final_time)

    @property
    def label(self) -> str:
        return f"thermoacoustic(h={self.h:g}, tau={self.tau:g})"


def thermoacoustic_exact(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """0.1 plus a raised-cosine bump on each of the four squares [1/8, 3/8] u [5/8, 7/8]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)

    def in_bands(t):
        return ((t >= 0.125) & (t <= 0.375)) | ((t >= 0.625) & (t <= 0.875))

    bump = (1.0 + np.cos(8 * np.pi * x)) * (1.0 + np.cos(8 * np.pi * y)) / 32.0
    return BACKGROUND + np.where(in_bands(x) & in_bands(y), bump, 0.0)


def node_space(grid: GridSpec, label: str = "square") -> SpaceDescriptor:
    counts = tuple(c + 1 for c in grid.cells)
    return SpaceDescriptor.trapezoid(counts, (grid.h,) * grid.dim, label=label)


def trace_space(grid: GridSpec, face: Face) -> SpaceDescriptor:
    """Face nodes by time levels, trapezoid weights in both variables."""
    return SpaceDescriptor.trapezoid((grid.steps + 1, grid.cells[0] + 1), (grid.tau, grid.h),
                                     label=f"trace:{face.value}")


def neumann_laplacian(u: np.ndarray, h: float) -> np.ndarray:
    """Five-point Laplacian with ghost values reflected across each side."""
    padded = np.pad(u, 1, mode="reflect")
    return (padded[2:, 1:-1] + padded[:-2, 1:-1] + padded[1:-1, 2:] + padded[1:-1, :-2]
            - 4.0 * u) / (h * h)


def _face_index(face: Face):
    return {Face.LEFT: (0, slice(None)), Face.RIGHT: (-1, slice(None)),
            Face.TOP: (slice(None), -1)}[face]


def leapfrog_traces(q: np.ndarray, grid: GridSpec, faces=OBSERVED_FACES) -> dict:
    """Run the forward scheme once and record u on each face at every level."""
    h2 = grid.tau ** 2
    levels = grid.steps + 1
    traces = {face: np.empty((levels, q.shape[1] if face != Face.TOP else q.shape[0])) for face in faces}

    def record(n, u):
        for face in faces:
            traces[face][n] = u[_face_index(face)]

    previous = q.copy()
    record(0, previous)
    current = previous + 0.5 * h2 * neumann_laplacian(previous, grid.h)
    record(1, current)
    for n in range(2, levels):
        previous, current = current, 2.0 * current + h2 * neumann_laplacian(current, grid.h) - previous
        record(n, current)
    return traces


def _propagators(grid: GridSpec, face: Face) -> Tuple[Callable, Callable]:
    shape = tuple(c + 1 for c in grid.cells)
    h2 = grid.tau ** 2
    index = _face_index(face)
    time_weights = np.full(grid.steps + 1, grid.tau)
    time_weights[[0, -1]] *= 0.5

    def forward(values: np.ndarray) -> np.ndarray:
        return leapfrog_traces(values.reshape(shape), grid, faces=(face,))[face].ravel()

    def source(p: np.ndarray, n: int) -> np.ndarray:
        # W^{-1} T^T W_trace p^n: face nodes carry normal weight h/2
        r = np.zeros(shape)
        r[index] = time_weights[n] * (2.0 / grid.h) * p[n]
        return r

    def adjoint(values: np.ndarray) -> np.ndarray:
        p = values.reshape(grid.steps + 1, -1)
        # Clenshaw sweep: mu^n = r^n + M mu^{n+1} - mu^{n+2}, mu^{N+1} = 0
        current = source(p, grid.steps)
        ahead = np.zeros(shape)
        for n in range(grid.steps - 1, 0, -1):
            current, ahead = (source(p, n) + 2.0 * current + h2 * neumann_laplacian(current, grid.h)
                              - ahead), current
        # r^0 + S1 mu^1 - mu^2 with S1 = 1 + (tau^2/2) L
        result = source(p, 0) + current + 0.5 * h2 * neumann_laplacian(current, grid.h) - ahead
        return result.ravel()

    return forward, adjoint


def make_trace_operator(grid: GridSpec, face: Face, domain: Optional[SpaceDescriptor] = None
                        ) -> AffineForwardOperator:
    domain = domain if domain is not None else node_space(grid)
    forward, adjoint = _propagators(grid, face)
    return AffineForwardOperator(domain=domain, codomain=trace_space(grid, face), linear_map=forward,
                                 adjoint_map=adjoint, label=f"trace:{face.value}")


def _mesh(grid: GridSpec):
    return np.meshgrid(grid.nodes(0), grid.nodes(1), indexing="ij")


@exact_solution_field.register
def _(setup: ThermoacousticSetup) -> StateVector:
    grid = setup.grid
    return StateVector(node_space(grid, setup.label), thermoacoustic_exact(*_mesh(grid)).ravel())


def _refined_traces(setup: ThermoacousticSetup, grid: GridSpec) -> dict:
    """Traces from a grid with h/2 and tau/2, restricted to the coarse nodes and levels."""
    fine = grid.refined(space_factor=2, time_factor=2)
    fine.check_wave_cfl()
    traces = leapfrog_traces(thermoacoustic_exact(*_mesh(fine)), fine)
    return {face: trace[::2, ::2] for face, trace in traces.items()}


def make_thermoacoustic_problem(setup: ThermoacousticSetup) -> QuadraticProblem:
    """
    Composite problem with one term per observed face and inverse-crime data.

    Raises:
        StabilityViolationError: If tau/h > 1/sqrt(2).
    """
    grid = setup.grid
    grid.check_wave_cfl()
    domain = node_space(grid, setup.label)
    exact = exact_solution_field(setup)

    if setup.data_refinement == 2:
        traces = _refined_traces(setup, grid)
        logger.info(f"{setup.label}: data generated on a refined grid")
    else:
        traces = leapfrog_traces(exact.as_grid(), grid)

    terms = []
    for face in OBSERVED_FACES:
        operator = make_trace_operator(grid, face, domain)
        terms.append(ProblemTerm(operator, StateVector(operator.codomain, traces[face].ravel())))

    problem = QuadraticProblem(terms=tuple(terms), exact_solution=exact, label=setup.label,
                               noiseless=setup.data_refinement == 1)
    logger.info(f"Built {setup.label}: {domain.dim} unknowns, {grid.steps} steps, {len(terms)} traces")
    return problem


def initial_guess(setup: ThermoacousticSetup) -> StateVector:
    return StateVector.full(node_space(setup.grid, setup.label), setup.initial_value)


def continuous_adjoint(setup: ThermoacousticSetup, face: Face, p: np.ndarray) -> np.ndarray:
    """
    psi_t(., 0) of the backward problem psi_tt = Lap psi, psi(1) = psi_t(1) = 0,
    with outward normal derivative -p on the observed face.

    The flux enters the ghost-reflected Laplacian as the source -(2/h) p on
    the face nodes. Agrees with the discrete transpose only to O(h + tau).
    """
    grid = setup.grid
    shape = tuple(c + 1 for c in grid.cells)
    h2 = grid.tau ** 2
    p = np.asarray(p, dtype=np.float64).reshape(grid.steps + 1, -1)
    index = _face_index(face)

    def forcing(n: int) -> np.ndarray:
        f = np.zeros(shape)
        f[index] = -(2.0 / grid.h) * p[n]
        return f

    last = grid.steps
    ahead = np.zeros(shape)
    current = 0.5 * h2 * forcing(last)
    for n in range(last - 1, 0, -1):
        current, ahead = (2.0 * current - ahead + h2 * (neumann_laplacian(current, grid.h) + forcing(n))), current
    # current = psi^0, ahead = psi^1; one-sided read-out of the time derivative
    velocity = (2.0 * ahead - 2.0 * current
                - h2 * (neumann_laplacian(current, grid.h) + forcing(0))) / (2.0 * grid.tau)
    return velocity.ravel()
