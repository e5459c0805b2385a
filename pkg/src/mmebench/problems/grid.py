# src/mmebench/problems/grid.py
"""
Uniform space-time grids on the unit square/cube and the unit time interval,
with the stability bounds of the explicit schemes built on them.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import ContractViolationError, StabilityViolationError

logger = logging.getLogger(__name__)

EXTENT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """
    `cells` cells per space axis of width `h`, and time steps of length `tau`
    up to `final_time`.
    """
    cells: Tuple[int, ...]
    h: float
    tau: float
    final_time: float = 1.0

    def __post_init__(self):
        if not self.cells or any(c < 2 for c in self.cells):
            raise ContractViolationError(f"every axis needs at least 2 cells, got {self.cells}")
        if not (self.h > 0.0 and self.tau > 0.0 and self.final_time > 0.0):
            raise ContractViolationError("h, tau and final_time must be positive")
        for count in self.cells:
            if abs(count * self.h - 1.0) > EXTENT_TOLERANCE * max(1.0, count):
                raise ContractViolationError(f"{count} cells of width {self.h} do not cover [0, 1]")
        if abs(self.steps * self.tau - self.final_time) > EXTENT_TOLERANCE * max(1.0, self.steps):
            raise ContractViolationError(f"tau = {self.tau} does not divide final time {self.final_time}")

    @classmethod
    def unit(cls, h: float, tau: float, dim: int, final_time: float = 1.0) -> "GridSpec":
        """Grid with round(1/h) cells per axis."""
        if not h > 0.0:
            raise ContractViolationError(f"h must be positive, got {h}")
        count = int(round(1.0 / h))
        return cls(cells=(count,) * dim, h=h, tau=tau, final_time=final_time)

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def steps(self) -> int:
        return int(round(self.final_time / self.tau))

    def nodes(self, axis: int = 0) -> np.ndarray:
        """All nodes 0, h, ..., 1 along one axis, boundary included."""
        return np.linspace(0.0, 1.0, self.cells[axis] + 1)

    def interior_nodes(self, axis: int = 0) -> np.ndarray:
        return self.nodes(axis)[1:-1]

    def refined(self, space_factor: int = 2, time_factor: int = 2) -> "GridSpec":
        return GridSpec(cells=tuple(c * space_factor for c in self.cells), h=self.h / space_factor,
                        tau=self.tau / time_factor, final_time=self.final_time)

    def check_heat_stability(self, kappa_max: float) -> None:
        """Explicit heat scheme: kappa_max^2 tau 2d / h^2 <= 1."""
        value = kappa_max ** 2 * self.tau * 2 * self.dim / self.h ** 2
        if value > 1.0 + EXTENT_TOLERANCE:
            logger.error(f"Heat grid unstable: kappa_max^2 tau 2d/h^2 = {value:.4g}")
            raise StabilityViolationError("kappa_max^2 tau 2d/h^2", value, 1.0)

    def check_wave_cfl(self) -> None:
        """Explicit 2-D leapfrog: tau/h <= 1/sqrt(2)."""
        value = self.tau / self.h
        limit = 1.0 / math.sqrt(self.dim)
        if value > limit + EXTENT_TOLERANCE:
            logger.error(f"Wave grid violates CFL: tau/h = {value:.4g}")
            raise StabilityViolationError("tau/h", value, limit)
