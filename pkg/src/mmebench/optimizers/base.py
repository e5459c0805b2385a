# src/mmebench/optimizers/base.py

import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional, Tuple

import numpy as np

from ..core.problem import QuadraticProblem
from ..core.space import StateVector, inner_values
from ..models import MethodConfig, StepDiagnostics, StopReason


@dataclass(frozen=True)
class StepRecord:
    """A previous step h_j kept as its unit direction and squared norm."""
    unit: np.ndarray
    norm_sq: float

    @classmethod
    def from_step(cls, h: StateVector) -> "StepRecord":
        norm_sq = inner_values(h.space.weights, h.values, h.values)
        if not norm_sq > 0.0:
            raise ValueError("stored steps must have strictly positive norm")
        return cls(unit=h.values / math.sqrt(norm_sq), norm_sq=norm_sq)

    @property
    def vector(self) -> np.ndarray:
        return self.unit * math.sqrt(self.norm_sq)


@dataclass
class IterateState:
    """
    Mutable memory of one run.

    `history` holds the last m steps of the minimal-error family
    (maxlen=None keeps all). The remaining fields are the memory of the
    baselines: previous gradient and direction for conjugate gradients, the
    running curvature floor of the heavy ball and the auxiliary sequence of
    the similar-triangles scheme.
    """
    q: StateVector
    k: int = 0
    history: Deque[StepRecord] = field(default_factory=deque)
    last_direction: Optional[StateVector] = None
    last_gradient: Optional[StateVector] = None
    last_step: Optional[StateVector] = None
    curvature_floor: Optional[float] = None
    anchor: Optional[StateVector] = None
    weight_sum: float = 0.0

    @classmethod
    def start(cls, q0: StateVector, history_limit: Optional[int] = None) -> "IterateState":
        return cls(q=q0, history=deque(maxlen=history_limit))

    def record_step(self, h: StateVector, keep_history: bool = False) -> None:
        if keep_history and self.history.maxlen != 0:
            self.history.append(StepRecord.from_step(h))
        self.last_step = h


class BaseMethod(ABC):
    """
    Abstract base class for first-order methods.

    Defines the common interface the runner drives: one call to `step` per
    iteration, each returning the next iterate and that iteration's
    diagnostics.
    """

    def __init__(self, problem: QuadraticProblem, config: MethodConfig):
        """
        Args:
            problem (QuadraticProblem): Problem to minimize.
            config (MethodConfig): Method parameters and stopping rules.
        """
        self.problem = problem
        self.config = config

    def initial_state(self, q0: StateVector) -> IterateState:
        return IterateState.start(q0, self.config.history_limit)

    @abstractmethod
    def step(self, state: IterateState) -> Tuple[StateVector, StepDiagnostics]:
        """
        Performs one iteration from state.q.

        Args:
            state (IterateState): Current iterate and method memory; updated in place.

        Returns:
            Tuple[StateVector, StepDiagnostics]: The next iterate and the
                diagnostics of the current one. When `diagnostics.stop` is set
                no step was taken and the iterate is returned unchanged.
        """
        pass


def stop_diagnostics(k: int, value: float, grad_norm: float, reason: StopReason,
                     degenerate: bool = False, sin2_phi: float = 1.0) -> StepDiagnostics:
    return StepDiagnostics(k=k, functional=value, grad_norm=grad_norm, alpha=0.0,
                           sin2_phi=sin2_phi, step_norm=0.0, degenerate=degenerate, stop=reason)


def zero_gradient_stop(k: int, value: float, grad_norm_sq: float) -> Optional[StepDiagnostics]:
    """
    TargetReached at J = 0; NumericalFailure when the gradient vanishes while J > 0.
    """
    if value == 0.0:
        return stop_diagnostics(k, value, math.sqrt(max(grad_norm_sq, 0.0)), StopReason.TARGET_REACHED)
    if grad_norm_sq == 0.0:
        return stop_diagnostics(k, value, 0.0, StopReason.NUMERICAL_FAILURE)
    return None


def sin2_against(g: np.ndarray, previous: Optional[np.ndarray], weights: np.ndarray,
                 grad_norm_sq: float) -> float:
    """Squared sine of the angle between g and a single retained direction."""
    if previous is None:
        return 1.0
    prev_sq = inner_values(weights, previous, previous)
    if prev_sq <= 0.0 or grad_norm_sq <= 0.0:
        return 1.0
    cos2 = inner_values(weights, g, previous) ** 2 / (grad_norm_sq * prev_sq)
    return min(max(1.0 - cos2, 0.0), 1.0)
