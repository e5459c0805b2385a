# src/mmebench/models.py
"""
Pydantic models for method configuration, iteration diagnostics, run records
and verification reports.

These are the data contracts passed between the optimizers, the verification
services and the command-line harness.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from .config import config

INFINITY_TOKENS = ("inf", "infinity", "oo", "∞")


class MethodKind(str, Enum):
    """Iteration families known to the runner."""
    MINIMAL_ERROR = "minimal_error"
    MOMENT_MINIMAL_ERROR = "mme"
    POLYAK = "polyak"
    GRADIENT_DESCENT_FIXED = "gd_fixed"
    HEAVY_BALL_ADAPTIVE = "heavy_ball"
    CG_FR = "cg_fr"
    CG_PR = "cg_pr"
    CG_ORTHO = "cg_ortho"
    SIMILAR_TRIANGLES = "stm"


MINIMAL_ERROR_FAMILY = (MethodKind.MINIMAL_ERROR, MethodKind.MOMENT_MINIMAL_ERROR)


class StopReason(str, Enum):
    BUDGET = "budget"
    DEGENERATE = "degenerate"
    TARGET_REACHED = "target_reached"
    NUMERICAL_FAILURE = "numerical_failure"


class MethodConfig(BaseModel):
    """
    One optimizer configuration.

    `m` is the moment count of the minimal-error family; None means an
    unbounded history (m = infinity), optionally capped by `history_cap`.
    """
    kind: MethodKind
    name: Optional[str] = None
    m: Optional[int] = Field(default=None, ge=1)
    history_cap: Optional[int] = Field(default=None, ge=1)
    step: Optional[float] = Field(default=None, gt=0.0)
    max_iterations: int = Field(default=100, ge=1)
    degeneracy_tolerance: float = Field(
        default_factory=lambda: config.DEGENERACY_TOLERANCE, gt=0.0, lt=1.0)
    target_functional: Optional[float] = Field(default=None, ge=0.0)
    target_distance: Optional[float] = Field(default=None, ge=0.0)

    class Config:
        json_schema_extra = {
            "example": {
                "kind": "mme",
                "m": 5,
                "max_iterations": 300,
                "degeneracy_tolerance": 1e-12
            }
        }

    @field_validator("m", mode="before")
    @classmethod
    def _parse_infinite_m(cls, value):
        if isinstance(value, str) and value.strip().lower() in INFINITY_TOKENS:
            return None
        return value

    @property
    def is_infinite(self) -> bool:
        return self.kind == MethodKind.MOMENT_MINIMAL_ERROR and self.m is None

    @property
    def history_limit(self) -> Optional[int]:
        """Number of retained steps; None keeps everything."""
        if self.kind == MethodKind.MINIMAL_ERROR:
            return 0
        if self.kind != MethodKind.MOMENT_MINIMAL_ERROR:
            return None
        return self.m if self.m is not None else self.history_cap

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == MethodKind.MOMENT_MINIMAL_ERROR:
            return f"MME({'inf' if self.m is None else self.m})"
        return {
            MethodKind.MINIMAL_ERROR: "ME",
            MethodKind.POLYAK: "Polyak",
            MethodKind.GRADIENT_DESCENT_FIXED: "GD",
            MethodKind.HEAVY_BALL_ADAPTIVE: "HeavyBall",
            MethodKind.CG_FR: "CG-FR",
            MethodKind.CG_PR: "CG-PR",
            MethodKind.CG_ORTHO: "CG-ortho",
            MethodKind.SIMILAR_TRIANGLES: "STM",
        }[self.kind]

    @classmethod
    def mme(cls, m: Optional[int], **kwargs) -> "MethodConfig":
        return cls(kind=MethodKind.MOMENT_MINIMAL_ERROR, m=m, **kwargs)


class StepDiagnostics(BaseModel):
    """Per-iteration record; quantities refer to the iterate q_k before the step."""
    k: int
    functional: float = Field(ge=0.0)
    grad_norm: float
    alpha: float = 0.0
    sin2_phi: float = 1.0
    step_norm: float = 0.0
    distance_to_solution: Optional[float] = None
    distance_euclidean: Optional[float] = None
    degenerate: bool = False
    restart: bool = False
    stop: Optional[StopReason] = None


class RunRecord(BaseModel):
    """Outcome of one optimizer run."""
    method: MethodConfig
    per_step: List[StepDiagnostics]
    final_q: Any
    stop_reason: StopReason
    wall_time: float
    final_functional: float
    final_grad_norm: Optional[float] = None
    final_index: int = 0
    final_distance: Optional[float] = None
    final_distance_euclidean: Optional[float] = None
    failure_index: Optional[int] = None
    message: Optional[str] = None
    iterates: Optional[List[Any]] = None

    class Config:
        arbitrary_types_allowed = True

    @property
    def label(self) -> str:
        return self.method.label

    @property
    def steps_taken(self) -> int:
        return self.final_index


class AdjointReport(BaseModel):
    label: str
    trials: int
    max_defect: float
    tol: float
    passed: bool


class KrylovComparison(BaseModel):
    """Distance of the n-th MME(inf) iterate against the oracle minimum over q0 + K_n."""
    n: int
    method_distance: float
    oracle_distance: float
    attained: bool
    bounded: bool


class Theorem1Report(BaseModel):
    entries: List[KrylovComparison]
    completed_steps: int
    effective_dim: int
    near_dependence: bool
    stop_reason: StopReason
    tol: float

    @property
    def passed(self) -> bool:
        return all(e.attained and e.bounded for e in self.entries)


class AdversarialCertificate(BaseModel):
    """
    Certified slow starting point for N-step Krylov methods.

    `M` is the 1-based index of the tail mode. `psi_tilde` is the value of the
    objective at the coefficients that annihilate the N leading modes; it is
    recorded next to the two thresholds that bound it in the existence
    argument.
    """
    N: int = Field(ge=1)
    epsilon: float = Field(gt=0.0, lt=1.0)
    M: int
    xi: List[float]
    psi_min: float
    eta_hat: List[float]
    spectrum_label: str = ""
    psi_tilde: Optional[float] = None
    upper_threshold: float
    lower_threshold: float
    gradient_norm: float
    condition_estimate: float
    ill_conditioned: bool = False

    @property
    def certified(self) -> bool:
        """psi_min exceeds epsilon and the minimizer passed the gradient check."""
        return self.psi_min > self.epsilon and self.gradient_norm <= 1e-8


class CheckResult(BaseModel):
    suite: str
    check: str
    problem: str
    passed: bool
    defect: float
    tolerance: float
    step_index: Optional[int] = None
    detail: str = ""


class SuiteReport(BaseModel):
    suite: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


class ProblemSelector(str, Enum):
    HELMHOLTZ = "helmholtz"
    HEAT1D = "heat1d"
    HEAT3D = "heat3d"
    THERMOACOUSTIC = "thermoacoustic"
    DIAGONAL = "diagonal"
    ADVERSARIAL = "adversarial"


class ExperimentConfig(BaseModel):
    """Everything `bench run` needs; all methods share one problem and one q0."""
    name: str = "experiment"
    problem: ProblemSelector
    problem_params: Dict[str, Union[bool, int, float, str]] = Field(default_factory=dict)
    methods: List[MethodConfig] = Field(default_factory=list)
    budget: Optional[int] = Field(default=None, ge=1)
    output_dir: str = Field(default_factory=lambda: config.OUTPUT_DIR)
    seed: int = Field(default_factory=lambda: config.SEED, ge=0)
    export_fields: bool = False
    workers: int = Field(default_factory=lambda: config.WORKERS, ge=1)

    class Config:
        json_schema_extra = {
            "example": {
                "name": "table1",
                "problem": "helmholtz",
                "problem_params": {"kappa": 1.0, "n_modes": 200},
                "methods": [{"kind": "mme", "m": 1}, {"kind": "cg_fr"}],
                "budget": 100,
                "output_dir": "results/helmholtz",
                "seed": 0
            }
        }

    @model_validator(mode="after")
    def _apply_budget(self):
        if self.budget is not None:
            self.methods = [m.model_copy(update={"max_iterations": self.budget}) for m in self.methods]
        labels = [m.label for m in self.methods]
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise ValueError(f"duplicate method labels: {duplicates}")
        return self
