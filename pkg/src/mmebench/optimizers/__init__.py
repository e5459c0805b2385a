# src/mmebench/optimizers/__init__.py
from .base import BaseMethod, IterateState, StepRecord
from .baselines import (
    cg_fr,
    cg_ortho,
    cg_pr,
    exact_line_search_alpha,
    gradient_descent_fixed,
    heavy_ball_adaptive,
    similar_triangles,
)
from .minimal_error import (
    momentum_coefficients,
    mme_gram_step,
    step_minimal_error,
    step_mme,
    step_polyak,
)
from .runner import make_method, run

__all__ = [
    "BaseMethod",
    "IterateState",
    "StepRecord",
    "cg_fr",
    "cg_ortho",
    "cg_pr",
    "exact_line_search_alpha",
    "gradient_descent_fixed",
    "heavy_ball_adaptive",
    "make_method",
    "mme_gram_step",
    "momentum_coefficients",
    "run",
    "similar_triangles",
    "step_minimal_error",
    "step_mme",
    "step_polyak",
]
