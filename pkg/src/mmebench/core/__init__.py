# src/mmebench/core/__init__.py
from .operators import AffineForwardOperator, verify_adjoint
from .problem import (
    ProblemTerm,
    QuadraticProblem,
    estimate_operator_norm,
    functional_value,
    fundamental_identity_defect,
    gradient,
)
from .space import SpaceDescriptor, StateVector, ensure_finite, inner, trapezoid_weights

__all__ = [
    "AffineForwardOperator",
    "ProblemTerm",
    "QuadraticProblem",
    "SpaceDescriptor",
    "StateVector",
    "ensure_finite",
    "estimate_operator_norm",
    "functional_value",
    "fundamental_identity_defect",
    "gradient",
    "inner",
    "trapezoid_weights",
    "verify_adjoint",
]
