# src/mmebench/problems/base.py

from functools import singledispatch

from ..core.space import StateVector


@singledispatch
def exact_solution_field(setup) -> StateVector:
    """Analytic q* of a model problem sampled in that problem's state space."""
    raise TypeError(f"no exact solution registered for {type(setup).__name__}")
