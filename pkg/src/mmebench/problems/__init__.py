from .base import exact_solution_field
from .export import export_field, export_slice_csv, read_field
from .grid import GridSpec
from .heat import HeatSetup, make_heat_operator
from .helmholtz import HelmholtzModelSetup, make_helmholtz_operator, synthesize_sine_series
from .thermoacoustic import (
    Face,
    ThermoacousticSetup,
    continuous_adjoint,
    make_thermoacoustic_problem,
    make_trace_operator,
    thermoacoustic_exact,
)

__all__ = [
    "Face",
    "GridSpec",
    "HeatSetup",
    "HelmholtzModelSetup",
    "ThermoacousticSetup",
    "continuous_adjoint",
    "exact_solution_field",
    "export_field",
    "export_slice_csv",
    "make_heat_operator",
    "make_helmholtz_operator",
    "make_thermoacoustic_problem",
    "make_trace_operator",
    "read_field",
    "synthesize_sine_series",
    "thermoacoustic_exact",
]
