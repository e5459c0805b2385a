# src/mmebench/exceptions.py
"""
Error vocabulary shared by every layer of the library.

Iteration stops (target reached, degenerate direction, numerical failure) are
not exceptions: they travel as data on StepDiagnostics and RunRecord. The
classes below cover misuse and unrecoverable arithmetic.
"""

from typing import Optional


class MmeBenchError(Exception):
    """Base class for all library errors."""


class ContractViolationError(MmeBenchError, ValueError):
    """Arguments violate a precondition (dimension or space mismatch, bad counts)."""


class InvalidParameterError(MmeBenchError, ValueError):
    """A model parameter lies outside its admissible range."""


class StabilityViolationError(InvalidParameterError):
    """An explicit time-stepping scheme would be unstable on the requested grid."""

    def __init__(self, bound: str, value: float, limit: float):
        self.bound = bound
        self.value = value
        self.limit = limit
        super().__init__(f"{bound} = {value:.6g} exceeds the stability limit {limit:.6g}")


class NumericalOverflowError(MmeBenchError, ArithmeticError):
    """The functional or gradient stopped being finite."""

    def __init__(self, message: str, term_index: Optional[int] = None):
        self.term_index = term_index
        if term_index is not None:
            message = f"{message} (term {term_index})"
        super().__init__(message)


class DegenerateDirectionError(MmeBenchError, ArithmeticError):
    """Line search along a direction annihilated by every linear part."""


class NeedsLongerSpectrumError(MmeBenchError):
    """Adversarial search ran out of modes before certifying."""

    def __init__(self, best_psi: float, n_modes: int):
        self.best_psi = best_psi
        self.n_modes = n_modes
        super().__init__(
            f"No tail mode among {n_modes} certified; largest psi_min reached {best_psi:.6g}. "
            f"Increase n_modes."
        )


class ConfigFileError(MmeBenchError, ValueError):
    """Experiment file could not be parsed or validated."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        self.reason = message
        location = path or "<config>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")
