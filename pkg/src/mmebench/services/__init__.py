# src/mmebench/services/__init__.py
"""
Service layer: problem construction, experiment orchestration and the
verification suites behind the command-line interface.
"""

from .orchestrator import ExperimentOrchestrator, default_methods, history_frame, summary_frame
from .problem_factory import PROBLEM_PARAMETERS, BuiltProblem, build_problem
from .verification import SUITES, run_suite

__all__ = [
    "PROBLEM_PARAMETERS",
    "SUITES",
    "BuiltProblem",
    "ExperimentOrchestrator",
    "build_problem",
    "default_methods",
    "history_frame",
    "run_suite",
    "summary_frame",
]
