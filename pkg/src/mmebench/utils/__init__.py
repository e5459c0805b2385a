# src/mmebench/utils/__init__.py
"""
Small helpers shared across the package: float formatting for the CSV
outputs and seeded random generators. The experiment-file reader lives in
`config_file` and is imported from there.
"""

from .helper import format_float, make_rng, random_spd_diagonal

__all__ = [
    "format_float",
    "make_rng",
    "random_spd_diagonal",
]
