# src/mmebench/__init__.py
"""
mmebench: minimal-error methods with step memory for quadratic least-squares
problems, the baselines they are compared against, and the PDE inverse
problems used to benchmark them.
"""

import logging

from .config import config

__version__ = "0.1.0"

logger = logging.getLogger(__name__)

__all__ = ["config", "logger", "__version__"]
