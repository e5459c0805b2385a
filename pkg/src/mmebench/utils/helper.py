# src/mmebench/utils/helper.py

import logging
from typing import Optional

import numpy as np

from ..config import config

logger = logging.getLogger(__name__)


def format_float(value: Optional[float]) -> str:
    """Shortest round-trip representation of a 64-bit float; empty for None."""
    if value is None:
        return ""
    return repr(float(value))


def make_rng(seed: Optional[int] = None, stream: int = 0) -> np.random.Generator:
    """
    Seeded generator; `stream` separates independent uses of one seed
    (probes, random starting points, random test problems).
    """
    seed = config.SEED if seed is None else seed
    return np.random.default_rng([seed, stream])


def random_spd_diagonal(dim: int, rng: np.random.Generator, smallest: float = 1e-2,
                        largest: float = 1.0) -> np.ndarray:
    """Distinct eigenvalues, log-uniform in [smallest, largest], sorted decreasing."""
    values = np.exp(rng.uniform(np.log(smallest), np.log(largest), size=dim))
    return np.sort(values)[::-1]
