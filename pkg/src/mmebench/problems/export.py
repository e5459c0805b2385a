# src/mmebench/problems/export.py
"""
Field snapshots: raw little-endian float64 binaries (row-major) with a
key=value sidecar, and CSV slices of 1-D/2-D fields.
"""

import logging
import os
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..core.space import StateVector
from ..exceptions import ContractViolationError
from ..utils.helper import format_float

logger = logging.getLogger(__name__)


def export_field(vector: StateVector, path: str, label: Optional[str] = None) -> str:
    """
    Write `path` (binary) and `path + '.txt'` (sidecar with shape, dtype,
    order, label and spacing). Returns the sidecar path.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    grid = np.ascontiguousarray(vector.as_grid(), dtype="<f8")
    grid.tofile(path)

    sidecar = f"{path}.txt"
    spacing = vector.space.spacing or ()
    with open(sidecar, "w", encoding="utf-8") as handle:
        handle.write(f"shape = {' '.join(str(n) for n in grid.shape)}\n")
        handle.write("dtype = float64-le\n")
        handle.write("order = row-major\n")
        handle.write(f"label = {label or vector.space.label}\n")
        handle.write(f"spacing = {' '.join(format_float(s) for s in spacing)}\n")
    logger.info(f"Exported field {vector.space.label} {grid.shape} to {path}")
    return sidecar


def read_field(path: str) -> np.ndarray:
    """Inverse of export_field: the array reshaped from its sidecar."""
    shape = None
    with open(f"{path}.txt", encoding="utf-8") as handle:
        for line in handle:
            key, _, value = line.partition("=")
            if key.strip() == "shape":
                shape = tuple(int(n) for n in value.split())
    if shape is None:
        raise ContractViolationError(f"{path}.txt has no shape entry")
    return np.fromfile(path, dtype="<f8").reshape(shape)


def export_slice_csv(vector: StateVector, path: str, axis: int = 0, index: Optional[int] = None,
                     coordinates: Optional[Sequence[np.ndarray]] = None) -> pd.DataFrame:
    """
    CSV of a 1-D field, or of the 2-D slice of a 3-D field at `index` along `axis`.

    Columns are the node coordinates (x0, x1, ...) followed by `value`; 2-D
    fields are written in full.
    """
    grid = vector.as_grid()
    if grid.ndim == 3:
        index = grid.shape[axis] // 2 if index is None else index
        grid = np.take(grid, index, axis=axis)
        if coordinates is not None:
            coordinates = [c for i, c in enumerate(coordinates) if i != axis]
    elif grid.ndim not in (1, 2):
        raise ContractViolationError(f"cannot slice a {grid.ndim}-D field")

    if coordinates is None:
        coordinates = [np.arange(n, dtype=np.float64) for n in grid.shape]
    mesh = np.meshgrid(*coordinates, indexing="ij")
    frame = pd.DataFrame({f"x{i}": m.ravel() for i, m in enumerate(mesh)})
    frame["value"] = grid.ravel()

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, float_format=None)
    logger.info(f"Exported slice of {vector.space.label} to {path}")
    return frame
