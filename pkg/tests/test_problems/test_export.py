# tests/test_problems/test_export.py

import numpy as np
import pytest

from src.mmebench.core.space import SpaceDescriptor, StateVector
from src.mmebench.exceptions import ContractViolationError
from src.mmebench.problems.export import export_field, export_slice_csv, read_field


@pytest.fixture
def square_field():
    space = SpaceDescriptor.trapezoid((3, 4), (0.5, 1.0 / 3.0), label="square")
    return StateVector(space, np.arange(12, dtype=np.float64))


def test_export_field_writes_binary_and_sidecar(tmp_path, square_field):
    """The binary reads back through its sidecar shape."""
    path = str(tmp_path / "fields" / "q.bin")
    sidecar = export_field(square_field, path, label="final iterate")

    text = open(sidecar, encoding="utf-8").read()
    assert "shape = 3 4" in text
    assert "dtype = float64-le" in text
    assert "label = final iterate" in text
    np.testing.assert_array_equal(read_field(path), square_field.as_grid())


def test_read_field_needs_shape(tmp_path):
    """A sidecar without a shape entry is refused."""
    path = tmp_path / "q.bin"
    np.zeros(3).tofile(path)
    (tmp_path / "q.bin.txt").write_text("label = q\n", encoding="utf-8")
    with pytest.raises(ContractViolationError):
        read_field(str(path))


def test_slice_of_three_dimensional_field(tmp_path):
    """The middle slice along axis 0 carries two coordinates and the value."""
    space = SpaceDescriptor(dim=24, weights=np.ones(24), label="cube", shape=(2, 3, 4))
    vector = StateVector(space, np.arange(24, dtype=np.float64))
    frame = export_slice_csv(vector, str(tmp_path / "slice.csv"))
    assert list(frame.columns) == ["x0", "x1", "value"]
    assert len(frame) == 12
    np.testing.assert_array_equal(frame["value"].to_numpy(), np.arange(12, 24))
    assert (tmp_path / "slice.csv").exists()


def test_slice_of_one_dimensional_field_with_coordinates(tmp_path):
    """1-D fields are written whole against their node coordinates."""
    space = SpaceDescriptor.uniform(3, label="line")
    vector = StateVector(space, [1.0, 2.0, 3.0])
    frame = export_slice_csv(vector, str(tmp_path / "line.csv"), coordinates=[np.array([0.25, 0.5, 0.75])])
    assert frame["x0"].tolist() == [0.25, 0.5, 0.75]
    assert frame["value"].tolist() == [1.0, 2.0, 3.0]
