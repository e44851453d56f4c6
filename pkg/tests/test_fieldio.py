import csv

import numpy as np
import pytest

from cnlslab import fieldio
from cnlslab.grid import ComplexField, make_grid


def test_field_round_trip_1d(tmp_path, rng):
    g = make_grid(1, 64, 12.5)
    f = ComplexField(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
    path = tmp_path / "f.field"
    fieldio.write_field(path, f)
    back = fieldio.read_field(path)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)


def test_field_round_trip_2d(tmp_path, rng):
    g = make_grid(2, [16, 32], [3.0, 6.0])
    v = rng.standard_normal((16, 32)) + 1j * rng.standard_normal((16, 32))
    path = tmp_path / "f.field"
    fieldio.write_field(path, ComplexField(g, v))
    back = fieldio.read_field(path)
    assert back.grid == g
    assert np.array_equal(back.values, v)


def test_container_header_layout(tmp_path):
    g = make_grid(1, 16, 4.0)
    f = ComplexField(g, np.zeros(16, dtype=complex))
    path = tmp_path / "f.field"
    fieldio.write_field(path, f)
    raw = np.fromfile(path, dtype="<f8")
    assert raw[0] == 1.0  # dim
    assert raw[1] == 16.0  # n
    assert raw[2] == 4.0  # length
    assert raw.size == 3 + 2 * 16  # header + interleaved re/im


def test_corrupt_container_rejected(tmp_path):
    path = tmp_path / "bad.field"
    path.write_bytes(np.array([9.0, 1.0], dtype="<f8").tobytes())
    with pytest.raises(ValueError):
        fieldio.read_field(path)


def test_slice_csv(tmp_path):
    g = make_grid(2, [16, 16], [4.0, 4.0])
    f = ComplexField(g, np.ones((16, 16), dtype=complex))
    path = tmp_path / "slice.csv"
    fieldio.write_slice_csv(path, f, axis=0)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "re", "im"]
    assert len(rows) == 17
