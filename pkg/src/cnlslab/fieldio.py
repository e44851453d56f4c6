"""Binary field container and CSV slices.

Container layout (all 8-byte little-endian floats):
    header:  dim, n per axis, length per axis
    data:    interleaved re/im samples in row-major (C) order
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .grid import ComplexField, Grid, make_grid


def write_field(path, f: ComplexField) -> None:
    g = f.grid
    header = np.array([g.dim, *g.n, *g.length], dtype="<f8")
    data = np.ascontiguousarray(f.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(data.tobytes())


def read_field(path) -> ComplexField:
    raw = Path(path).read_bytes()
    dim = int(np.frombuffer(raw, dtype="<f8", count=1)[0])
    if dim not in (1, 2, 3):
        raise ValueError(f"corrupt field container {path}: dim={dim}")
    head = np.frombuffer(raw, dtype="<f8", count=1 + 2 * dim)
    n = [int(v) for v in head[1 : 1 + dim]]
    length = [float(v) for v in head[1 + dim : 1 + 2 * dim]]
    grid = make_grid(dim, n, length)
    offset = head.nbytes
    values = np.frombuffer(raw, dtype="<c16", offset=offset).reshape(grid.shape)
    return ComplexField(grid, values.copy())


def write_slice_csv(path, f: ComplexField, axis: int = 0) -> None:
    """Write a 1D slice through the box center along the given axis."""
    g = f.grid
    idx: list = [m // 2 for m in g.n]
    idx[axis] = slice(None)
    line = f.values[tuple(idx)]
    x = g.axes[axis]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for xi, vi in zip(x, line):
            w.writerow([repr(float(xi)), repr(float(vi.real)), repr(float(vi.imag))])
