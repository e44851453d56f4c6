"""Readers for the documented cnlslab artifact formats."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import numpy as np


class MissingColumnError(Exception):
    def __init__(self, path, column):
        self.column = column
        super().__init__(f"{path}: missing required column {column!r}")


def read_csv(path, required: list[str]) -> dict:
    """Load a CSV into {column: array}; numeric where possible."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MissingColumnError(path, required[0] if required else "<header>")
        for col in required:
            if col not in reader.fieldnames:
                raise MissingColumnError(path, col)
        rows = list(reader)
    out = {}
    for col in reader.fieldnames:
        raw = [r[col] for r in rows]
        try:
            out[col] = np.array([float(v) for v in raw])
        except ValueError:
            out[col] = np.array(raw)
    return out


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def read_field(path):
    """Binary field container: f8 header (dim, n per axis, length per axis)
    followed by row-major complex128 samples."""
    raw = Path(path).read_bytes()
    dim = int(np.frombuffer(raw, dtype="<f8", count=1)[0])
    head = np.frombuffer(raw, dtype="<f8", count=1 + 2 * dim)
    n = [int(v) for v in head[1 : 1 + dim]]
    length = [float(v) for v in head[1 + dim : 1 + 2 * dim]]
    values = np.frombuffer(raw, dtype="<c16", offset=head.nbytes).reshape(n)
    axes = [
        -0.5 * L + (L / m) * np.arange(m) for L, m in zip(length, n)
    ]
    return axes, values


def split_inputs(paths) -> tuple[list[str], list[str]]:
    """Separate JSON inputs from the rest (CSV or field files)."""
    js = [p for p in paths if str(p).endswith(".json")]
    rest = [p for p in paths if not str(p).endswith(".json")]
    return rest, js


def fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 1
