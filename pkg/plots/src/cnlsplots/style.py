"""Deterministic matplotlib setup shared by all figure scripts."""

from __future__ import annotations

import argparse

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def make_parser(description: str, multi: bool = False) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    nargs = "+" if multi else None
    p.add_argument("--in", dest="inputs", required=True, nargs=nargs,
                   help="input artifact path(s)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--dpi", type=int, default=150)
    return p


def save(fig, out: str, dpi: int) -> None:
    # constant metadata keeps reruns byte-identical
    fig.savefig(out, dpi=dpi, metadata={"Software": "cnlsplots"})
    plt.close(fig)
