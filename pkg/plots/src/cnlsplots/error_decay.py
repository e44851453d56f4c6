"""Deviation decay figure: err_H1 per final time, against the bound and
the discretization floor, on a log scale."""

from __future__ import annotations

import sys

import numpy as np

from .io import MissingColumnError, read_csv, read_json, split_inputs, fail
from .style import COLORS, make_parser, save

import matplotlib.pyplot as plt

REQUIRED = ["t", "err_H1", "bound", "err_floor"]


def render(csv_paths, summary_path, out, dpi):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    floor_drawn = False
    for i, path in enumerate(sorted(csv_paths)):
        data = read_csv(path, REQUIRED)
        order = np.argsort(data["t"])
        t = data["t"][order]
        err = np.maximum(data["err_H1"][order], 1e-18)
        label = f"T={t.max():g}"
        ax.semilogy(t, err, color=COLORS[i % len(COLORS)], lw=1.2, label=label)
        if not floor_drawn:
            floor = np.maximum(data["err_floor"][order], 1e-18)
            ax.semilogy(t, floor, color="0.6", ls=":", lw=1.0, label="floor")
            ax.semilogy(t, data["bound"][order], "k--", lw=1.2, label="bound")
            floor_drawn = True
    if summary_path:
        summary = read_json(summary_path)
        rate = summary.get("rate")
        if rate is not None:
            ax.set_title(f"deviation from the soliton pair, rate {rate:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("H1 x H1 error")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    save(fig, out, dpi)


def main(argv=None) -> int:
    args = make_parser(__doc__, multi=True).parse_args(argv)
    csvs, jsons = split_inputs(args.inputs)
    if not csvs:
        return fail("no report CSVs given")
    try:
        render(csvs, jsons[0] if jsons else None, args.out, args.dpi)
    except MissingColumnError as exc:
        return fail(str(exc))
    except OSError as exc:
        return fail(f"I/O error: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
