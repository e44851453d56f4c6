"""Solitary-wave interaction decay figure from a construction CSV."""

from __future__ import annotations

import sys

import numpy as np

from .io import MissingColumnError, read_csv, fail
from .style import COLORS, make_parser, save

import matplotlib.pyplot as plt

REQUIRED = ["t", "interaction_plain", "interaction_grad", "source_norm"]
SLOPE_WINDOW = (1.0, 3.0)


def render(path, out, dpi):
    data = read_csv(path, REQUIRED)
    order = np.argsort(data["t"])
    t = data["t"][order]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key, color in (
        ("interaction_plain", COLORS[0]),
        ("interaction_grad", COLORS[1]),
        ("source_norm", COLORS[2]),
    ):
        ax.semilogy(t, np.maximum(data[key][order], 1e-18), color=color, lw=1.2, label=key)

    # display-only slope annotation over the fixed window
    lo, hi = SLOPE_WINDOW
    m = (t >= lo) & (t <= hi) & (data["interaction_plain"][order] > 0)
    if np.count_nonzero(m) >= 2:
        slope = np.polyfit(t[m], np.log(data["interaction_plain"][order][m]), 1)[0]
        ax.annotate(
            f"log-slope on [{lo:g},{hi:g}]: {slope:.2f}",
            xy=(0.02, 0.05),
            xycoords="axes fraction",
            fontsize=9,
        )
    ax.set_xlabel("t")
    ax.set_ylabel("L2 norm")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    save(fig, out, dpi)


def main(argv=None) -> int:
    args = make_parser(__doc__).parse_args(argv)
    try:
        render(args.inputs, args.out, args.dpi)
    except MissingColumnError as exc:
        return fail(str(exc))
    except OSError as exc:
        return fail(f"I/O error: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
