"""Conserved-quantity drift figure from an evolve trajectory CSV."""

from __future__ import annotations

import sys

import numpy as np

from .io import MissingColumnError, read_csv, fail
from .style import COLORS, make_parser, save

import matplotlib.pyplot as plt

REQUIRED = ["t", "E1", "E2", "Etot", "M1", "M2", "Px_tot", "overlap"]


def render(path, out, dpi):
    data = read_csv(path, REQUIRED)
    t = data["t"]
    fig, (ax, ax2) = plt.subplots(
        2, 1, figsize=(7, 5.5), sharex=True, height_ratios=[2, 1]
    )

    def drift(series, relative):
        d = np.abs(series - series[0])
        if relative and abs(series[0]) > 0:
            d = d / abs(series[0])
        return np.maximum(d, 1e-18)

    ax.semilogy(t, drift(data["Etot"], True), color=COLORS[0], label="|dE|/|E|")
    ax.semilogy(t, drift(data["M1"], True), color=COLORS[1], label="|dM1|/M1")
    ax.semilogy(t, drift(data["M2"], True), color=COLORS[2], label="|dM2|/M2")
    ax.semilogy(t, drift(data["Px_tot"], False), color=COLORS[3], label="|dP|")
    ax.set_ylabel("drift")
    ax.legend(loc="best", fontsize=8, ncol=2)
    ax.grid(True, which="both", alpha=0.25)

    ax2.semilogy(t, np.maximum(data["overlap"], 1e-18), color="0.3")
    ax2.set_xlabel("t")
    ax2.set_ylabel("overlap")
    ax2.grid(True, which="both", alpha=0.25)
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
