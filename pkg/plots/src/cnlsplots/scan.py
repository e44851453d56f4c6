"""Speed-threshold scan verdict figure from a scan summary JSON."""

from __future__ import annotations

import sys

from .io import read_json, fail
from .style import make_parser, save

import matplotlib.pyplot as plt


def render(path, out, dpi):
    summary = read_json(path)
    points = summary.get("points")
    if not points:
        raise KeyError("points")
    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    for p in points:
        color = "#2ca02c" if p["passed"] else "#d62728"
        marker = "o" if p["passed"] else "x"
        if not p.get("informative", True):
            color = "0.6"
        ax.scatter([p["v_star"]], [p["rate"]], c=color, marker=marker, s=50, zorder=3)
    onset = summary.get("onset")
    if onset is not None:
        ax.axvline(onset, color="0.4", ls="--", lw=1.0)
        ax.annotate(f"onset v={onset:g}", xy=(onset, 0.02), xycoords=("data", "axes fraction"),
                    fontsize=8, rotation=90, va="bottom", ha="right")
    ax.set_xlabel("relative speed")
    ax.set_ylabel("decay rate")
    ax.grid(True, alpha=0.25)
    ax.set_title("decay-bound verdicts per relative speed")
    save(fig, out, dpi)


def main(argv=None) -> int:
    args = make_parser(__doc__).parse_args(argv)
    try:
        render(args.inputs, args.out, args.dpi)
    except KeyError as exc:
        return fail(f"{args.inputs}: missing required key {exc}")
    except OSError as exc:
        return fail(f"I/O error: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
