"""Field snapshot strip from binary field files.

1D fields render as |u| line panels, 2D fields as |u| heatmaps; one panel
per input file, ordered as given.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .io import read_field, fail
from .style import COLORS, make_parser, save

import matplotlib.pyplot as plt


def render(paths, out, dpi):
    n = len(paths)
    ncols = min(4, n)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(3.2 * ncols, 2.4 * nrows), squeeze=False
    )
    for k, path in enumerate(paths):
        ax = axes[k // ncols][k % ncols]
        axs, values = read_field(path)
        if values.ndim == 1:
            ax.plot(axs[0], np.abs(values), color=COLORS[0], lw=1.0)
            ax.set_ylim(bottom=0)
        else:
            ax.imshow(
                np.abs(values).T,
                origin="lower",
                extent=(axs[0][0], axs[0][-1], axs[1][0], axs[1][-1]),
                aspect="auto",
            )
        ax.set_title(Path(path).name, fontsize=7)
        ax.tick_params(labelsize=6)
    for k in range(n, nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    fig.tight_layout()
    save(fig, out, dpi)


def main(argv=None) -> int:
    args = make_parser(__doc__, multi=True).parse_args(argv)
    try:
        render(args.inputs, args.out, args.dpi)
    except (OSError, ValueError) as exc:
        return fail(f"cannot render snapshots: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
