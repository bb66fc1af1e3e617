"""Figures for comparison reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402


def plot_comparison(report, path, title="", xlabel="parameter"):
    """Mean reallocations per packet against the sweep parameter.

    Flagged points (where vanilla pays extra) are circled.  Returns the
    saved path.
    """
    params = [p.param for p in report.points]
    vanilla = [p.vanilla.mean_reallocs_per_packet for p in report.points]
    patched = [p.patched.mean_reallocs_per_packet for p in report.points]

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.step(params, vanilla, where="mid", color="tab:red", label="vanilla")
    ax.step(params, patched, where="mid", color="tab:blue", linestyle="--", label="patched")
    flagged = [(p.param, p.vanilla.mean_reallocs_per_packet)
               for p in report.points if p.flagged]
    if flagged:
        xs, ys = zip(*flagged)
        ax.scatter(xs, ys, s=60, facecolors="none", edgecolors="black",
                   label="double reallocation", zorder=3)
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("reallocations per packet")
    ax.set_ylim(-0.1, 2.3)
    ax.set_yticks([0, 1, 2])
    if title:
        ax.set_title(title)
    ax.legend(loc="upper left", frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)
    return path
