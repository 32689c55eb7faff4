"""Figure rendering for growth-curve reports.

Kept separate from the experiment code so headless use never imports
matplotlib unless a figure is actually requested.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_growth_curve(rows, path, title=None):
    """Max-point mean gradient against n (log x), with log n and (log n)^2
    reference curves scaled to match the first data point."""
    n = np.array([r["n"] for r in rows], dtype=float)
    y = np.array([r["max_point_mean"] for r in rows], dtype=float)
    err = np.array([r["stderr"] for r in rows], dtype=float)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(n, y, yerr=err, marker="o", color="k", lw=1.2, capsize=3,
                label="max-point mean gradient")
    if len(n) > 1 and y[0] > 0:
        grid = np.geomspace(n[0], n[-1], 128)
        ax.plot(grid, y[0] * np.log(grid) / np.log(n[0]), "--", color="tab:blue",
                lw=1.0, label=r"$\propto \log n$")
        ax.plot(grid, y[0] * np.log(grid) ** 2 / np.log(n[0]) ** 2, ":",
                color="tab:red", lw=1.0, label=r"$\propto (\log n)^2$")
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("expected max gradient")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=9)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
