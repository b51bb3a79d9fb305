"""Figure rendering for the CLI report path.

Every figure is written next to the delimited output it illustrates.
The Agg backend keeps rendering headless and deterministic.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .characterization import InvarianceReport  # noqa: E402


def plot_profile(xs: Sequence[float], us: Sequence[float], path: Path, title: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, us, lw=1.5)
    ax.set_xlabel("x")
    ax.set_ylabel("u(t, x)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_scan(report: InvarianceReport, threshold: float, path: Path, title: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    floor = 1e-16  # keep exact zeros plottable on the log axis
    ax.plot(report.lambdas, [max(d, floor) for d in report.deviations], "o-", lw=1.2)
    ax.axhline(threshold, color="crimson", ls="--", lw=1.0, label="threshold")
    ax.set_xlabel("lambda")
    ax.set_ylabel(f"deviation from {report.reference}")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
