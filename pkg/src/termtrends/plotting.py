"""Matplotlib figure rendering for the report paths.

Figures are an additive convenience next to the delimited outputs; the
CSVs remain the machine-readable contract. Rendering always goes through
the Agg backend so headless runs work.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import EpochScore
from .trends import TrendSeries


def plot_trend(series: Sequence[TrendSeries], path: str | Path, *, title: str | None = None) -> Path:
    """Rank-vs-window lines, one per prefix, log rank axis, gaps where absent."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for s in series:
        xs = [p.window.start_year for p in s.points]
        ys = [float(p.min_rank) if p.min_rank is not None else np.nan for p in s.points]
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.2, label=s.prefix)
    ax.set_yscale("log")
    ax.invert_yaxis()  # rank 1 on top
    ax.set_xlabel("window start year")
    ax.set_ylabel("minimum rank (log scale)")
    if title is None and series:
        title = f"prefix ranks vs. {series[0].target}"
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(title="prefix")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_epoch_scores(
    table: Sequence[EpochScore], path: str | Path, *, title: str | None = None
) -> Path:
    """Suite score across the epoch sweep; the retained epoch is marked."""
    path = Path(path)
    scored = [(e.epoch, e.score) for e in table if e.score is not None]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if scored:
        xs, ys = zip(*scored)
        ax.plot(xs, ys, linewidth=1.2)
        best = max(scored, key=lambda t: (t[1], -t[0]))
        ax.scatter([best[0]], [best[1]], color="C3", zorder=3,
                   label=f"selected epoch {best[0]} (D={best[1]:.3f})")
        ax.legend()
    ax.set_xlabel("epoch")
    ax.set_ylabel("suite degree of success")
    ax.set_ylim(bottom=0)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
