"""Precision-recall figure for the ``eval`` command."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import PRPoint  # noqa: E402


def plot_pr_curve(points: Sequence[PRPoint], path: str | Path, label: str = "system",
                  auc: float | None = None) -> Path:
    """Write a step-free PR curve (recall on x) to ``path``; format follows the suffix."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 4), dpi=100)
    try:
        if points:
            xs = [0.0] + [p.recall for p in points]
            ys = [points[0].precision] + [p.precision for p in points]
            name = label if auc is None else f"{label} (AUC {auc:.3f})"
            ax.plot(xs, ys, marker="o", markersize=3, label=name)
            ax.legend(loc="upper right")
        ax.set_xlabel("recall")
        ax.set_ylabel("precision")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.05)
        ax.grid(True, alpha=0.3)
        # fixed metadata keeps repeated runs byte-identical
        fig.savefig(path, metadata={"Software": None} if path.suffix.lower() == ".png" else None)
    finally:
        plt.close(fig)
    return path
