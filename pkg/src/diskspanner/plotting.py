"""Static SVG plots for benchmark sweeps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no date stamp keep the SVG byte-stable
matplotlib.rcParams["svg.hashsalt"] = "diskspanner"
_META = {"Date": None, "Creator": None}


def loglog_fit(x, y) -> tuple[float, float]:
    """Slope and intercept of log y against log x (least squares)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        return float("nan"), float("nan")
    slope, intercept = np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)
    return float(slope), float(intercept)


def scaling_plot(path: str | Path, series: dict[str, tuple[list, list]], *, ylabel: str, title: str,
                 fit: bool = True) -> Path:
    """Log-log line plot with one line per series label."""
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for label, (x, y) in series.items():
        shown = label
        if fit:
            slope, _ = loglog_fit(x, y)
            if np.isfinite(slope):
                shown = f"{label} (slope {slope:.2f})"
        ax.plot(x, y, marker="o", label=shown)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return path
