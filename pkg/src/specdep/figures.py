"""Figure rendering for report files.

Every CLI command that emits a delimited report can also render the matching
matplotlib figure next to it (PNG).  Rendering runs headless on the Agg
backend and never opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ks import ChangepointReport
from .simulate import ThresholdTable
from .vines import ClarkeResult

__all__ = [
    "save_ks_figure",
    "save_calibration_figure",
    "save_clarke_matrix_figure",
    "save_prepost_figure",
]


def save_ks_figure(report: ChangepointReport, path) -> None:
    """KS statistic trace with the threshold line and flagged epochs."""
    fig, ax = plt.subplots(figsize=(9, 3.2))
    ax.plot(report.ks.epochs, report.ks.stats, lw=0.8, color="C0")
    ax.axhline(report.threshold, color="red", ls="--", lw=1.0, label=f"threshold {report.threshold:g}")
    if report.flagged_epochs:
        flagged = np.asarray(report.flagged_epochs)
        mask = np.isin(report.ks.epochs, flagged)
        ax.plot(report.ks.epochs[mask], report.ks.stats[mask], "rv", ms=5, label="flagged")
    ax.set_xlabel("epoch")
    ax.set_ylabel("KS statistic")
    ax.set_title(f"channel {report.channel}, {report.band} band")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_calibration_figure(stats_by_band: dict[str, np.ndarray], table: ThresholdTable, path) -> None:
    """Null KS distributions per band with the calibrated quantile lines."""
    bands = list(stats_by_band)
    fig, axes = plt.subplots(1, len(bands), figsize=(3.2 * len(bands), 3.0), squeeze=False)
    for ax, band in zip(axes[0], bands):
        stats = np.asarray(stats_by_band[band])
        ax.hist(stats, bins=40, color="C0", alpha=0.75)
        ax.axvline(table.for_band(band), color="red", ls="--", lw=1.0)
        ax.set_title(f"{band} (thr {table.for_band(band):.4g})", fontsize=9)
        ax.set_xlabel("KS statistic")
    axes[0][0].set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_clarke_matrix_figure(labels: list[int], results: dict[tuple[int, int], ClarkeResult], path) -> None:
    """Heatmap of pairwise Clarke statistics with p-values annotated."""
    k = len(labels)
    xi = np.full((k, k), np.nan)
    for (a, b), res in results.items():
        ia, ib = labels.index(a), labels.index(b)
        xi[ia, ib] = res.xi
        xi[ib, ia] = res.xi
    fig, ax = plt.subplots(figsize=(1.0 + 0.8 * k, 0.8 + 0.8 * k))
    im = ax.imshow(xi, cmap="viridis")
    ax.set_xticks(range(k), [f"ch{c}" for c in labels], rotation=45, fontsize=8)
    ax.set_yticks(range(k), [f"ch{c}" for c in labels], fontsize=8)
    for (a, b), res in results.items():
        ia, ib = labels.index(a), labels.index(b)
        for i, j in ((ia, ib), (ib, ia)):
            ax.text(j, i, f"{res.xi}\np={res.p_value:.3g}", ha="center", va="center", fontsize=6, color="w")
    fig.colorbar(im, ax=ax, label="Clarke statistic")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_prepost_figure(results: dict[int, ClarkeResult], path) -> None:
    """Per-channel Clarke statistic against the equivalence level n/2."""
    channels = sorted(results)
    xi = [results[c].xi for c in channels]
    n = results[channels[0]].n if channels else 0
    fig, ax = plt.subplots(figsize=(max(4.0, 0.45 * len(channels) + 2), 3.2))
    colors = ["C3" if results[c].p_value < 0.025 else "C0" for c in channels]
    ax.bar([str(c) for c in channels], xi, color=colors)
    ax.axhline(n / 2, color="k", ls="--", lw=1.0, label="n / 2")
    ax.set_xlabel("channel")
    ax.set_ylabel("Clarke statistic")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
