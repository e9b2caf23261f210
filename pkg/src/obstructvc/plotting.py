"""Figures written next to the CSV outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps repeated renders byte-identical
_PNG_META = {"Software": None}

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 100,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def plot_history(runs, path, reference=None):
    """Validation mean cover and MSE against exact vc per epoch.

    ``runs`` maps a label to a list of history rows. ``reference`` optionally
    maps a label (e.g. ``"exact"``) to a constant mean drawn as a dashed line.
    """
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3))
        for label, rows in runs.items():
            epochs = [r["epoch"] for r in rows]
            ax1.plot(epochs, [r["validation_mean_cover"] for r in rows], label=label, lw=1)
            ax2.plot(epochs, [r["mse_vs_exact"] for r in rows], label=label, lw=1)
        for label, value in (reference or {}).items():
            ax1.axhline(value, ls="--", lw=0.8, color="k", label=label)
        ax1.set_xlabel("epoch")
        ax1.set_ylabel("validation mean cover size")
        ax2.set_xlabel("epoch")
        ax2.set_ylabel("MSE vs exact vc")
        ax1.legend(frameon=False)
        ax2.legend(frameon=False)
        _save(fig, path)


def plot_evaluation(report, path):
    """Grouped bars of cover size per graph for every algorithm column present."""
    from .solvers import APPROX2, GREEDY, MODEL

    cols = [("alg1", GREEDY), ("alg2", APPROX2), ("model", MODEL)]
    names = [r.name for r in report.graphs]
    series = {label: [r.sizes.get(tag) for r in report.graphs] for label, tag in cols}
    series["exact"] = [r.exact for r in report.graphs]
    series = {k: v for k, v in series.items() if any(x is not None for x in v)}
    x = np.arange(len(names))
    width = 0.8 / max(1, len(series))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(max(4, 0.6 * len(names) + 2), 3))
        for i, (label, vals) in enumerate(series.items()):
            ys = [np.nan if v is None else v for v in vals]
            ax.bar(x + (i - (len(series) - 1) / 2) * width, ys, width, label=label)
        ax.set_xticks(x)
        ax.set_xticklabels(names, rotation=45, ha="right")
        ax.set_ylabel("cover size")
        ax.legend(frameon=False, ncol=len(series))
        _save(fig, path)


def plot_counts(levels, path):
    """Obstruction count per k on a log scale."""
    ks = sorted(levels)
    counts = [len(levels[k]) for k in ks]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.bar(ks, counts, color="0.4")
        ax.set_yscale("log")
        ax.set_xticks(ks)
        ax.set_xlabel("k")
        ax.set_ylabel("connected obstructions found")
        for k, c in zip(ks, counts):
            ax.annotate(str(c), (k, c), ha="center", va="bottom", fontsize=7)
        _save(fig, path)
