"""Figures rendered next to the delimited reports.

Both entry points take already-computed report objects and write a PNG; no
solver work happens here.  The benchmark figure shows per-method solve times
and objective differences, the comparison figure shows per-method acceptance
counts with the border-band count annotated.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["plot_benchmark", "plot_region_comparison"]


def plot_benchmark(reports, path: str | Path) -> Path:
    """Strip plot of solve times and objective gaps per method."""
    path = Path(path)
    times = defaultdict(list)
    diffs = defaultdict(list)
    for r in reports:
        times[r.method].append(r.time_s)
        if r.obj_diff_vs_sfla is not None:
            diffs[r.method].append(r.obj_diff_vs_sfla)
    methods = sorted(times)
    fig, (ax_t, ax_d) = plt.subplots(1, 2, figsize=(9, 3.6))
    for i, m in enumerate(methods):
        xs = [i] * len(times[m])
        ax_t.plot(xs, times[m], "o", alpha=0.55, markersize=4)
    ax_t.set_xticks(range(len(methods)), methods, rotation=20)
    ax_t.set_ylabel("solve time (s)")
    ax_t.set_title("time per run")
    for i, m in enumerate(methods):
        if diffs[m]:
            ax_d.plot([i] * len(diffs[m]), diffs[m], "o", alpha=0.55, markersize=4)
    ax_d.axhline(0.0, color="k", lw=0.8)
    ax_d.set_xticks(range(len(methods)), methods, rotation=20)
    ax_d.set_ylabel("objective diff vs sfla (%)")
    ax_d.set_title("cost gap (positive = cheaper)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_region_comparison(comp, path: str | Path) -> Path:
    """Bar chart of acceptance counts per method."""
    path = Path(path)
    methods = list(comp.acceptance)
    counts = [comp.acceptance[m] for m in methods]
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    bars = ax.bar(range(len(methods)), counts, color="#4878c5")
    ax.bar_label(bars)
    ax.set_xticks(range(len(methods)), methods, rotation=20)
    ax.set_ylabel(f"accepted of {comp.n_samples} samples")
    title = "feasible-region acceptance"
    if comp.borderline:
        title += f" ({comp.borderline} borderline excluded)"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
