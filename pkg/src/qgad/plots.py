"""Render detection runs to image files (headless matplotlib)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_detection_figure(records, windows=(), path="detection.png", title: str | None = None) -> Path:
    """Two-panel overview: series vs prediction with flags, loss vs threshold.

    Labeled windows are shaded; pruned flags are marked on both panels.
    Returns the written path.
    """
    records = list(records)
    if not records:
        raise ValueError("nothing to plot: no records")
    ts = [r.t for r in records]
    flagged = [r.t for r in records if r.pruned_flag]

    fig, (ax_series, ax_loss) = plt.subplots(
        2, 1, sharex=True, figsize=(10, 6), height_ratios=[3, 2]
    )
    for start, end in windows:
        ax_series.axvspan(start, end, color="tab:orange", alpha=0.15, lw=0)
        ax_loss.axvspan(start, end, color="tab:orange", alpha=0.15, lw=0)
    ax_series.plot(ts, [r.value for r in records], color="tab:blue", lw=1.0, label="series")
    ax_series.plot(
        ts, [r.generated for r in records], color="tab:green", lw=1.0, alpha=0.8, label="generated"
    )
    if flagged:
        ax_series.plot(
            flagged,
            [r.value for r in records if r.pruned_flag],
            "rx",
            markersize=7,
            label="flag",
        )
    ax_series.set_ylabel("normalized value")
    ax_series.legend(loc="upper left", fontsize=8)

    ax_loss.plot(ts, [r.loss for r in records], color="tab:purple", lw=1.0, label="loss")
    ax_loss.plot(
        ts, [r.threshold for r in records], color="tab:red", lw=1.0, ls="--", label="threshold"
    )
    if flagged:
        ax_loss.plot(
            flagged, [r.loss for r in records if r.pruned_flag], "rx", markersize=7
        )
    ax_loss.set_xlabel("t")
    ax_loss.set_ylabel("score")
    ax_loss.legend(loc="upper left", fontsize=8)
    if title:
        ax_series.set_title(title)

    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
