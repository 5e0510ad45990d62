"""Figure rendering for experiment reports.

Regret curves are drawn from the aggregate summary produced by
``run_experiment``: one panel per adversary, median across seeds with the
interquartile band shaded, one line per algorithm.  Files are written
next to the delimited outputs; the Agg backend keeps this headless.
"""

from __future__ import annotations

from pathlib import Path as FsPath

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render_regret_curves(aggregate: dict, out_path) -> FsPath:
    rows = aggregate["rows"]
    adversaries = sorted({r["adversary"] for r in rows})
    checkpoints = aggregate["checkpoints"]

    fig, axes = plt.subplots(
        1, len(adversaries), figsize=(6.0 * len(adversaries), 4.2), squeeze=False
    )
    for ax, adv in zip(axes[0], adversaries):
        for row in rows:
            if row["adversary"] != adv:
                continue
            xs = checkpoints
            med = [row["curve"][str(c)]["median"] for c in xs]
            lo = [row["curve"][str(c)]["q25"] for c in xs]
            hi = [row["curve"][str(c)]["q75"] for c in xs]
            (line,) = ax.plot(xs, med, label=row["algorithm"], linewidth=1.6)
            ax.fill_between(xs, lo, hi, alpha=0.2, color=line.get_color())
        ax.set_title(f"adversary: {adv}")
        ax.set_xlabel("round")
        ax.set_ylabel("cumulative regret")
        ax.legend(fontsize=8)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out_path = FsPath(out_path)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path


def render_run(trajectory_rounds, cum_regret, out_path) -> FsPath:
    """Single-run regret curve from an in-memory trajectory."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.plot(trajectory_rounds, cum_regret, linewidth=1.6)
    ax.set_xlabel("round")
    ax.set_ylabel("cumulative regret")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out_path = FsPath(out_path)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path
