"""Matplotlib figure rendering for the CLI report paths.

Each function writes one PNG next to the delimited output it illustrates.
The Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_neighborhood_sizes(sizes: list[int], path: str | Path) -> None:
    """CDF of neighborhood sizes across a prediction batch."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    if sizes:
        data = np.sort(np.asarray(sizes))
        cdf = np.arange(1, len(data) + 1) / len(data)
        ax.step(data, cdf, where="post")
    ax.set_xlabel("relevant neighbors")
    ax.set_ylabel("fraction of users")
    ax.set_ylim(0.0, 1.02)
    ax.set_title("Neighborhood size distribution")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_band_sweep(points: list[tuple[float, float]], path: str | Path) -> None:
    """Error rate as a function of the absolute tolerance band."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    if points:
        bands = [b for b, _ in points]
        rates = [r for _, r in points]
        ax.plot(bands, rates, marker="o")
        ax.set_xscale("log")
    ax.set_xlabel("tolerance band (± followers)")
    ax.set_ylabel("error rate")
    ax.set_ylim(0.0, 1.02)
    ax.set_title("Prediction error vs tolerance band")
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_deviation_histogram(
    deviations: list[float], threshold: float, path: str | Path
) -> None:
    """Relative deviation histogram with the verdict threshold marked."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    if deviations:
        clipped = np.minimum(np.asarray(deviations), 2.0)
        ax.hist(clipped, bins=40, color="steelblue", alpha=0.85)
    ax.axvline(threshold, color="crimson", linestyle="--", label=f"threshold {threshold:g}")
    ax.set_xlabel("|displayed - predicted| / displayed (clipped at 2)")
    ax.set_ylabel("users")
    ax.set_title("Deviation between displayed and predicted counts")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_cluster_series(
    series_by_user: dict[str, tuple[int, ...]],
    labels: dict[str, int],
    path: str | Path,
) -> None:
    """Unfollow series colored by cluster, with per-cluster means."""
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    k = max(labels.values(), default=0) + 1
    colors = plt.cm.tab10(np.linspace(0, 1, max(k, 1)))
    width = max((len(s) for s in series_by_user.values()), default=1)
    for cluster in range(k):
        members = [
            np.pad(np.asarray(series_by_user[uid], dtype=float),
                   (0, width - len(series_by_user[uid])))
            for uid, lbl in labels.items()
            if lbl == cluster and uid in series_by_user
        ]
        if not members:
            continue
        stack = np.vstack(members)
        for row in stack[:30]:
            ax.plot(row, color=colors[cluster], alpha=0.15, linewidth=0.7)
        ax.plot(
            stack.mean(axis=0),
            color=colors[cluster],
            linewidth=2.2,
            label=f"cluster {cluster} (n={len(members)})",
        )
    ax.set_xlabel("snapshot transition")
    ax.set_ylabel("friends unfollowed")
    ax.set_title("Unfollow activity by cluster")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_tolerance_bars(group_scores: dict[str, float], path: str | Path) -> None:
    """Mean manipulation-tolerance score per follower-count bucket."""
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    groups = sorted(group_scores)
    values = [group_scores[g] for g in groups]
    ax.bar(groups, values, color="slategray")
    ax.set_ylabel("mean tolerance score")
    ax.set_ylim(0.0, 1.0)
    ax.set_title("Estimator movement under injection\n(0 = ignores injection)")
    for i, value in enumerate(values):
        ax.text(i, value + 0.02, f"{value:.3f}", ha="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
