"""Spectral clustering of per-user unfollow time series.

The unfollow series of a user counts, for each consecutive snapshot pair, how
many previously-followed friends disappeared. Clustering those series with a
Gaussian affinity separates users who never unfollow, users hit by a single
unfollow sweep, and users cycling through repeated unfollow/refollow rounds.

Reconstruction choices the source material leaves open, all documented here:
Euclidean distance on zero-padded series, self-tuning bandwidth sigma set to
the median pairwise distance, a symmetric normalized Laplacian solved with a
dense eigensolver, and deterministic farthest-point k-means seeding. Input
order never matters: series are canonicalized by user_id before any
computation, so permuting the input yields the identical assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError
from .model import Rejection, UserTrace

_SIGMA_FLOOR = 1e-12
_KMEANS_MAX_ITER = 200


@dataclass(frozen=True, slots=True)
class UnfollowSeries:
    """Per-transition unfollow counts for one user (length = snapshots - 1)."""

    user_id: str
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True, slots=True)
class ClusterAssignment:
    """A complete partition of the input users into k labeled clusters."""

    labels: dict[str, int]
    k: int
    member_counts: tuple[int, ...]
    degenerate: bool = False


def unfollow_series(trace: UserTrace) -> UnfollowSeries:
    """counts[i] = |friends(i) \\ friends(i+1)|; zeros where friend_ids missing."""
    counts = []
    for a, b in zip(trace.snapshots, trace.snapshots[1:]):
        if a.friend_ids is None or b.friend_ids is None:
            counts.append(0)
        else:
            counts.append(len(a.friend_ids - b.friend_ids))
    return UnfollowSeries(user_id=trace.user_id, counts=tuple(counts))


def _padded_matrix(series: list[UnfollowSeries]) -> np.ndarray:
    width = max((len(s.counts) for s in series), default=0)
    matrix = np.zeros((len(series), max(width, 1)), dtype=np.float64)
    for row, s in enumerate(series):
        if s.counts:
            matrix[row, : len(s.counts)] = s.counts
    return matrix


def _farthest_point_kmeans(rows: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Deterministic k-means: seeded first center, then greedy farthest points."""
    n = rows.shape[0]
    rng = np.random.default_rng(seed)
    centers = [rows[int(rng.integers(n))]]
    while len(centers) < k:
        dists = np.min(
            [np.linalg.norm(rows - c, axis=1) for c in centers], axis=0
        )
        centers.append(rows[int(np.argmax(dists))])
    centers = np.array(centers)

    labels: np.ndarray | None = None
    for _ in range(_KMEANS_MAX_ITER):
        dists = np.linalg.norm(rows[:, None, :] - centers[None, :, :], axis=2)
        new_labels = np.argmin(dists, axis=1)
        for cluster in range(k):  # revive empty clusters deterministically
            if not (new_labels == cluster).any():
                worst = int(np.argmax(dists[np.arange(n), new_labels]))
                new_labels[worst] = cluster
        if labels is not None and (new_labels == labels).all():
            break
        labels = new_labels
        for cluster in range(k):
            members = rows[labels == cluster]
            if len(members):
                centers[cluster] = members.mean(axis=0)
    return labels


def spectral_cluster(
    series: list[UnfollowSeries], k: int = 3, seed: int = 0
) -> ClusterAssignment:
    """Cluster unfollow series into k groups; deterministic given the seed.

    Affinity is exp(-d^2 / (2 sigma^2)) with sigma the median pairwise
    Euclidean distance over zero-padded series. The embedding uses the k
    eigenvectors of the symmetric normalized Laplacian with the smallest
    eigenvalues after skipping the constant one. All-identical inputs
    short-circuit to a single cluster flagged as degenerate.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if len(series) < k:
        raise InsufficientDataError(f"need at least k={k} series, got {len(series)}")

    ordered = sorted(series, key=lambda s: s.user_id)
    user_ids = [s.user_id for s in ordered]
    if len(set(user_ids)) != len(user_ids):
        raise ValueError("duplicate user_id in series")
    matrix = _padded_matrix(ordered)
    n = len(ordered)

    iu = np.triu_indices(n, k=1)
    diffs = matrix[:, None, :] - matrix[None, :, :]
    dist = np.sqrt((diffs * diffs).sum(axis=2))
    pairwise = dist[iu]

    if pairwise.size == 0 or pairwise.max() == 0.0:
        labels = {uid: 0 for uid in user_ids}
        counts = tuple([n] + [0] * (k - 1))
        return ClusterAssignment(labels=labels, k=k, member_counts=counts, degenerate=True)

    if n == k:
        labels = {uid: i for i, uid in enumerate(user_ids)}
        return ClusterAssignment(labels=labels, k=k, member_counts=tuple([1] * k))

    sigma = max(float(np.median(pairwise)), _SIGMA_FLOOR)
    affinity = np.exp(-(dist * dist) / (2.0 * sigma * sigma))
    degree = affinity.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degree)
    laplacian = np.eye(n) - (affinity * inv_sqrt[:, None]) * inv_sqrt[None, :]
    _, eigenvectors = np.linalg.eigh(laplacian)
    embedding = eigenvectors[:, 1 : k + 1]

    raw = _farthest_point_kmeans(embedding, k, seed)
    labels = {uid: int(lbl) for uid, lbl in zip(user_ids, raw)}
    counts = tuple(int((raw == cluster).sum()) for cluster in range(k))
    return ClusterAssignment(labels=labels, k=k, member_counts=counts)


def select_aggressive(
    assignment: ClusterAssignment, series: list[UnfollowSeries]
) -> set[str]:
    """Members of the heaviest-unfollowing cluster with more than one event.

    The cluster is chosen by highest mean total unfollow count; the rule-based
    criterion (total events > 1) then filters out single-sweep stragglers.
    """
    totals = {s.user_id: s.total for s in series}
    missing = [uid for uid in totals if uid not in assignment.labels]
    if missing:
        raise ValueError(f"assignment does not cover users: {missing[:3]}")
    sums = [0.0] * assignment.k
    sizes = [0] * assignment.k
    for uid, total in totals.items():
        label = assignment.labels[uid]
        sums[label] += total
        sizes[label] += 1
    means = [s / c if c else 0.0 for s, c in zip(sums, sizes)]
    heaviest = int(np.argmax(means))
    return {
        uid
        for uid, total in totals.items()
        if assignment.labels[uid] == heaviest and total > 1
    }


# -- cluster report export ---------------------------------------------------


def write_cluster_report(
    path: str | Path, assignment: ClusterAssignment, series: list[UnfollowSeries]
) -> None:
    totals = {s.user_id: s.total for s in series}
    with Path(path).open("w", encoding="utf-8") as fh:
        for uid in sorted(assignment.labels):
            fh.write(
                json.dumps(
                    {
                        "user_id": uid,
                        "label": assignment.labels[uid],
                        "total_unfollows": totals.get(uid, 0),
                    }
                )
                + "\n"
            )


def read_cluster_report(path: str | Path) -> tuple[list[dict], list[Rejection]]:
    rows: list[dict] = []
    rejections: list[Rejection] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rows.append(
                    {
                        "user_id": str(obj["user_id"]),
                        "label": int(obj["label"]),
                        "total_unfollows": int(obj["total_unfollows"]),
                    }
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                rejections.append(Rejection(line_no, "record", str(exc)))
    return rows, rejections
