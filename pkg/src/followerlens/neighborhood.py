"""Neighbor search over a reference population and follower-count prediction.

A query ranks the entire reference population by Euclidean distance in
normalized feature space, keeps the points whose distance falls inside the
Tukey band [Q1 - 1.5*IQR, Q3 + 1.5*IQR] of the full distance profile, and
predicts the follower count as the inverse-distance weighted mean over the
retained neighbors. Quartiles use linear interpolation. Because the band is
computed over distances to every reference point, each query inherently
evaluates the whole population; the kd_tree and ball_tree backends therefore
differ from linear_scan only in how they partition the point set for
evaluation, not in the result.

All three backends funnel every distance through one shared kernel
(_row_distances), so their outputs are bit-identical, not merely close; the
cross-backend equivalence tests assert exact equality. Distance ties are
broken by ascending user_id to keep that equality well-defined.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
from pathlib import Path

import numpy as np

from .errors import (
    InsufficientDataError,
    NoNeighborsError,
    ShapeMismatchError,
)
from .features import FeatureVector, NormalizationModel, featurize, normalize
from .model import Rejection, UserTrace

BACKENDS = ("kd_tree", "ball_tree", "linear_scan")

FENCE_MULTIPLIER = 1.5
ZERO_DISTANCE_FLOOR = 1e-9

_LEAF_SIZE = 48


def _row_distances(block: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Euclidean distance from q to each row of block.

    Every backend uses this kernel and nothing else; a row's distance depends
    only on the row's values, so block decomposition cannot change any bit.
    """
    diff = block - q
    return np.sqrt((diff * diff).sum(axis=1))


class _Node:
    __slots__ = ("indices", "left", "right")

    def __init__(self, indices=None, left=None, right=None):
        self.indices = indices
        self.left = left
        self.right = right


def _collect_distances(root: _Node, points: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.empty(points.shape[0], dtype=np.float64)
    stack = [root]
    while stack:
        node = stack.pop()
        if node.indices is not None:
            idx = node.indices
            out[idx] = _row_distances(points[idx], q)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return out


class _LinearScan:
    def __init__(self, points: np.ndarray):
        self._points = points

    def all_distances(self, q: np.ndarray) -> np.ndarray:
        return _row_distances(self._points, q)


class _KdTree:
    """Axis-aligned median splits on the widest-spread dimension."""

    def __init__(self, points: np.ndarray, leaf_size: int = _LEAF_SIZE):
        self._points = points
        self._root = self._build(np.arange(points.shape[0]), leaf_size)

    def _build(self, indices: np.ndarray, leaf_size: int) -> _Node:
        if indices.shape[0] <= leaf_size:
            return _Node(indices=indices)
        sub = self._points[indices]
        spans = sub.max(axis=0) - sub.min(axis=0)
        axis = int(np.argmax(spans))
        if spans[axis] == 0.0:
            return _Node(indices=indices)  # all duplicates; nothing to split
        mid = indices.shape[0] // 2
        order = np.argpartition(sub[:, axis], mid)
        part = indices[order]
        return _Node(
            left=self._build(part[:mid], leaf_size),
            right=self._build(part[mid:], leaf_size),
        )

    def all_distances(self, q: np.ndarray) -> np.ndarray:
        return _collect_distances(self._root, self._points, q)


class _BallTree:
    """Splits along the line between the two mutually farthest-ish points."""

    def __init__(self, points: np.ndarray, leaf_size: int = _LEAF_SIZE):
        self._points = points
        self._root = self._build(np.arange(points.shape[0]), leaf_size)

    def _build(self, indices: np.ndarray, leaf_size: int) -> _Node:
        if indices.shape[0] <= leaf_size:
            return _Node(indices=indices)
        sub = self._points[indices]
        centroid = sub.mean(axis=0)
        p0 = sub[int(np.argmax(_row_distances(sub, centroid)))]
        p1 = sub[int(np.argmax(_row_distances(sub, p0)))]
        direction = p1 - p0
        if not direction.any():
            return _Node(indices=indices)
        projection = sub @ direction
        mid = indices.shape[0] // 2
        order = np.argpartition(projection, mid)
        part = indices[order]
        return _Node(
            left=self._build(part[:mid], leaf_size),
            right=self._build(part[mid:], leaf_size),
        )

    def all_distances(self, q: np.ndarray) -> np.ndarray:
        return _collect_distances(self._root, self._points, q)


_SEARCHERS = {
    "kd_tree": _KdTree,
    "ball_tree": _BallTree,
    "linear_scan": _LinearScan,
}


class NeighborIndex:
    """Immutable reference population index; safe for concurrent queries."""

    def __init__(
        self,
        backend: str,
        points: np.ndarray,
        user_ids: list[str],
        follower_counts: np.ndarray,
    ):
        self.backend = backend
        self._points = points
        self.user_ids = user_ids
        self._user_id_arr = np.array(user_ids)
        self.follower_counts = follower_counts
        self._searcher = _SEARCHERS[backend](points)

    @property
    def dimension(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self._points.shape[0]

    def all_distances(self, q: np.ndarray) -> np.ndarray:
        if q.shape != (self.dimension,):
            raise ShapeMismatchError(
                f"query has shape {q.shape}, index dimension is {self.dimension}"
            )
        return self._searcher.all_distances(q)


@dataclass(frozen=True, slots=True)
class NeighborEntry:
    user_id: str
    distance: float
    follower_count: int


@dataclass(frozen=True, slots=True)
class NeighborSet:
    """Fence-filtered neighbors, ascending by (distance, user_id)."""

    entries: tuple[NeighborEntry, ...]
    fence: tuple[float, float]


@dataclass(frozen=True, slots=True)
class Prediction:
    user_id: str
    predicted_followers: float
    neighbor_count: int
    neighbor_set: NeighborSet


def build_index(
    population: list[tuple[str, FeatureVector, int]],
    backend: str = "kd_tree",
) -> NeighborIndex:
    """Build a queryable index over (user_id, normalized vector, follower count).

    Vectors must already be normalized with the same NormalizationModel that
    will normalize queries. All backends are exact; duplicates are allowed.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if len(population) < 2:
        raise InsufficientDataError(
            f"reference population needs at least 2 users, got {len(population)}"
        )
    dims = {len(vector.values) for _, vector, _ in population}
    if len(dims) != 1:
        raise ShapeMismatchError(f"mixed vector dimensions in population: {sorted(dims)}")
    points = np.array([vector.values for _, vector, _ in population], dtype=np.float64)
    user_ids = [user_id for user_id, _, _ in population]
    counts = np.array([count for _, _, count in population], dtype=np.int64)
    if (counts < 0).any():
        raise ValueError("follower counts must be >= 0")
    return NeighborIndex(backend, points, user_ids, counts)


def query_neighbors(index: NeighborIndex, u: FeatureVector) -> NeighborSet:
    """Rank the whole population by distance and keep the Tukey-fenced band.

    The band is [Q1 - 1.5*IQR, Q3 + 1.5*IQR] over distances to every
    reference point (linear-interpolation quartiles). The lower bound is real:
    with wildly skewed distance profiles it can exclude the closest points.
    """
    dists = index.all_distances(u.as_array())
    q1, q3 = np.percentile(dists, [25.0, 75.0])
    iqr = q3 - q1
    lower = q1 - FENCE_MULTIPLIER * iqr
    upper = q3 + FENCE_MULTIPLIER * iqr
    kept = np.nonzero((dists >= lower) & (dists <= upper))[0]
    order = np.lexsort((index._user_id_arr[kept], dists[kept]))
    kept = kept[order]
    entries = tuple(
        NeighborEntry(
            user_id=index.user_ids[i],
            distance=float(dists[i]),
            follower_count=int(index.follower_counts[i]),
        )
        for i in kept
    )
    if not entries:
        raise NoNeighborsError("fence retained no reference points")
    return NeighborSet(entries=entries, fence=(float(lower), float(upper)))


def predict_followers(neighbors: NeighborSet, user_id: str = "") -> Prediction:
    """Inverse-distance weighted mean follower count over a neighbor set.

    f = sum(f_i / d_i) / sum(1 / d_i) with distances floored at 1e-9, so an
    exact feature clone dominates the estimate without dividing by zero. The
    result is clamped into [min f_i, max f_i] to keep the weighted-mean
    containment exact under floating-point rounding.
    """
    if not neighbors.entries:
        raise NoNeighborsError("cannot predict from an empty neighbor set")
    numerator = 0.0
    denominator = 0.0
    low = high = neighbors.entries[0].follower_count
    for entry in neighbors.entries:
        weight = 1.0 / max(entry.distance, ZERO_DISTANCE_FLOOR)
        numerator += entry.follower_count * weight
        denominator += weight
        low = min(low, entry.follower_count)
        high = max(high, entry.follower_count)
    predicted = min(max(numerator / denominator, float(low)), float(high))
    return Prediction(
        user_id=user_id,
        predicted_followers=predicted,
        neighbor_count=len(neighbors.entries),
        neighbor_set=neighbors,
    )


def predict_for_user(
    trace: UserTrace,
    index: NeighborIndex,
    normalizer: NormalizationModel,
) -> Prediction:
    """featurize -> normalize -> query -> weighted prediction, end to end."""
    vector = normalize(featurize(trace), normalizer)
    neighbors = query_neighbors(index, vector)
    return predict_followers(neighbors, user_id=trace.user_id)


# -- prediction batch export -------------------------------------------------


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    """One exported prediction row: what was predicted vs what is displayed."""

    user_id: str
    predicted: float
    displayed: int
    neighbor_count: int


def write_prediction_records(path: str | Path, records: list[PredictionRecord]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "user_id": rec.user_id,
                        "predicted": rec.predicted,
                        "displayed": rec.displayed,
                        "neighbor_count": rec.neighbor_count,
                    }
                )
                + "\n"
            )


def read_prediction_records(
    path: str | Path,
) -> tuple[list[PredictionRecord], list[Rejection]]:
    """Read a prediction batch, reporting malformed lines as rejections."""
    records: list[PredictionRecord] = []
    rejections: list[Rejection] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rec = PredictionRecord(
                    user_id=obj["user_id"],
                    predicted=float(obj["predicted"]),
                    displayed=int(obj["displayed"]),
                    neighbor_count=int(obj["neighbor_count"]),
                )
                if not isinstance(obj["user_id"], str) or rec.displayed < 0:
                    raise ValueError("bad field value")
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                rejections.append(Rejection(line_no, "record", str(exc)))
                continue
            records.append(rec)
    return records, rejections
