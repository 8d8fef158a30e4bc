"""Fixed-order behavioral feature vectors extracted from user traces.

The 18 dimensions (see FEATURE_NAMES) combine static profile counters read at
the final snapshot with temporal signatures: per-day counter gains, burst
scores over follower creation/follow times, tweet-language entropy, topic and
language overlap with observed followers, and unfollow entropy. The displayed
follower count itself is deliberately not a feature: it is the quantity under
suspicion, so similarity must be judged without it.

All functions here are pure and deterministic. Aggregations over sets iterate
in sorted order so results are bit-identical across processes regardless of
hash randomization.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError, ShapeMismatchError
from .model import UserTrace

FEATURE_NAMES = (
    "has_bio",
    "has_profile_image",
    "tweet_count",
    "friend_count",
    "listed_count",
    "is_verified",
    "is_celebrity",
    "topic_count",
    "topic_overlap_with_followers",
    "favorited_count",
    "tweet_gain_per_day",
    "language_entropy_of_tweets",
    "language_overlap_with_followers",
    "follower_gain_per_day",
    "friend_gain_per_day",
    "creation_time_spike_score",
    "follow_time_spike_score",
    "unfollow_entropy",
)
N_FEATURES = len(FEATURE_NAMES)

DAY = timedelta(days=1)

IQR_FLOOR = 1e-9


@dataclass(frozen=True, slots=True)
class FeatureVector:
    """Ordered 18-dimensional embedding of one user (order = FEATURE_NAMES)."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != N_FEATURES:
            raise ShapeMismatchError(
                f"feature vector needs {N_FEATURES} values, got {len(self.values)}"
            )
        for name, value in zip(FEATURE_NAMES, self.values):
            if not math.isfinite(value):
                raise ShapeMismatchError(f"dimension {name} is not finite: {value!r}")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True, slots=True)
class NormalizationModel:
    """Per-dimension robust location (median) and scale (IQR, floored).

    Median/IQR rather than mean/sigma: follower populations are heavy-tailed,
    and robust scaling stops a handful of whales from owning the distance
    metric. Dimensions that are constant across the population keep the floor
    scale, which turns any deviation in them into a very large normalized gap;
    in effect such dimensions behave as hard categorical matches.
    """

    location: tuple[float, ...]
    scale: tuple[float, ...]

    def __post_init__(self):
        if len(self.location) != N_FEATURES or len(self.scale) != N_FEATURES:
            raise ShapeMismatchError("normalization model must cover all dimensions")
        if any(s <= 0 for s in self.scale):
            raise ShapeMismatchError("scales must be positive")


def _norm_tag(value: str) -> str:
    return value.strip().lower()


def _norm_tags(values) -> set[str]:
    out = set()
    for value in values:
        cleaned = _norm_tag(value)
        if cleaned:
            out.add(cleaned)
    return out


def overlap(a: set[str], b: set[str]) -> float:
    """Jaccard similarity of two string sets; 0.0 when both are empty."""
    if not a and not b:
        return 0.0
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def unfollow_counts(trace: UserTrace) -> dict[str, int]:
    """Per-friend count of unfollow events across consecutive snapshots.

    An unfollow event is a friend present at snapshot i and absent at i+1.
    Transitions where either side lacks friend_ids contribute nothing.
    """
    counts: dict[str, int] = {}
    for a, b in zip(trace.snapshots, trace.snapshots[1:]):
        if a.friend_ids is None or b.friend_ids is None:
            continue
        for friend in a.friend_ids - b.friend_ids:
            counts[friend] = counts.get(friend, 0) + 1
    return counts


def unfollow_entropy(trace: UserTrace) -> float:
    """Normalized entropy of per-friend unfollow-event counts, in [0, 1].

    Zero exactly when the trace contains no unfollow events. With two or more
    distinct unfollowed friends this is Shannon entropy of the event-count
    distribution divided by log(distinct friends), so events spread evenly
    over many repeatedly-unfollowed friends approach 1. A history touching a
    single friend c times maps to c/(c+1): positive for any activity and
    saturating with repetition, since a one-point distribution carries no
    spread for the entropy term to measure.
    """
    counts = unfollow_counts(trace)
    total = sum(counts.values())
    if total == 0:
        return 0.0
    if len(counts) == 1:
        return total / (total + 1.0)
    h = 0.0
    for friend in sorted(counts):
        p = counts[friend] / total
        h -= p * math.log(p)
    return min(1.0, h / math.log(len(counts)))


_COUNTER_ATTRS = {
    "followers": "follower_count",
    "friends": "friend_count",
    "tweets": "tweet_count",
}


def gain_per_day(trace: UserTrace, counter: str) -> float:
    """Net change of a profile counter per day between first and last snapshot.

    Single-snapshot traces have no span and return 0. The value may be
    negative: users do lose followers.
    """
    try:
        attr = _COUNTER_ATTRS[counter]
    except KeyError:
        raise ValueError(f"unknown counter {counter!r}") from None
    if len(trace.snapshots) < 2:
        return 0.0
    first = trace.snapshots[0]
    last = trace.snapshots[-1]
    days = (last.captured_at - first.captured_at).total_seconds() / 86400.0
    return (getattr(last, attr) - getattr(first, attr)) / days


def spike_score(event_times: list[datetime], bucket: timedelta = DAY) -> float:
    """Burstiness of a list of event times, histogrammed into fixed buckets.

    Buckets run consecutively from the earliest event (so the score is
    invariant to shifting all events by a constant); empty interior buckets
    count as zeros. Score is (max - mean) / max(std, 1) over bucket counts:
    0 for perfectly uniform or empty input, growing when one bucket hoards
    the events.
    """
    width = bucket.total_seconds()
    if width <= 0:
        raise ValueError("bucket duration must be positive")
    if not event_times:
        return 0.0
    base = min(event_times)
    idx = [int((t - base).total_seconds() // width) for t in event_times]
    counts = np.bincount(idx)
    mean = counts.mean()
    std = counts.std()
    return float((counts.max() - mean) / max(std, 1.0))


def _language_entropy(tags: list[str]) -> float:
    if not tags:
        return 0.0
    counter = Counter(tags)
    if len(counter) == 1:
        return 0.0
    total = len(tags)
    h = 0.0
    for tag in sorted(counter):
        p = counter[tag] / total
        h -= p * math.log(p)
    return min(1.0, h / math.log(len(counter)))


def featurize(trace: UserTrace) -> FeatureVector:
    """Extract the full 18-dimensional vector from one trace.

    Follower-derived dimensions (8, 12, 15, 16) read the follower records of
    the final snapshot; missing optional data degrades each dimension to 0.
    """
    last = trace.final_snapshot
    followers = last.follower_records or ()

    user_topics = _norm_tags(last.bio_topics)
    follower_topics: set[str] = set()
    follower_langs: set[str] = set()
    for rec in followers:
        follower_topics |= _norm_tags(rec.bio_topics)
        lang = _norm_tag(rec.tweet_language)
        if lang:
            follower_langs.add(lang)

    tweet_langs = [t for t in (_norm_tag(tw.language) for tw in trace.tweets) if t]
    user_langs = set(tweet_langs)
    primary = _norm_tag(last.tweet_language)
    if primary:
        user_langs.add(primary)

    values = (
        float(last.has_bio),
        float(last.has_profile_image),
        float(last.tweet_count),
        float(last.friend_count),
        float(last.listed_count),
        float(last.is_verified),
        float(last.is_celebrity),
        float(len(user_topics)),
        overlap(user_topics, follower_topics),
        float(last.favorited_count),
        gain_per_day(trace, "tweets"),
        _language_entropy(tweet_langs),
        overlap(user_langs, follower_langs),
        gain_per_day(trace, "followers"),
        gain_per_day(trace, "friends"),
        spike_score([r.account_created_at for r in followers]),
        spike_score([r.first_followed_at for r in followers]),
        unfollow_entropy(trace),
    )
    return FeatureVector(values=values)


def fit_normalizer(vectors: list[FeatureVector]) -> NormalizationModel:
    """Fit per-dimension median and IQR over a population of vectors."""
    if len(vectors) < 2:
        raise InsufficientDataError(
            f"normalizer needs at least 2 vectors, got {len(vectors)}"
        )
    matrix = np.array([v.values for v in vectors], dtype=np.float64)
    location = np.median(matrix, axis=0)
    q25, q75 = np.percentile(matrix, [25.0, 75.0], axis=0)
    scale = np.maximum(q75 - q25, IQR_FLOOR)
    return NormalizationModel(
        location=tuple(float(x) for x in location),
        scale=tuple(float(x) for x in scale),
    )


def normalize(v: FeatureVector, m: NormalizationModel) -> FeatureVector:
    """Shift by the population median and divide by the population IQR."""
    values = tuple(
        (value - loc) / scale
        for value, loc, scale in zip(v.values, m.location, m.scale)
    )
    return FeatureVector(values=values)


# -- delimiter-separated export ---------------------------------------------


def write_feature_matrix(path: str | Path, rows: list[tuple[str, FeatureVector]]) -> None:
    """Write one user per row as CSV with the canonical dimension header."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("user_id",) + FEATURE_NAMES)
        for user_id, vector in rows:
            writer.writerow([user_id] + [repr(v) for v in vector.values])


def read_feature_matrix(path: str | Path) -> list[tuple[str, FeatureVector]]:
    """Read a feature matrix written by write_feature_matrix."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != ("user_id",) + FEATURE_NAMES:
            raise ShapeMismatchError(f"{path}: unexpected feature matrix header")
        rows = []
        for row in reader:
            if len(row) != N_FEATURES + 1:
                raise ShapeMismatchError(f"{path}: row has {len(row)} columns")
            rows.append((row[0], FeatureVector(tuple(float(x) for x in row[1:]))))
    return rows
