"""Canonical user/trace/corpus types and the line-delimited interchange format.

A corpus file is UTF-8 JSON lines: the first line is a header record carrying
``schema_version`` (plus optional generator metadata), every following line is
one full user trace. Timestamps are ISO-8601 UTC with second (or finer)
precision; sets are serialized as sorted lists so byte output is deterministic.

Loading validates every record against the type invariants. Invalid records
are never silently dropped: they are collected as :class:`Rejection` entries
carrying the line number and offending field, while valid records become
:class:`UserTrace` objects. A duplicate user_id is a hard conflict error
because both copies are individually valid and neither can be preferred.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .errors import CorpusConflictError, CorpusLoadError, RecordInvalidError

SCHEMA_VERSION = 1

LABEL_RANDOM = "random"
LABEL_CUSTOMER = "customer"
LABEL_UNLABELED = "unlabeled"
VALID_LABELS = frozenset({LABEL_RANDOM, LABEL_CUSTOMER, LABEL_UNLABELED})


def parse_timestamp(raw: str) -> datetime:
    """Parse an ISO-8601 timestamp into a UTC-aware datetime."""
    if not isinstance(raw, str):
        raise ValueError(f"expected ISO-8601 string, got {type(raw).__name__}")
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {raw!r} has no UTC offset")
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Render a UTC datetime as ISO-8601 with a Z suffix (round-trip exact)."""
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True, slots=True)
class FollowerRecord:
    """One observed follower of a user: who they are and when they arrived."""

    follower_id: str
    account_created_at: datetime
    first_followed_at: datetime
    bio_topics: frozenset[str] = frozenset()
    tweet_language: str = ""

    def validate(self) -> None:
        if not self.follower_id:
            raise RecordInvalidError("follower_id", "must be non-empty")
        if self.account_created_at > self.first_followed_at:
            raise RecordInvalidError(
                "account_created_at",
                "follower account created after it first followed",
            )


@dataclass(frozen=True, slots=True)
class TweetRecord:
    """One tweet: timing plus lightweight content counters."""

    user_id: str
    posted_at: datetime
    is_retweet: bool = False
    mention_count: int = 0
    hashtag_count: int = 0
    url_count: int = 0
    language: str = ""

    def validate(self) -> None:
        for name in ("mention_count", "hashtag_count", "url_count"):
            if getattr(self, name) < 0:
                raise RecordInvalidError(name, "must be >= 0")


_COUNTER_FIELDS = (
    "follower_count",
    "friend_count",
    "tweet_count",
    "listed_count",
    "favorited_count",
)


@dataclass(frozen=True, slots=True)
class UserSnapshot:
    """One timestamped observation of a user's profile counters and lists."""

    user_id: str
    captured_at: datetime
    follower_count: int
    friend_count: int
    tweet_count: int
    listed_count: int
    favorited_count: int
    has_bio: bool
    has_profile_image: bool
    is_verified: bool
    is_celebrity: bool
    bio_topics: frozenset[str] = frozenset()
    tweet_language: str = ""
    friend_ids: frozenset[str] | None = None
    follower_records: tuple[FollowerRecord, ...] | None = None

    def validate(self) -> None:
        if not self.user_id:
            raise RecordInvalidError("user_id", "must be non-empty")
        for name in _COUNTER_FIELDS:
            if getattr(self, name) < 0:
                raise RecordInvalidError(name, "must be >= 0")
        if self.friend_ids is not None and self.user_id in self.friend_ids:
            raise RecordInvalidError("friend_ids", "user cannot befriend itself")
        if self.follower_records is not None:
            for rec in self.follower_records:
                rec.validate()


@dataclass(frozen=True, slots=True)
class UserTrace:
    """Ordered snapshot sequence for one user, plus their recent tweets.

    ``displayed_follower_count`` is the profile counter at the final snapshot:
    the value the rest of the pipeline treats as potentially manipulated.
    """

    user_id: str
    snapshots: tuple[UserSnapshot, ...]
    tweets: tuple[TweetRecord, ...] = ()
    displayed_follower_count: int = 0

    def validate(self) -> None:
        if not self.user_id:
            raise RecordInvalidError("user_id", "must be non-empty")
        if not self.snapshots:
            raise RecordInvalidError("snapshots", "trace needs at least one snapshot")
        previous: datetime | None = None
        for snap in self.snapshots:
            if snap.user_id != self.user_id:
                raise RecordInvalidError(
                    "snapshots", f"snapshot user_id {snap.user_id!r} != {self.user_id!r}"
                )
            snap.validate()
            if previous is not None and snap.captured_at <= previous:
                raise RecordInvalidError(
                    "captured_at",
                    "snapshots must be strictly increasing in time",
                )
            previous = snap.captured_at
        for tweet in self.tweets:
            if tweet.user_id != self.user_id:
                raise RecordInvalidError(
                    "tweets", f"tweet user_id {tweet.user_id!r} != {self.user_id!r}"
                )
            tweet.validate()
        for a, b in zip(self.tweets, self.tweets[1:]):
            if b.posted_at < a.posted_at:
                raise RecordInvalidError("tweets", "tweets must be ordered by posted_at")
        if self.displayed_follower_count != self.snapshots[-1].follower_count:
            raise RecordInvalidError(
                "displayed_follower_count",
                "must equal follower_count of the final snapshot",
            )

    @property
    def final_snapshot(self) -> UserSnapshot:
        return self.snapshots[-1]


@dataclass(slots=True)
class Corpus:
    """A set of user traces keyed by user_id, with optional ground-truth labels.

    ``meta`` holds arbitrary header metadata (e.g. the generator config of a
    synthetic corpus) and survives save/load round trips.
    """

    traces: dict[str, UserTrace] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)
    meta: dict | None = None

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterable[UserTrace]:
        return iter(self.traces.values())

    def add(self, trace: UserTrace, label: str | None = None) -> None:
        if trace.user_id in self.traces:
            raise CorpusConflictError(f"duplicate user_id {trace.user_id!r}")
        self.traces[trace.user_id] = trace
        if label is not None:
            if label not in VALID_LABELS:
                raise RecordInvalidError("label", f"unknown label {label!r}")
            self.labels[trace.user_id] = label


@dataclass(frozen=True, slots=True)
class Rejection:
    """One rejected input line: where it was and why it was refused."""

    line_no: int
    field: str
    message: str


@dataclass(slots=True)
class LoadResult:
    """Outcome of loading a corpus file: the corpus plus per-line rejections.

    ``len(corpus) + len(rejections)`` always equals the number of trace lines
    in the file, so nothing is ever dropped silently.
    """

    corpus: Corpus
    rejections: list[Rejection]

    @property
    def clean(self) -> bool:
        return not self.rejections


# -- serialization ---------------------------------------------------------


def _follower_record_to_obj(rec: FollowerRecord) -> dict:
    return {
        "follower_id": rec.follower_id,
        "account_created_at": format_timestamp(rec.account_created_at),
        "first_followed_at": format_timestamp(rec.first_followed_at),
        "bio_topics": sorted(rec.bio_topics),
        "tweet_language": rec.tweet_language,
    }


def _tweet_to_obj(tweet: TweetRecord) -> dict:
    return {
        "user_id": tweet.user_id,
        "posted_at": format_timestamp(tweet.posted_at),
        "is_retweet": tweet.is_retweet,
        "mention_count": tweet.mention_count,
        "hashtag_count": tweet.hashtag_count,
        "url_count": tweet.url_count,
        "language": tweet.language,
    }


def _snapshot_to_obj(snap: UserSnapshot) -> dict:
    obj = {
        "user_id": snap.user_id,
        "captured_at": format_timestamp(snap.captured_at),
        "follower_count": snap.follower_count,
        "friend_count": snap.friend_count,
        "tweet_count": snap.tweet_count,
        "listed_count": snap.listed_count,
        "favorited_count": snap.favorited_count,
        "has_bio": snap.has_bio,
        "has_profile_image": snap.has_profile_image,
        "is_verified": snap.is_verified,
        "is_celebrity": snap.is_celebrity,
        "bio_topics": sorted(snap.bio_topics),
        "tweet_language": snap.tweet_language,
        "friend_ids": sorted(snap.friend_ids) if snap.friend_ids is not None else None,
        "follower_records": (
            [_follower_record_to_obj(r) for r in snap.follower_records]
            if snap.follower_records is not None
            else None
        ),
    }
    return obj


def trace_to_obj(trace: UserTrace) -> dict:
    return {
        "user_id": trace.user_id,
        "displayed_follower_count": trace.displayed_follower_count,
        "snapshots": [_snapshot_to_obj(s) for s in trace.snapshots],
        "tweets": [_tweet_to_obj(t) for t in trace.tweets],
    }


def _norm_tag(value: str) -> str:
    return value.strip().lower()


def _require(obj: dict, name: str, kinds: tuple[type, ...]):
    if name not in obj:
        raise RecordInvalidError(name, "missing field")
    value = obj[name]
    if isinstance(value, bool) and bool not in kinds:
        raise RecordInvalidError(name, "expected a number, got a boolean")
    if not isinstance(value, kinds):
        expected = "/".join(k.__name__ for k in kinds)
        raise RecordInvalidError(name, f"expected {expected}, got {type(value).__name__}")
    return value


def _parse_topics(obj: dict, name: str) -> frozenset[str]:
    raw = _require(obj, name, (list,))
    topics = set()
    for item in raw:
        if not isinstance(item, str):
            raise RecordInvalidError(name, "topics must be strings")
        cleaned = _norm_tag(item)
        if cleaned:
            topics.add(cleaned)
    return frozenset(topics)


def _parse_time(obj: dict, name: str) -> datetime:
    raw = _require(obj, name, (str,))
    try:
        return parse_timestamp(raw)
    except ValueError as exc:
        raise RecordInvalidError(name, str(exc)) from exc


def _follower_record_from_obj(obj: dict) -> FollowerRecord:
    if not isinstance(obj, dict):
        raise RecordInvalidError("follower_records", "each record must be an object")
    return FollowerRecord(
        follower_id=_require(obj, "follower_id", (str,)),
        account_created_at=_parse_time(obj, "account_created_at"),
        first_followed_at=_parse_time(obj, "first_followed_at"),
        bio_topics=_parse_topics(obj, "bio_topics"),
        tweet_language=_norm_tag(_require(obj, "tweet_language", (str,))),
    )


def _tweet_from_obj(obj: dict) -> TweetRecord:
    if not isinstance(obj, dict):
        raise RecordInvalidError("tweets", "each tweet must be an object")
    return TweetRecord(
        user_id=_require(obj, "user_id", (str,)),
        posted_at=_parse_time(obj, "posted_at"),
        is_retweet=_require(obj, "is_retweet", (bool,)),
        mention_count=_require(obj, "mention_count", (int,)),
        hashtag_count=_require(obj, "hashtag_count", (int,)),
        url_count=_require(obj, "url_count", (int,)),
        language=_norm_tag(_require(obj, "language", (str,))),
    )


def _snapshot_from_obj(obj: dict) -> UserSnapshot:
    if not isinstance(obj, dict):
        raise RecordInvalidError("snapshots", "each snapshot must be an object")
    friend_ids = None
    if obj.get("friend_ids") is not None:
        raw = _require(obj, "friend_ids", (list,))
        for item in raw:
            if not isinstance(item, str):
                raise RecordInvalidError("friend_ids", "friend ids must be strings")
        friend_ids = frozenset(raw)
    follower_records = None
    if obj.get("follower_records") is not None:
        raw = _require(obj, "follower_records", (list,))
        follower_records = tuple(_follower_record_from_obj(r) for r in raw)
    return UserSnapshot(
        user_id=_require(obj, "user_id", (str,)),
        captured_at=_parse_time(obj, "captured_at"),
        follower_count=_require(obj, "follower_count", (int,)),
        friend_count=_require(obj, "friend_count", (int,)),
        tweet_count=_require(obj, "tweet_count", (int,)),
        listed_count=_require(obj, "listed_count", (int,)),
        favorited_count=_require(obj, "favorited_count", (int,)),
        has_bio=_require(obj, "has_bio", (bool,)),
        has_profile_image=_require(obj, "has_profile_image", (bool,)),
        is_verified=_require(obj, "is_verified", (bool,)),
        is_celebrity=_require(obj, "is_celebrity", (bool,)),
        bio_topics=_parse_topics(obj, "bio_topics"),
        tweet_language=_norm_tag(_require(obj, "tweet_language", (str,))),
        friend_ids=friend_ids,
        follower_records=follower_records,
    )


def trace_from_obj(obj: dict) -> UserTrace:
    """Build and validate a UserTrace from a decoded record object.

    Out-of-order snapshots and tweets are sorted by their timestamps here;
    equal snapshot timestamps stay adjacent and are then rejected by
    validation because their order is ambiguous.
    """
    if not isinstance(obj, dict):
        raise RecordInvalidError("record", "record must be an object")
    user_id = _require(obj, "user_id", (str,))
    raw_snaps = _require(obj, "snapshots", (list,))
    snapshots = sorted(
        (_snapshot_from_obj(s) for s in raw_snaps), key=lambda s: s.captured_at
    )
    raw_tweets = obj.get("tweets", [])
    if not isinstance(raw_tweets, list):
        raise RecordInvalidError("tweets", "expected a list")
    tweets = sorted((_tweet_from_obj(t) for t in raw_tweets), key=lambda t: t.posted_at)
    trace = UserTrace(
        user_id=user_id,
        snapshots=tuple(snapshots),
        tweets=tuple(tweets),
        displayed_follower_count=_require(obj, "displayed_follower_count", (int,)),
    )
    trace.validate()
    return trace


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the interchange format; exact inverse of load_corpus."""
    path = Path(path)
    header: dict = {"schema_version": SCHEMA_VERSION}
    if corpus.meta:
        header["meta"] = corpus.meta
    try:
        with path.open("w", encoding="utf-8") as fh:
            fh.write(json.dumps(header) + "\n")
            for user_id, trace in corpus.traces.items():
                obj = trace_to_obj(trace)
                label = corpus.labels.get(user_id)
                if label is not None:
                    obj["label"] = label
                fh.write(json.dumps(obj) + "\n")
    except OSError as exc:
        raise CorpusLoadError(f"cannot write {path}: {exc}") from exc


def load_corpus(path: str | Path, schema_version: int = SCHEMA_VERSION) -> LoadResult:
    """Load a corpus file, validating every record.

    Returns the corpus together with per-line rejections. Raises
    CorpusLoadError for unreadable files or incompatible headers, and
    CorpusConflictError when two valid records share a user_id.
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CorpusLoadError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise CorpusLoadError(f"{path}: empty file, expected a header record")

    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorpusLoadError(f"{path}: header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or "schema_version" not in header:
        raise CorpusLoadError(f"{path}: first record must carry schema_version")
    if header["schema_version"] != schema_version:
        raise CorpusLoadError(
            f"{path}: schema_version {header['schema_version']} != expected {schema_version}"
        )

    corpus = Corpus(meta=header.get("meta"))
    rejections: list[Rejection] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            rejections.append(Rejection(line_no, "record", "blank line"))
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            rejections.append(Rejection(line_no, "record", f"invalid JSON: {exc}"))
            continue
        try:
            trace = trace_from_obj(obj)
        except RecordInvalidError as exc:
            rejections.append(Rejection(line_no, exc.field, exc.reason))
            continue
        label = obj.get("label") if isinstance(obj, dict) else None
        if label is not None and label not in VALID_LABELS:
            rejections.append(Rejection(line_no, "label", f"unknown label {label!r}"))
            continue
        if trace.user_id in corpus.traces:
            raise CorpusConflictError(
                f"{path}: duplicate user_id {trace.user_id!r} at line {line_no}"
            )
        corpus.add(trace, label)
    return LoadResult(corpus=corpus, rejections=rejections)
