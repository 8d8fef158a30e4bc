"""Labeled synthetic corpora: organic users, freemium customers, aggressive
customers, and follower injection into existing traces.

The generator drives every user off a latent "social level" so that static
counters (friends, listed, tweets, favorites) carry real information about the
follower count; nearest-neighbor prediction has something honest to work with.
Follower growth is a mixture of a quiet mass (calibrated so roughly 80% of
organic users gain at most `organic_gain_per_day` followers per day) and a
small growth tail whose absolute gain scales with account size. Customers are
organic bases plus service bursts with tightly clustered follow times and a
stockpiled share of clustered account-creation dates; aggressive customers
additionally cycle a persistent friend subset through service-synchronized
unfollow/refollow rounds. A fraction of customers instead bleed followers,
mirroring users who left the service.

Friend, follower, and tweet panels are capped lists: counters move by the full
amounts, while the materialized record panels stay bounded. The burst and
overlap features read ratios and set intersections, so capped panels do not
change their meaning.

Everything is deterministic for a given seed. Each user consumes an
independent child stream of the master seed, so corpus composition changes do
not reshuffle other users.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from .model import (
    Corpus,
    FollowerRecord,
    LABEL_CUSTOMER,
    LABEL_RANDOM,
    TweetRecord,
    UserSnapshot,
    UserTrace,
    parse_timestamp,
)

_TOPIC_GROUPS = (
    ("music", "guitar", "concerts", "dj", "vinyl"),
    ("football", "cricket", "fitness", "running", "nba"),
    ("startups", "coding", "ai", "gadgets", "linux"),
    ("politics", "news", "economy", "history", "law"),
    ("food", "travel", "photography", "coffee", "art"),
    ("fashion", "beauty", "design", "sneakers", "lifestyle"),
    ("movies", "anime", "gaming", "books", "comics"),
    ("science", "space", "climate", "health", "math"),
)

_LANGUAGES = ("en", "es", "pt", "ja", "ar", "fr", "de", "hi")
_LANGUAGE_WEIGHTS = (0.42, 0.14, 0.12, 0.10, 0.07, 0.06, 0.05, 0.04)


@dataclass(slots=True)
class GeneratorConfig:
    """Knobs of the synthetic corpus generator; all randomness flows from seed."""

    seed: int = 0
    n_organic: int = 0
    n_customer: int = 0
    n_aggressive: int = 0
    snapshot_count: int = 30
    snapshot_interval_hours: float = 6.0
    organic_gain_per_day: float = 0.05
    growth_tail_fraction: float = 0.10
    celebrity_fraction: float = 0.0
    customer_burst_per_day: float = 125.0
    customer_burst_dispersion: float = 0.35
    negative_gain_fraction: float = 0.168
    aggressive_cycle_transitions: int = 6
    stockpile_fraction: float = 0.35
    organic_unfollow_fraction: float = 0.15
    follower_panel_cap: int = 60
    tweet_panel_cap: int = 30
    friend_panel_cap: int = 40
    epoch: str = "2017-03-06T00:00:00Z"

    def validate(self) -> None:
        for name in ("n_organic", "n_customer", "n_aggressive"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.snapshot_count < 1:
            raise ValueError("snapshot_count must be >= 1")
        if self.snapshot_interval_hours <= 0:
            raise ValueError("snapshot_interval_hours must be positive")
        for name in (
            "organic_gain_per_day",
            "customer_burst_per_day",
            "customer_burst_dispersion",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in (
            "growth_tail_fraction",
            "celebrity_fraction",
            "negative_gain_fraction",
            "stockpile_fraction",
            "organic_unfollow_fraction",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        for name in ("follower_panel_cap", "tweet_panel_cap", "friend_panel_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.aggressive_cycle_transitions < 1:
            raise ValueError("aggressive_cycle_transitions must be >= 1")
        parse_timestamp(self.epoch)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown generator config fields: {sorted(unknown)}")
        config = cls(**data)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path: str | Path) -> "GeneratorConfig":
        with Path(path).open("r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: generator config must be a JSON object")
        return cls.from_dict(data)

    def to_file(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


@dataclass(slots=True)
class _World:
    """Corpus-wide service schedule shared by all customers of the market."""

    times: list[datetime]
    sweep_transition: int
    rotation_transitions: list[int]
    stock_date: datetime
    interval: timedelta


def _build_world(config: GeneratorConfig, rng: np.random.Generator) -> _World:
    epoch = parse_timestamp(config.epoch)
    interval = timedelta(hours=config.snapshot_interval_hours)
    times = [epoch + i * interval for i in range(config.snapshot_count)]
    steps = config.snapshot_count - 1
    sweep = steps // 2 if steps > 0 else 0
    period = max(2, min(config.aggressive_cycle_transitions, max(steps // 2, 1)))
    rotations = [t for t in range(1, steps, period)]
    stock_date = epoch - timedelta(days=float(rng.uniform(180.0, 420.0)))
    return _World(
        times=times,
        sweep_transition=sweep,
        rotation_transitions=rotations,
        stock_date=stock_date,
        interval=interval,
    )


def _lognormal_int(rng: np.random.Generator, mean_log: float, sigma: float) -> int:
    return max(0, int(round(math.exp(rng.normal(mean_log, sigma)))))


def _negbin(rng: np.random.Generator, mean: float, dispersion: float) -> int:
    """Negative-binomial-shaped integer draw around `mean`."""
    if mean <= 0:
        return 0
    if dispersion <= 0:
        return int(rng.poisson(mean))
    shape = 1.0 / dispersion
    p = shape / (shape + mean)
    return int(rng.negative_binomial(shape, p))


@dataclass(slots=True)
class _Profile:
    level: float
    count0: int
    friend0: int
    tweet0: int
    listed: int
    favorited: int
    has_bio: bool
    has_profile_image: bool
    is_verified: bool
    is_celebrity: bool
    topic_group: int
    bio_topics: frozenset[str]
    primary_language: str
    gain_per_day: float
    churn_per_day: float
    friend_gain_per_day: float
    tweet_gain_per_day: float


def _draw_profile(
    rng: np.random.Generator, config: GeneratorConfig, customer: bool
) -> _Profile:
    level = float(rng.normal())
    celebrity = bool(rng.random() < config.celebrity_fraction)
    if celebrity:
        count0 = _lognormal_int(rng, math.log(30000.0), 0.8)
    else:
        count0 = _lognormal_int(rng, math.log(150.0) + 0.9 * level, 0.12)
    size = math.log1p(count0)

    friend0 = _lognormal_int(rng, 1.2 + 0.62 * size, 0.22)
    tweet0 = _lognormal_int(rng, 0.8 + 0.75 * size, 0.28)
    listed = max(0, int(round(count0 * math.exp(rng.normal(0.0, 0.30)) / 55.0)))
    favorited = _lognormal_int(rng, 0.5 + 0.70 * size, 0.35)

    verified = celebrity or bool(rng.random() < 0.01)

    group = int(rng.integers(len(_TOPIC_GROUPS)))
    n_topics = int(rng.integers(1, 5))
    topics = rng.choice(_TOPIC_GROUPS[group], size=min(n_topics, 5), replace=False)

    language = str(rng.choice(_LANGUAGES, p=_LANGUAGE_WEIGHTS))

    if rng.random() < config.growth_tail_fraction:
        pct = math.exp(rng.normal(math.log(0.02), 0.9))
        pct = min(max(pct, 0.002), 0.25)
        gain = max(count0, 1) * pct
        churn = gain * float(rng.uniform(0.0, 0.3))
    else:
        gain = float(rng.uniform(0.0, config.organic_gain_per_day * 1.1))
        churn = gain * float(rng.uniform(0.0, 0.9))

    friend_gain = float(rng.uniform(0.0, 0.6))
    tweet_rate = math.exp(rng.normal(math.log(0.8 if customer else 0.15), 0.9))
    tweet_rate = min(tweet_rate, 6.0)

    return _Profile(
        level=level,
        count0=count0,
        friend0=friend0,
        tweet0=tweet0,
        listed=listed,
        favorited=favorited,
        has_bio=bool(rng.random() < 0.88),
        has_profile_image=bool(rng.random() < 0.91),
        is_verified=verified,
        is_celebrity=verified or celebrity,
        topic_group=group,
        bio_topics=frozenset(str(t) for t in topics),
        primary_language=language,
        gain_per_day=gain,
        churn_per_day=churn,
        friend_gain_per_day=friend_gain,
        tweet_gain_per_day=tweet_rate,
    )


def _counter_paths(
    rng: np.random.Generator, profile: _Profile, config: GeneratorConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    steps = config.snapshot_count - 1
    dt_days = config.snapshot_interval_hours / 24.0
    arrivals = rng.poisson(profile.gain_per_day * dt_days, size=steps)
    departures = rng.poisson(profile.churn_per_day * dt_days, size=steps)
    followers = np.empty(config.snapshot_count, dtype=np.int64)
    followers[0] = profile.count0
    for i in range(steps):
        followers[i + 1] = max(0, followers[i] + int(arrivals[i]) - int(departures[i]))

    friend_arrivals = rng.poisson(profile.friend_gain_per_day * dt_days, size=steps)
    friends = profile.friend0 + np.concatenate(([0], np.cumsum(friend_arrivals)))

    tweet_arrivals = rng.poisson(profile.tweet_gain_per_day * dt_days, size=steps)
    tweets = profile.tweet0 + np.concatenate(([0], np.cumsum(tweet_arrivals)))
    return followers, friends, tweets


def _tweet_panel(
    rng: np.random.Generator,
    user_id: str,
    profile: _Profile,
    world: _World,
    config: GeneratorConfig,
) -> tuple[TweetRecord, ...]:
    n = int(min(config.tweet_panel_cap, 4 + rng.poisson(9)))
    if n == 0:
        return ()
    end = world.times[-1]
    offsets = np.sort(rng.uniform(0.0, 30.0, size=n))[::-1]
    records = []
    for i in range(n):
        posted = end - timedelta(days=float(offsets[i]))
        if rng.random() < 0.82:
            language = profile.primary_language
        else:
            language = str(rng.choice(_LANGUAGES, p=_LANGUAGE_WEIGHTS))
        records.append(
            TweetRecord(
                user_id=user_id,
                posted_at=posted,
                is_retweet=bool(rng.random() < 0.4),
                mention_count=int(rng.poisson(0.8)),
                hashtag_count=int(rng.poisson(0.6)),
                url_count=int(rng.poisson(0.3)),
                language=language,
            )
        )
    records.sort(key=lambda t: t.posted_at)
    return tuple(records)


def _follower_panel(
    rng: np.random.Generator,
    user_id: str,
    profile: _Profile,
    followers: np.ndarray,
    world: _World,
    config: GeneratorConfig,
) -> tuple[FollowerRecord, ...]:
    """Capped follower list for the final snapshot.

    In-window gains place records at their arrival instants so follow-time
    bursts in the counters show up in the panel; the rest of the panel is
    long-standing followers with spread-out follow dates.
    """
    final = int(followers[-1])
    if final <= 0:
        return ()
    cap = config.follower_panel_cap
    gains = np.maximum(np.diff(followers), 0)
    total_gain = int(gains.sum())
    in_window = min(total_gain, cap // 2 if total_gain < final else cap)
    base = min(final - min(in_window, final), cap - in_window)

    records = []
    serial = 0

    def _mk(created: datetime, followed: datetime) -> FollowerRecord:
        nonlocal serial
        serial += 1
        f_group = (
            profile.topic_group
            if rng.random() < 0.6
            else int(rng.integers(len(_TOPIC_GROUPS)))
        )
        n_topics = int(rng.integers(0, 4))
        topics = frozenset(
            str(t)
            for t in rng.choice(_TOPIC_GROUPS[f_group], size=n_topics, replace=False)
        )
        language = (
            profile.primary_language
            if rng.random() < 0.7
            else str(rng.choice(_LANGUAGES, p=_LANGUAGE_WEIGHTS))
        )
        if created > followed:
            created = followed - timedelta(days=float(rng.uniform(5.0, 400.0)))
        return FollowerRecord(
            follower_id=f"{user_id}-fo{serial:05d}",
            account_created_at=created,
            first_followed_at=followed,
            bio_topics=topics,
            tweet_language=language,
        )

    start = world.times[0]
    for _ in range(base):
        followed = start - timedelta(days=float(rng.uniform(2.0, 900.0)))
        created = followed - timedelta(days=float(rng.uniform(10.0, 1800.0)))
        records.append(_mk(created, followed))

    if in_window > 0 and total_gain > 0:
        weights = gains / gains.sum()
        picks = rng.choice(len(gains), size=in_window, p=weights)
        for transition in np.sort(picks):
            followed = world.times[int(transition)] + timedelta(
                hours=float(rng.uniform(0.0, config.snapshot_interval_hours))
            )
            created = followed - timedelta(days=float(rng.uniform(10.0, 1800.0)))
            records.append(_mk(created, followed))
    return tuple(records)


def _friend_sets(
    rng: np.random.Generator,
    user_id: str,
    config: GeneratorConfig,
    behavior: str,
    world: _World,
) -> list[frozenset[str]] | None:
    """Per-snapshot friend panels for users with unfollow behavior.

    organic users usually carry no panel; a fraction drop a single friend
    once. Customers run one service-synchronized sweep (unfollow a batch,
    refollow next snapshot). Aggressive customers cycle a persistent subset
    at every service rotation.
    """
    steps = config.snapshot_count - 1
    if behavior == "organic":
        if rng.random() >= config.organic_unfollow_fraction or steps < 1:
            return None
        core = min(config.friend_panel_cap, 4 + int(rng.integers(6)))
        ids = [f"{user_id}-fr{i:03d}" for i in range(core)]
        drop_at = int(rng.integers(steps))
        dropped = ids[int(rng.integers(core))]
        sets = []
        for snap in range(config.snapshot_count):
            members = [x for x in ids if not (snap > drop_at and x == dropped)]
            sets.append(frozenset(members))
        return sets

    if behavior == "customer":
        if steps < 1:
            return None
        batch = int(np.clip(round(rng.normal(20.0, 2.5)), 14, 28))
        core = min(config.friend_panel_cap, batch + 5 + int(rng.integers(6)))
        ids = [f"{user_id}-fr{i:03d}" for i in range(core)]
        swept = set(ids[:batch])
        sweep = world.sweep_transition
        sets = []
        for snap in range(config.snapshot_count):
            if snap == sweep + 1:
                sets.append(frozenset(x for x in ids if x not in swept))
            else:
                sets.append(frozenset(ids))
        return sets

    # aggressive: unfollow the cycle set at every rotation, refollow next snapshot
    cycle_size = int(np.clip(round(rng.normal(10.0, 1.5)), 6, 16))
    core = min(config.friend_panel_cap, cycle_size + 8 + int(rng.integers(8)))
    ids = [f"{user_id}-fr{i:03d}" for i in range(core)]
    cycle = ids[:cycle_size]
    out_snapshots: dict[int, set[str]] = {}
    for j, rotation in enumerate(world.rotation_transitions):
        if j >= 2 and rng.random() < 0.15:
            continue  # occasional skipped rotation; first two always run
        members = {x for x in cycle if j < 2 or rng.random() < 0.9}
        if rotation + 1 < config.snapshot_count:
            out_snapshots.setdefault(rotation + 1, set()).update(members)
    sets = []
    for snap in range(config.snapshot_count):
        absent = out_snapshots.get(snap, set())
        sets.append(frozenset(x for x in ids if x not in absent))
    return sets


def _assemble_trace(
    user_id: str,
    profile: _Profile,
    followers: np.ndarray,
    friends: np.ndarray,
    tweet_counts: np.ndarray,
    friend_sets: list[frozenset[str]] | None,
    tweets: tuple[TweetRecord, ...],
    panel: tuple[FollowerRecord, ...],
    world: _World,
) -> UserTrace:
    snapshots = []
    panel_base = len(friend_sets[0]) if friend_sets else 0
    for i, captured in enumerate(world.times):
        friend_ids = friend_sets[i] if friend_sets else None
        friend_count = int(friends[i])
        if friend_sets:
            friend_count = max(0, friend_count + len(friend_sets[i]) - panel_base)
        snapshots.append(
            UserSnapshot(
                user_id=user_id,
                captured_at=captured,
                follower_count=int(followers[i]),
                friend_count=friend_count,
                tweet_count=int(tweet_counts[i]),
                listed_count=profile.listed,
                favorited_count=profile.favorited,
                has_bio=profile.has_bio,
                has_profile_image=profile.has_profile_image,
                is_verified=profile.is_verified,
                is_celebrity=profile.is_celebrity,
                bio_topics=profile.bio_topics,
                tweet_language=profile.primary_language,
                friend_ids=friend_ids,
                follower_records=panel if i == len(world.times) - 1 else None,
            )
        )
    return UserTrace(
        user_id=user_id,
        snapshots=tuple(snapshots),
        tweets=tweets,
        displayed_follower_count=int(followers[-1]),
    )


def _make_user(
    user_id: str,
    rng: np.random.Generator,
    config: GeneratorConfig,
    world: _World,
    behavior: str,
) -> UserTrace:
    profile = _draw_profile(rng, config, customer=behavior != "organic")
    followers, friends, tweet_counts = _counter_paths(rng, profile, config)
    friend_sets = _friend_sets(rng, user_id, config, behavior, world)
    tweets = _tweet_panel(rng, user_id, profile, world, config)
    panel = _follower_panel(rng, user_id, profile, followers, world, config)
    trace = _assemble_trace(
        user_id, profile, followers, friends, tweet_counts,
        friend_sets, tweets, panel, world,
    )

    if behavior == "organic":
        return trace

    if rng.random() < config.negative_gain_fraction:
        # lapsed customer: bleeds followers instead of taking new bursts
        steps = config.snapshot_count - 1
        if steps > 0:
            loss_rate = float(rng.uniform(1.0, 7.0))
            dt_days = config.snapshot_interval_hours / 24.0
            losses = rng.poisson(loss_rate * dt_days, size=steps)
            drained = np.empty_like(followers)
            drained[0] = followers[0]
            for i in range(steps):
                drained[i + 1] = max(0, drained[i] - int(losses[i]))
            trace = _assemble_trace(
                user_id, profile, drained, friends, tweet_counts,
                friend_sets, tweets, panel, world,
            )
        return trace

    steps = config.snapshot_count - 1
    span_days = max(
        (world.times[-1] - world.times[0]).total_seconds() / 86400.0, 1.0
    )
    n_bursts = 1 + int(rng.poisson(0.8))
    n_bursts = max(1, min(n_bursts, max(steps, 1)))
    active_days = span_days / max(n_bursts, 1)
    parts = [
        max(1, _negbin(rng, config.customer_burst_per_day * min(active_days, 1.5),
                       config.customer_burst_dispersion))
        for _ in range(n_bursts)
    ]
    if steps > 0:
        transitions = sorted(
            int(t) for t in rng.choice(steps, size=n_bursts, replace=False)
        )
    else:
        transitions = [0] * n_bursts
    return _inject(
        trace,
        parts=list(zip(transitions, parts)),
        rng=rng,
        stockpile_fraction=config.stockpile_fraction,
        stock_date=world.stock_date,
        record_cap=3 * config.follower_panel_cap,
    )


def generate(config: GeneratorConfig) -> Corpus:
    """Generate a labeled corpus; bit-identical for identical configs."""
    config.validate()
    total = config.n_organic + config.n_customer + config.n_aggressive
    children = np.random.SeedSequence(config.seed).spawn(total + 1)
    world = _build_world(config, np.random.default_rng(children[0]))
    corpus = Corpus(meta={"generator": config.to_dict()})

    stream = 1
    for i in range(config.n_organic):
        rng = np.random.default_rng(children[stream])
        corpus.add(
            _make_user(f"org-{i:05d}", rng, config, world, "organic"), LABEL_RANDOM
        )
        stream += 1
    for i in range(config.n_customer):
        rng = np.random.default_rng(children[stream])
        corpus.add(
            _make_user(f"cust-{i:05d}", rng, config, world, "customer"), LABEL_CUSTOMER
        )
        stream += 1
    for i in range(config.n_aggressive):
        rng = np.random.default_rng(children[stream])
        corpus.add(
            _make_user(f"agg-{i:05d}", rng, config, world, "aggressive"), LABEL_CUSTOMER
        )
        stream += 1
    return corpus


# -- follower injection --------------------------------------------------------


def _inject(
    trace: UserTrace,
    parts: list[tuple[int, int]],
    rng: np.random.Generator,
    stockpile_fraction: float,
    stock_date: datetime,
    record_cap: int,
) -> UserTrace:
    """Add burst follower gains at given transitions; returns a new trace.

    Counters rise by the full burst sizes. Appended follower records are
    capped at record_cap, with follow times clustered inside each burst's
    snapshot interval and a stockpiled share of creation dates clustered
    around one past date.
    """
    amount = sum(size for _, size in parts)
    if amount == 0:
        return trace

    n_snaps = len(trace.snapshots)
    cumulative = np.zeros(n_snaps, dtype=np.int64)
    for transition, size in parts:
        first_bumped = min(transition + 1, n_snaps - 1)
        cumulative[first_bumped:] += size
    cumulative[-1] = amount  # single-snapshot traces land everything at the end

    n_records = min(amount, record_cap)
    record_split = [int(round(size / amount * n_records)) for _, size in parts]
    while sum(record_split) > n_records:
        record_split[int(np.argmax(record_split))] -= 1
    while sum(record_split) < n_records:
        record_split[int(np.argmin(record_split))] += 1

    if n_snaps > 1:
        interval_hours = (
            trace.snapshots[1].captured_at - trace.snapshots[0].captured_at
        ).total_seconds() / 3600.0
    else:
        interval_hours = 1.0

    new_records = []
    serial = 0
    for (transition, _), n_rec in zip(parts, record_split):
        snap_idx = min(transition, n_snaps - 1)
        burst_start = trace.snapshots[snap_idx].captured_at
        for _ in range(n_rec):
            serial += 1
            followed = burst_start + timedelta(
                hours=float(rng.uniform(0.0, max(interval_hours, 0.01)))
            )
            if rng.random() < stockpile_fraction:
                created = stock_date + timedelta(days=float(rng.uniform(0.0, 2.0)))
            else:
                created = followed - timedelta(days=float(rng.uniform(20.0, 1500.0)))
            if created > followed:
                created = followed - timedelta(days=1.0)
            new_records.append(
                FollowerRecord(
                    follower_id=f"{trace.user_id}-inj{serial:06d}",
                    account_created_at=created,
                    first_followed_at=followed,
                    bio_topics=frozenset(),
                    tweet_language="en",
                )
            )

    snapshots = []
    for i, snap in enumerate(trace.snapshots):
        records = snap.follower_records
        if i == n_snaps - 1:
            records = (records or ()) + tuple(new_records)
        snapshots.append(
            UserSnapshot(
                user_id=snap.user_id,
                captured_at=snap.captured_at,
                follower_count=snap.follower_count + int(cumulative[i]),
                friend_count=snap.friend_count,
                tweet_count=snap.tweet_count,
                listed_count=snap.listed_count,
                favorited_count=snap.favorited_count,
                has_bio=snap.has_bio,
                has_profile_image=snap.has_profile_image,
                is_verified=snap.is_verified,
                is_celebrity=snap.is_celebrity,
                bio_topics=snap.bio_topics,
                tweet_language=snap.tweet_language,
                friend_ids=snap.friend_ids,
                follower_records=records,
            )
        )
    return UserTrace(
        user_id=trace.user_id,
        snapshots=tuple(snapshots),
        tweets=trace.tweets,
        displayed_follower_count=trace.displayed_follower_count + amount,
    )


def inject_manipulation(
    trace: UserTrace, amount: int, burstiness: float = 1.0, seed: int = 0
) -> UserTrace:
    """Inject `amount` followers into a copy of the trace.

    burstiness in [0, 1] controls concentration: 1.0 drops everything in a
    single snapshot interval, 0.0 spreads it over several. The final displayed
    count rises by exactly `amount`; the injected per-snapshot gain is
    monotone; the input trace is untouched.
    """
    if amount < 0:
        raise ValueError("amount must be >= 0")
    if amount == 0:
        return trace
    rng = np.random.default_rng(seed)
    concentration = min(max(burstiness, 0.0), 1.0)
    steps = len(trace.snapshots) - 1
    n_bursts = max(1, int(round((1.0 - concentration) * 6.0)))
    n_bursts = min(n_bursts, max(steps, 1), amount)
    if steps > 0:
        chosen = sorted(int(t) for t in rng.choice(steps, size=n_bursts, replace=False))
    else:
        chosen = [0] * n_bursts
    sizes = rng.multinomial(amount, [1.0 / n_bursts] * n_bursts)
    window_start = trace.snapshots[0].captured_at
    stock_date = window_start - timedelta(days=float(rng.uniform(200.0, 400.0)))
    return _inject(
        trace,
        parts=[(t, int(s)) for t, s in zip(chosen, sizes) if s > 0],
        rng=rng,
        stockpile_fraction=0.35,
        stock_date=stock_date,
        record_cap=200,
    )
