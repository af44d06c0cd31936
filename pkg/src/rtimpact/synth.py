"""Seeded synthetic retweet datasets with planted group behaviour.

Each group emits an exact number of retweets per day (its members take turns
as retweeters, so per-user activity is balanced). A ``core_bias`` share of a
group's retweets goes to uniformly chosen members of the same group, which
builds a dense core; the rest is split exactly over target groups and lands
on each target group's authoring members with Zipf-like preference.

Retweets of one author are cut into tweets (cascades) of about
``mean_size`` retweets. Short cascades (``mean_duration_h`` under a day)
span exactly ``mean_duration_h`` inside one UTC day; longer ones gather
retweets from ``ceil(mean_duration_h / 24)`` consecutive days. Retweet days
never move, so daily per-group counts are exactly the schedule.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidSpec
from .interactions import Interaction, InteractionDataset, write_dataset

DAY = 86400
DEFAULT_START = 1554076800  # 2019-04-01T00:00:00Z


@dataclass
class CascadeProfile:
    mean_size: float = 10.0
    mean_duration_h: float = 6.0


@dataclass
class GroupBehavior:
    name: str
    user_count: int
    score_range: tuple[float, float]
    daily_emission: list[int]
    target_group_distribution: list[float]
    cascade_profile: CascadeProfile = field(default_factory=CascadeProfile)
    core_bias: float = 0.0
    topics: list[str] = field(default_factory=list)
    authors: int | None = None


@dataclass
class ScenarioSpec:
    name: str
    seed: int
    days: int
    groups: list[GroupBehavior]
    start: int = DEFAULT_START
    preferential: float = 0.5
    expected: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.days < 1 or not self.groups:
            raise InvalidSpec("a scenario needs at least one day and one group")
        n = len(self.groups)
        prev_hi = 0.0
        for g in self.groups:
            lo, hi = g.score_range
            if g.user_count < 1:
                raise InvalidSpec(f"group {g.name!r} needs at least one user")
            if not (0.0 <= lo < hi <= 1.0) or lo < prev_hi:
                raise InvalidSpec("score ranges must be ordered, disjoint and inside [0, 1]")
            prev_hi = hi
            if len(g.daily_emission) != self.days or any(c < 0 for c in g.daily_emission):
                raise InvalidSpec(f"group {g.name!r} needs one non-negative emission count per day")
            if len(g.target_group_distribution) != n or abs(sum(g.target_group_distribution) - 1) > 1e-9:
                raise InvalidSpec(f"group {g.name!r} target distribution must cover {n} groups and sum to 1")
            if not 0.0 <= g.core_bias <= 1.0:
                raise InvalidSpec("core_bias must be in [0, 1]")
            if g.authors is not None and not 2 <= g.authors <= g.user_count:
                raise InvalidSpec("authors must be between 2 and the group size")
            if g.core_bias > 0 and g.user_count < 2:
                raise InvalidSpec("a core needs at least two members")

    @property
    def fractions(self) -> list[float]:
        total = sum(g.user_count for g in self.groups)
        return [g.user_count / total for g in self.groups]


@dataclass
class GroundTruth:
    scenario: str
    seed: int
    group_names: list[str]
    group_fractions: list[float]
    expected: dict
    planted: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        return cls(**json.loads(text))


def apportion(total: int, weights) -> list[int]:
    """Split ``total`` into integers proportional to ``weights`` (largest remainder)."""
    w = np.asarray(weights, float)
    if total == 0 or w.sum() == 0:
        return [0] * len(w)
    raw = total * w / w.sum()
    base = np.floor(raw).astype(np.int64)
    rest = total - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:rest]] += 1
    return base.tolist()


def _zipf(n: int, alpha: float) -> np.ndarray:
    w = np.arange(1, n + 1, dtype=float) ** -alpha
    return w / w.sum()


def generate(spec: ScenarioSpec) -> tuple[InteractionDataset, dict[str, float], GroundTruth]:
    """Build the dataset, the per-user scores and the ground truth of a scenario."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n_total = sum(g.user_count for g in spec.groups)
    width = len(str(n_total))
    ids = [f"u{j:0{width}d}" for j in rng.permutation(n_total)]

    members: list[np.ndarray] = []
    scores: dict[str, float] = {}
    offset = 0
    for g in spec.groups:
        codes = np.arange(offset, offset + g.user_count)
        offset += g.user_count
        lo, hi = g.score_range
        values = lo + (hi - lo) * (np.arange(g.user_count) + 0.5) / g.user_count
        for c, v in zip(codes, rng.permutation(values)):
            scores[ids[c]] = round(float(v), 6)
        members.append(codes)
    authors = [m[: g.authors] if g.authors else m for m, g in zip(members, spec.groups)]
    prefs = [_zipf(len(a), spec.preferential) for a in authors]

    days_col, src_col, dst_col = [], [], []
    cursor = [0] * len(spec.groups)
    cycles = [rng.permutation(m) for m in members]
    for a, g in enumerate(spec.groups):
        for day, count in enumerate(g.daily_emission):
            if count == 0:
                continue
            pos = (cursor[a] + np.arange(count)) % len(cycles[a])
            cursor[a] += count
            src = cycles[a][pos]
            core = int(round(g.core_bias * count))
            parts = [rng.choice(members[a], size=core)]
            for b, k in enumerate(apportion(count - core, g.target_group_distribution)):
                if k:
                    parts.append(rng.choice(authors[b], size=k, p=prefs[b]))
            dst = rng.permutation(np.concatenate(parts))
            for _ in range(100):
                clash = np.flatnonzero(src == dst)
                if clash.size == 0:
                    break
                # move clashing targets to other slots of the same day
                swap = rng.integers(0, count, clash.size)
                dst[clash], dst[swap] = dst[swap], dst[clash].copy()
            days_col.append(np.full(count, day))
            src_col.append(src)
            dst_col.append(dst)
    day_arr = np.concatenate(days_col)
    src_arr = np.concatenate(src_col)
    dst_arr = np.concatenate(dst_col)
    group_of = np.empty(n_total, np.int64)
    for k, m in enumerate(members):
        group_of[m] = k

    stamps = np.zeros(day_arr.size, np.int64)
    tweet_of = np.empty(day_arr.size, object)
    topics_of: dict[str, tuple[str, ...]] = {}
    order = np.lexsort((day_arr, dst_arr))
    bounds = np.flatnonzero(np.diff(dst_arr[order])) + 1
    for slots in np.split(order, bounds):
        author = int(dst_arr[slots[0]])
        beh = spec.groups[group_of[author]]
        prof = beh.cascade_profile
        span = max(1, math.ceil(prof.mean_duration_h / 24 - 1e-9))
        duration = int(round(prof.mean_duration_h * 3600))
        serial = 0
        windows = day_arr[slots] // span
        for w in np.unique(windows):
            chunk = rng.permutation(slots[windows == w])
            n_tweets = max(1, int(round(chunk.size / prof.mean_size)))
            for t in range(n_tweets):
                mine = chunk[t::n_tweets]
                tweet = f"t{ids[author]}-{serial:04d}"
                serial += 1
                tweet_of[mine] = tweet
                if beh.topics:
                    k = 1 if len(beh.topics) == 1 else int(rng.integers(1, 3))
                    pick = rng.choice(len(beh.topics), size=k, replace=False, p=_zipf(len(beh.topics), 1.0))
                    topics_of[tweet] = tuple(beh.topics[i] for i in sorted(pick))
                else:
                    topics_of[tweet] = ()
                if span == 1:
                    day0 = spec.start + int(day_arr[mine[0]]) * DAY
                    d = min(duration, DAY - 1)
                    begin = day0 + int(rng.integers(0, DAY - d))
                    offs = np.sort(rng.integers(0, d + 1, mine.size))
                    offs[0] = 0
                    if mine.size > 1:
                        offs[-1] = d
                    stamps[mine] = begin + offs
                else:
                    stamps[mine] = spec.start + day_arr[mine] * DAY + rng.integers(0, DAY, mine.size)

    items = sorted(Interaction(int(ts), str(tw), ids[s], ids[d], topics_of[tw])
                   for ts, tw, s, d in zip(stamps.tolist(), tweet_of.tolist(), src_arr.tolist(), dst_arr.tolist()))
    ds = InteractionDataset.from_interactions(items, source_path=f"synth:{spec.name}")

    total = day_arr.size
    emitted = np.bincount(group_of[src_arr], minlength=len(spec.groups))
    received = np.bincount(group_of[dst_arr], minlength=len(spec.groups))
    planted = {
        "users": {g.name: g.user_count for g in spec.groups},
        "interactions": int(total),
        "emission_schedule": {g.name: list(g.daily_emission) for g in spec.groups},
        "weight_share": {g.name: float(emitted[k] / total) for k, g in enumerate(spec.groups)},
        "received_share": {g.name: float(received[k] / total) for k, g in enumerate(spec.groups)},
        "core_bias": {g.name: g.core_bias for g in spec.groups},
        "cascade_profile": {g.name: asdict(g.cascade_profile) for g in spec.groups},
        "authors": {g.name: len(a) for g, a in zip(spec.groups, authors)},
    }
    truth = GroundTruth(spec.name, spec.seed, [g.name for g in spec.groups], spec.fractions,
                        spec.expected, planted)
    return ds, scores, truth


def write_scenario(spec: ScenarioSpec, out_dir: str) -> dict[str, str]:
    """Write dataset.ndjson, scores.csv, ground_truth.json and a run config."""
    ds, scores, truth = generate(spec)
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, name)
             for name in ("dataset.ndjson", "scores.csv", "ground_truth.json", "config.ini")}
    write_dataset(ds, paths["dataset.ndjson"])
    with open(paths["scores.csv"], "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user", "score"])
        for u in sorted(scores):
            w.writerow([u, repr(scores[u])])
    with open(paths["ground_truth.json"], "w", encoding="utf-8") as fh:
        fh.write(truth.to_json() + "\n")
    with open(paths["config.ini"], "w", encoding="utf-8") as fh:
        fh.write(scenario_config(truth))
    return paths


def scenario_config(truth: GroundTruth) -> str:
    fractions = ", ".join(repr(round(f, 12)) for f in truth.group_fractions)
    names = ", ".join(truth.group_names)
    return (f"[dataset]\npath = dataset.ndjson\n\n[scores]\nsource = file\npath = scores.csv\n\n"
            f"[groups]\nfractions = {fractions}\nnames = {names}\n")


# -- preset scenarios ---------------------------------------------------------

def _daily(total: int, days: int) -> list[int]:
    return apportion(total, [1] * days)


def _vocab(prefix: str, n: int = 12) -> list[str]:
    return [f"{prefix}{i:02d}" for i in range(n)]


SHARED_TOPICS = ["election", "debate", "vote", "campaign", "poll", "candidates", "rally", "results",
                 "economy", "health", "jobs", "europe"]
THREE = ("Likely Humans", "Likely Semi-Bots", "Likely Bots")
THREE_RANGES = ((0.0, 0.19), (0.19, 0.37), (0.37, 1.0))


def _three(users: int) -> list[int]:
    return apportion(users, [0.7, 0.2, 0.1])


def preset(name: str, seed: int = 0, users: int = 5000, interactions: int = 100_000, days: int = 7) -> ScenarioSpec:
    """Named scenario: null, heavy, core, bursty or fast."""
    if name == "null":
        g = GroupBehavior("All", users, (0.0, 1.0), _daily(interactions, days), [1.0],
                          CascadeProfile(10, 6), topics=SHARED_TOPICS)
        expected = {
            "stats": "Equally distributed",
            "network_global": "Ecosystem maintainer",
            "network_node": "Behave similarly",
            "robustness": {"All": "Non-destabilizing"},
            "influence": "Influence similarly",
            "structure": {"All": "Proportionate"},
            "temporal": {"All": "Normally stimulated"},
            "topics": "Discuss similarly",
            "virality": "Equally viral",
        }
        return ScenarioSpec("null", seed, days, [g], preferential=0.0, expected=expected)

    if name == "heavy":
        sizes = _three(users)
        shares = apportion(interactions, [0.6 * sizes[0], 0.6 * sizes[1], 0.4 * (sizes[0] + sizes[1])])
        targets = [[0.7, 0.2, 0.1], [0.7, 0.2, 0.1], [0.78, 0.22, 0.0]]
        groups = [GroupBehavior(n, s, r, _daily(e, days), t, topics=SHARED_TOPICS)
                  for n, s, r, e, t in zip(THREE, sizes, THREE_RANGES, shares, targets)]
        expected = {"network_global": "Ecosystem changer",
                    "robustness": {"Likely Bots": "Destabilizing"},
                    "robustness_weight_drop_pct": {"Likely Bots": 40.0}}
        return ScenarioSpec("heavy", seed, days, groups, expected=expected)

    if name == "core":
        sizes = _three(users)
        # semi-bots are three times as active and keep 80% of it in-group
        shares = apportion(interactions, [sizes[0], 3 * sizes[1], sizes[2]])
        biases = [0.0, 0.8, 0.0]
        groups = [GroupBehavior(n, s, r, _daily(e, days), [0.7, 0.2, 0.1], core_bias=b, topics=SHARED_TOPICS)
                  for n, s, r, e, b in zip(THREE, sizes, THREE_RANGES, shares, biases)]
        expected = {"structure_core": {"Likely Semi-Bots": "Highly populated"}}
        return ScenarioSpec("core", seed, days, groups, preferential=0.0, expected=expected)

    if name == "bursty":
        sizes = apportion(users, [0.8, 0.2])
        per_day = _daily(interactions, days)
        burst_day = min(2, days - 1)
        b_counts = [int(round(c * (0.4 if d == burst_day else 0.2))) for d, c in enumerate(per_day)]
        a_counts = [c - b for c, b in zip(per_day, b_counts)]
        groups = [GroupBehavior("A", sizes[0], (0.0, 0.5), a_counts, [0.8, 0.2], topics=SHARED_TOPICS),
                  GroupBehavior("B", sizes[1], (0.5, 1.0), b_counts, [0.8, 0.2], topics=SHARED_TOPICS)]
        label = _day_label(DEFAULT_START, burst_day)
        expected = {"temporal_flagged": {"A": {"Overstimulated": [], "Understimulated": [label]},
                                         "B": {"Overstimulated": [label], "Understimulated": []}}}
        return ScenarioSpec("bursty", seed, days, groups, expected=expected)

    if name == "fast":
        sizes = apportion(users, [0.9, 0.1])
        shares = apportion(interactions, sizes)
        groups = [GroupBehavior("Slow", sizes[0], (0.0, 0.5), _daily(shares[0], days), [0.7, 0.3],
                                CascadeProfile(5, 72), topics=_vocab("slow"), authors=min(100, sizes[0])),
                  GroupBehavior("Fast", sizes[1], (0.5, 1.0), _daily(shares[1], days), [0.7, 0.3],
                                CascadeProfile(100, 1), topics=_vocab("fast"), authors=min(10, sizes[1]))]
        expected = {"virality": "Unevenly viral",
                    "influencer": {"Slow": "Non-influencer", "Fast": "Influencer"}}
        return ScenarioSpec("fast", seed, days, groups, expected=expected)

    raise InvalidSpec(f"unknown scenario {name!r}; choose from {', '.join(PRESETS)}")


PRESETS = ("null", "heavy", "core", "bursty", "fast")


def _day_label(start: int, day: int) -> str:
    return dt.datetime.fromtimestamp(start + day * DAY, tz=dt.timezone.utc).strftime("%Y-%m-%d")
