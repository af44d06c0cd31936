"""Cascades, topic profiles and virality verdicts.

A cascade is every retweet of one tweet; its author is the retweeted user.
Groups are attributed by author, both for cascades and for topic counts.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ConflictingAuthor, EmptyGroup, NoTopics
from .grouping import GroupAssignment
from .interactions import InteractionDataset
from .verdicts import Verdict, within


@dataclass(frozen=True)
class Cascade:
    tweet: str
    author: str
    size: int
    distinct_retweeters: int
    start: int
    end: int
    retweet_offsets: tuple[int, ...]
    retweeter_offsets: tuple[int, ...] = field(repr=False)

    @property
    def duration(self) -> int:
        return self.end - self.start


def extract_cascades(ds: InteractionDataset) -> list[Cascade]:
    """One cascade per tweet id, sorted by tweet id."""
    by_tweet: dict[str, list] = defaultdict(list)
    authors: dict[str, str] = {}
    for t in ds.interactions:
        a = authors.setdefault(t.tweet, t.retweeted)
        if a != t.retweeted:
            raise ConflictingAuthor(f"tweet {t.tweet!r} is attributed to both {a!r} and {t.retweeted!r}")
        by_tweet[t.tweet].append((t.timestamp, t.retweeter))
    out = []
    for tweet in sorted(by_tweet):
        events = sorted(by_tweet[tweet])
        start = events[0][0]
        first_by: dict[str, int] = {}
        for ts, who in events:
            first_by.setdefault(who, ts - start)
        out.append(Cascade(tweet, authors[tweet], len(events), len(first_by), start, events[-1][0],
                           tuple(ts - start for ts, _ in events), tuple(sorted(first_by.values()))))
    return out


# -- topics -------------------------------------------------------------------

@dataclass
class TopicProfile:
    group: str
    top_topics: list[tuple[str, int]]

    @property
    def topic_set(self) -> set[str]:
        return {t for t, _ in self.top_topics}


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


@dataclass
class TopicResult:
    profiles: list[TopicProfile]
    similarity: float
    pairwise: dict[str, float]
    threshold: float
    k: int
    verdict: Verdict

    def csv_rows(self) -> list[list]:
        return [[p.group, rank, topic, count] for p in self.profiles
                for rank, (topic, count) in enumerate(p.top_topics, 1)]

    def as_dict(self) -> dict:
        return {"k": self.k, "threshold": self.threshold, "mean_pairwise_jaccard": self.similarity,
                "pairwise_jaccard": self.pairwise,
                "profiles": {p.group: [[t, c] for t, c in p.top_topics] for p in self.profiles},
                "verdict": self.verdict.value}


def topic_profiles(ds: InteractionDataset, assignment: GroupAssignment, k: int = 8,
                   threshold: float = 0.5) -> TopicResult:
    """Top-``k`` topics per author group and their mean pairwise Jaccard similarity."""
    counters = [Counter() for _ in range(assignment.n_groups)]
    any_topic = False
    for t in ds.interactions:
        if t.topics:
            any_topic = True
        g = assignment.group_of(t.retweeted)
        if g is not None:
            counters[g].update(t.topics)
    if not any_topic:
        raise NoTopics("no interaction carries a topic")
    profiles = []
    for name, counter in zip(assignment.names, counters):
        ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
        profiles.append(TopicProfile(name, ranked))
    pairwise = {f"{a.group}|{b.group}": jaccard(a.topic_set, b.topic_set) for a, b in combinations(profiles, 2)}
    similarity = float(np.mean(list(pairwise.values()))) if pairwise else 1.0
    verdict = Verdict.DISCUSS_SIMILARLY if similarity >= threshold else Verdict.DISCUSS_DIFFERENTLY
    return TopicResult(profiles, similarity, pairwise, threshold, k, verdict)


# -- cascades per group -------------------------------------------------------

@dataclass
class GroupVirality:
    group: str
    cascades: int
    mean_size: float
    mean_distinct: float
    mean_duration_s: float
    curve: list[float]
    influencer: Verdict

    def as_dict(self) -> dict:
        return {"group": self.group, "cascades": self.cascades, "mean_size": self.mean_size,
                "mean_distinct_retweeters": self.mean_distinct, "mean_duration_s": self.mean_duration_s,
                "mean_duration_h": self.mean_duration_s / 3600, "time_to_ith_retweeter_s": self.curve,
                "influencer": self.influencer.value}


@dataclass
class ViralityResult:
    groups: list[GroupVirality]
    grand_mean_size: float
    grand_mean_duration_s: float
    verdict: Verdict
    epsilon_rel: float
    min_size: float
    max_hours: float
    cascade_rows: list[list]

    def curve_rows(self) -> list[list]:
        return [[g.group, i, off] for g in self.groups for i, off in enumerate(g.curve, 1)]

    def as_dict(self) -> dict:
        return {"epsilon_rel": self.epsilon_rel,
                "influencer_thresholds": {"min_size": self.min_size, "max_hours": self.max_hours},
                "grand_mean_size": self.grand_mean_size, "grand_mean_duration_s": self.grand_mean_duration_s,
                "groups": [g.as_dict() for g in self.groups], "verdict": self.verdict.value}


def ith_retweeter_curve(cascades: list[Cascade]) -> list[float]:
    """Mean offset of the i-th distinct retweeter, for i up to the smallest cascade's count."""
    if not cascades:
        return []
    depth = min(c.distinct_retweeters for c in cascades)
    offsets = np.array([c.retweeter_offsets[:depth] for c in cascades], dtype=float)
    return offsets.mean(axis=0).tolist()


def virality_analysis(cascades: list[Cascade], assignment: GroupAssignment, epsilon_rel: float = 0.10,
                      min_size: float = 50, max_hours: float = 24) -> ViralityResult:
    """Per-group cascade statistics, influencer flags and the viral verdict."""
    if not cascades:
        raise EmptyGroup("no cascades")
    per_group: list[list[Cascade]] = [[] for _ in range(assignment.n_groups)]
    rows = []
    for c in cascades:
        g = assignment.group_of(c.author)
        rows.append([c.tweet, c.author, "Unknown" if g is None else assignment.names[g], c.size, c.duration])
        if g is not None:
            per_group[g].append(c)
    stats = []
    for name, items in zip(assignment.names, per_group):
        if not items:
            raise EmptyGroup(f"group {name!r} authored no cascades")
        size = float(np.mean([c.size for c in items]))
        duration = float(np.mean([c.duration for c in items]))
        infl = size >= min_size and duration <= max_hours * 3600
        stats.append(GroupVirality(name, len(items), size, float(np.mean([c.distinct_retweeters for c in items])),
                                   duration, ith_retweeter_curve(items),
                                   Verdict.INFLUENCER if infl else Verdict.NON_INFLUENCER))
    everything = [c for items in per_group for c in items]
    grand_size = float(np.mean([c.size for c in everything]))
    grand_duration = float(np.mean([c.duration for c in everything]))
    equal = all(within(s.mean_size, grand_size, epsilon_rel) and within(s.mean_duration_s, grand_duration, epsilon_rel)
                for s in stats)
    return ViralityResult(stats, grand_size, grand_duration,
                          Verdict.EQUALLY_VIRAL if equal else Verdict.UNEVENLY_VIRAL,
                          epsilon_rel, min_size, max_hours, rows)
