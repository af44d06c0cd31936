"""Per-day (or per-hour) traffic shares and stimulation verdicts.

Every interaction is credited to the group of its retweeter. Buckets are
fixed UTC days or hours spanning the dataset window, empty ones included.
A group is normally stimulated in a bucket when its share of the bucket's
traffic is within ``epsilon_rel`` (relative) of its share of users.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, EmptyWindow
from .graph import SocialGraph, build_graph
from .grouping import GroupAssignment
from .interactions import InteractionDataset, parse_timestamp
from .verdicts import Verdict

UNITS = {"day": 86400, "hour": 3600}


def stimulation(p_gd: float, p_g: float, epsilon_rel: float) -> Verdict:
    if abs(p_gd - p_g) <= epsilon_rel * p_g + 1e-12:
        return Verdict.NORMAL
    return Verdict.OVER if p_gd > p_g else Verdict.UNDER


def bucket_label(start: int, unit: str) -> str:
    t = dt.datetime.fromtimestamp(start, tz=dt.timezone.utc)
    return t.strftime("%Y-%m-%d") if unit == "day" else t.strftime("%Y-%m-%dT%H:00Z")


@dataclass
class Bucket:
    start: int
    label: str
    total: int
    counts: list[int]
    unknown: int
    shares: list[float]
    verdicts: list[Verdict | None]


@dataclass
class TemporalSeries:
    unit: str
    names: list[str]
    user_shares: list[float]
    traffic_shares: list[float]
    buckets: list[Bucket]
    epsilon_rel: float
    include_unknown: bool

    def verdict_counts(self) -> dict[str, dict[str, int]]:
        out = {}
        for i, name in enumerate(self.names):
            counts = {v.value: 0 for v in (Verdict.NORMAL, Verdict.UNDER, Verdict.OVER)}
            for b in self.buckets:
                if b.verdicts[i] is not None:
                    counts[b.verdicts[i].value] += 1
            out[name] = counts
        return out

    def flagged(self) -> dict[str, dict[str, list[str]]]:
        """Bucket labels where each group was not normally stimulated."""
        out = {}
        for i, name in enumerate(self.names):
            out[name] = {
                Verdict.OVER.value: [b.label for b in self.buckets if b.verdicts[i] is Verdict.OVER],
                Verdict.UNDER.value: [b.label for b in self.buckets if b.verdicts[i] is Verdict.UNDER],
            }
        return out

    def csv_header(self) -> list[str]:
        n = self.names
        return ["date", "total", *(f"count_{g}" for g in n), *(f"p_{g}" for g in n), *(f"verdict_{g}" for g in n)]

    def csv_rows(self) -> list[list]:
        return [[b.label, b.total, *b.counts, *b.shares, *("" if v is None else v.value for v in b.verdicts)]
                for b in self.buckets]

    def as_dict(self) -> dict:
        return {
            "unit": self.unit,
            "epsilon_rel": self.epsilon_rel,
            "include_unknown_in_total": self.include_unknown,
            "user_shares": dict(zip(self.names, self.user_shares)),
            "traffic_shares": dict(zip(self.names, self.traffic_shares)),
            "buckets": [{"bucket": b.label, "total": b.total, "unknown": b.unknown,
                         "counts": dict(zip(self.names, b.counts)),
                         "shares": dict(zip(self.names, b.shares)),
                         "verdicts": {n: None if v is None else v.value for n, v in zip(self.names, b.verdicts)}}
                        for b in self.buckets],
            "verdict_counts": self.verdict_counts(),
            "flagged": self.flagged(),
        }


def temporal_analysis(ds: InteractionDataset, assignment: GroupAssignment, unit: str = "day",
                      epsilon_rel: float = 0.10, include_unknown: bool = False) -> TemporalSeries:
    """Bucket traffic by retweeter group; buckets with no traffic carry no verdict."""
    if len(ds) == 0:
        raise EmptyDataset("no interactions to bucket")
    if unit not in UNITS:
        raise ValueError(f"unit must be one of {sorted(UNITS)}")
    width = UNITS[unit]
    first = ds.window_start // width
    n_buckets = ds.window_end // width - first + 1
    n_groups = assignment.n_groups
    counts = np.zeros((n_buckets, n_groups + 1), np.int64)  # last column: uncategorized
    for t in ds.interactions:
        k = assignment.group_of(t.retweeter)
        counts[t.timestamp // width - first, n_groups if k is None else k] += 1

    p_g = assignment.fractions
    categorized = counts[:, :n_groups].sum()
    traffic = (counts[:, :n_groups].sum(axis=0) / categorized).tolist() if categorized else [0.0] * n_groups
    buckets = []
    for i in range(n_buckets):
        row = counts[i]
        total = int(row.sum() if include_unknown else row[:n_groups].sum())
        shares = [float(c) / total if total else 0.0 for c in row[:n_groups]]
        verdicts = [stimulation(s, p, epsilon_rel) if total else None for s, p in zip(shares, p_g)]
        start = int((first + i) * width)
        buckets.append(Bucket(start, bucket_label(start, unit), total, row[:n_groups].tolist(),
                              int(row[n_groups]), shares, verdicts))
    return TemporalSeries(unit, assignment.names, p_g, traffic, buckets, epsilon_rel, include_unknown)


def _bound(value, end: bool) -> int:
    if isinstance(value, dt.date) and not isinstance(value, dt.datetime):
        ts = int(dt.datetime(value.year, value.month, value.day, tzinfo=dt.timezone.utc).timestamp())
        return ts + 86399 if end else ts
    if isinstance(value, str) and len(value.strip()) == 10:
        return _bound(dt.date.fromisoformat(value.strip()), end)
    return parse_timestamp(value)


def window_subgraph(ds: InteractionDataset, assignment: GroupAssignment | None, start, end) -> SocialGraph:
    """Graph of the interactions with timestamps in ``[start, end]``.

    Bounds may be epoch seconds, ISO instants or dates; a date as ``end``
    covers that whole UTC day. ``assignment`` is accepted for symmetry with
    the other perspectives and does not filter users.
    """
    lo, hi = _bound(start, False), _bound(end, True)
    if lo > hi:
        raise EmptyWindow(f"window start {start} is after its end {end}")
    kept = [t for t in ds.interactions if lo <= t.timestamp <= hi]
    if not kept:
        raise EmptyWindow(f"no interactions between {start} and {end}")
    return build_graph(InteractionDataset.from_interactions(kept, ds.source_path))
