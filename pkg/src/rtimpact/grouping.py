"""User categorization and group assignment.

A score source maps users to a botscore in [0, 1] (or to a categorical
label). Numeric scores are binned into groups either by percentile
fractions, e.g. ``[0.7, 0.2, 0.1]``, or by explicit score thresholds.

Percentile splits are rank based: users are ordered by ``(score, user)``
and the nearest-rank cut positions ``ceil(F_j * n)`` of the cumulative
fractions ``F_j`` delimit the groups. Group sizes therefore stay within one
user of ``f_g * n`` even when many scores coincide; users sharing the score
at a cut are split by user id.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import requests

from .errors import ConfigError, InvalidSpec, MalformedScore, NoScores, SourceUnreachable

log = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.7, 0.2, 0.1)
DEFAULT_NAMES = ("Likely Humans", "Likely Semi-Bots", "Likely Bots")


@dataclass(frozen=True)
class CategorizationResult:
    user: str
    value: float | str | None
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _check_score(user: str, value) -> float | str:
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            return value.strip()
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedScore(f"score for {user!r} is not a number: {value!r}")
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise MalformedScore(f"score for {user!r} outside [0, 1]: {value}")
    return value


# -- score sources ------------------------------------------------------------

class ScoreSource:
    """Interface: ``lookup(users)`` returns values for the users it knows."""

    def lookup(self, users: Sequence[str]) -> dict[str, float | str]:
        raise NotImplementedError


class ConstantScoreSource(ScoreSource):
    def __init__(self, value: float):
        self.value = value

    def lookup(self, users):
        return {u: self.value for u in users}


class MappingScoreSource(ScoreSource):
    def __init__(self, scores: Mapping[str, float | str]):
        self.scores = dict(scores)

    def lookup(self, users):
        return {u: self.scores[u] for u in users if u in self.scores}


class FileScoreSource(ScoreSource):
    """CSV ``user,score`` (or ``user,label``) or NDJSON ``{"user", "score"}``."""

    def __init__(self, path: str):
        if not os.path.isfile(path):
            raise ConfigError(f"score file not found: {path}")
        self.path = path
        self._scores: dict[str, float | str] | None = None

    def _load(self) -> dict[str, float | str]:
        scores: dict[str, float | str] = {}
        with open(self.path, encoding="utf-8", newline="") as fh:
            head = fh.read(1)
            fh.seek(0)
            if head == "{":
                for line in fh:
                    if line.strip():
                        obj = json.loads(line)
                        value = obj["score"] if "score" in obj else obj.get("label")
                        scores[str(obj["user"])] = value
            else:
                for i, row in enumerate(csv.reader(fh)):
                    if not row:
                        continue
                    if i == 0 and row[0].strip().lower() == "user":
                        continue
                    scores[row[0].strip()] = row[1].strip()
        return scores

    def lookup(self, users):
        if self._scores is None:
            self._scores = self._load()
        return {u: self._scores[u] for u in users if u in self._scores}


class HttpScoreSource(ScoreSource):
    """``GET {base_url}/{user}`` returning ``{"score": x}``.

    404 means the user is unavailable (suspended, private). Other failures
    are retried with exponential backoff. Responses are cached on disk, one
    JSON file per user, so interrupted runs resume without refetching.
    """

    def __init__(self, base_url: str, token_env: str | None = None, cache_dir: str | None = None,
                 retries: int = 3, backoff: float = 0.5, timeout: float = 10.0, parallelism: int = 4):
        self.base_url = base_url.rstrip("/")
        self.token_env = token_env
        self.cache_dir = cache_dir
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self.parallelism = max(1, parallelism)
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)

    def _cache_path(self, user: str) -> str | None:
        if not self.cache_dir:
            return None
        return os.path.join(self.cache_dir, hashlib.sha1(user.encode("utf-8")).hexdigest() + ".json")

    def _fetch(self, session, user: str) -> dict:
        path = self._cache_path(user)
        if path and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        headers = {}
        if self.token_env and os.environ.get(self.token_env):
            headers["Authorization"] = f"Bearer {os.environ[self.token_env]}"
        url = f"{self.base_url}/{requests.utils.quote(user, safe='')}"
        last = None
        for attempt in range(self.retries + 1):
            try:
                resp = session.get(url, headers=headers, timeout=self.timeout)
                if resp.status_code == 404:
                    payload = {"status": "unavailable"}
                    break
                if resp.status_code < 500 and resp.status_code != 429:
                    resp.raise_for_status()
                    payload = {"score": resp.json()["score"]}
                    break
                last = f"HTTP {resp.status_code}"
            except (requests.ConnectionError, requests.Timeout) as exc:
                last = str(exc)
            except (requests.HTTPError, ValueError, KeyError) as exc:
                raise SourceUnreachable(f"bad response for {user!r} from {url}: {exc}") from exc
            if attempt < self.retries:
                time.sleep(self.backoff * 2 ** attempt)
        else:
            raise SourceUnreachable(f"{url}: giving up after {self.retries + 1} attempts ({last})")
        if path:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh)
        return payload

    def lookup(self, users):
        with requests.Session() as session, ThreadPoolExecutor(self.parallelism) as pool:
            payloads = list(pool.map(lambda u: self._fetch(session, u), users))
        return {u: p["score"] for u, p in zip(users, payloads) if "score" in p}


def categorize(users: Iterable[str], source: ScoreSource) -> list[CategorizationResult]:
    """One result per distinct user, sorted by user id."""
    users = sorted(set(users))
    found = source.lookup(users)
    out = []
    for u in users:
        if u in found and found[u] is not None and found[u] != "":
            out.append(CategorizationResult(u, _check_score(u, found[u])))
        else:
            out.append(CategorizationResult(u, None, "unavailable"))
    return out


# -- group assignment ---------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    """Either percentile ``fractions`` or explicit interior ``thresholds``."""

    fractions: tuple[float, ...] | None = None
    thresholds: tuple[float, ...] | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if (self.fractions is None) == (self.thresholds is None):
            raise InvalidSpec("give exactly one of fractions or thresholds")
        if self.fractions is not None:
            if not self.fractions or any(f <= 0 for f in self.fractions):
                raise InvalidSpec("fractions must be positive")
            if abs(sum(self.fractions) - 1.0) > 1e-9:
                raise InvalidSpec(f"fractions must sum to 1, got {sum(self.fractions)}")
        else:
            t = self.thresholds
            if any(not (0.0 < x < 1.0) for x in t) or any(a >= b for a, b in zip(t, t[1:])):
                raise InvalidSpec("thresholds must be strictly increasing inside (0, 1)")
        if self.names is not None and len(self.names) != self.n_groups:
            raise InvalidSpec(f"{len(self.names)} names for {self.n_groups} groups")

    @property
    def n_groups(self) -> int:
        return len(self.fractions) if self.fractions is not None else len(self.thresholds) + 1

    def group_names(self) -> tuple[str, ...]:
        if self.names is not None:
            return self.names
        if self.fractions is not None and tuple(self.fractions) == DEFAULT_FRACTIONS:
            return DEFAULT_NAMES
        return tuple(f"G{i + 1}" for i in range(self.n_groups))


@dataclass(frozen=True)
class Group:
    name: str
    lo: float | None = None
    hi: float | None = None
    label: str | None = None


@dataclass
class GroupAssignment:
    groups: list[Group]
    membership: dict[str, int | None]
    scores: dict[str, float] = field(default_factory=dict)
    thresholds: list[float] = field(default_factory=list)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.groups]

    def members(self, g: int) -> list[str]:
        return sorted(u for u, k in self.membership.items() if k == g)

    def group_of(self, user: str) -> int | None:
        return self.membership.get(user)

    @property
    def categorized(self) -> list[str]:
        return sorted(u for u, k in self.membership.items() if k is not None)

    @property
    def unknown(self) -> list[str]:
        return sorted(u for u, k in self.membership.items() if k is None)

    @property
    def sizes(self) -> list[int]:
        counts = [0] * self.n_groups
        for k in self.membership.values():
            if k is not None:
                counts[k] += 1
        return counts

    @property
    def fractions(self) -> list[float]:
        sizes = self.sizes
        total = sum(sizes)
        return [s / total if total else 0.0 for s in sizes]

    def restricted_to(self, users: Iterable[str]) -> "GroupAssignment":
        """Same groups, membership limited to ``users`` (unseen users -> Unknown)."""
        return GroupAssignment(self.groups, {u: self.membership.get(u) for u in users},
                               {u: self.scores[u] for u in users if u in self.scores}, self.thresholds)

    def to_rows(self) -> list[tuple[str, str, str]]:
        rows = []
        for u in sorted(self.membership):
            k = self.membership[u]
            score = self.scores.get(u)
            rows.append((u, "" if score is None else repr(score), "Unknown" if k is None else self.groups[k].name))
        return rows


def assign_groups(results: Sequence[CategorizationResult], spec: GroupSpec | None = None) -> GroupAssignment:
    ok = [r for r in results if r.ok]
    membership: dict[str, int | None] = {r.user: None for r in results}
    if not ok:
        raise NoScores("no user has an available score or label")

    labels = [r for r in ok if isinstance(r.value, str)]
    if labels:
        if len(labels) != len(ok):
            raise InvalidSpec("score source mixes labels and numeric scores")
        names = sorted({r.value for r in labels})
        index = {name: i for i, name in enumerate(names)}
        for r in labels:
            membership[r.user] = index[r.value]
        return GroupAssignment([Group(name, label=name) for name in names], membership)

    if spec is None:
        raise InvalidSpec("numeric scores need a percentile or threshold spec")
    scores = {r.user: float(r.value) for r in ok}
    names = spec.group_names()
    ordered = sorted(ok, key=lambda r: (r.value, r.user))
    n = len(ordered)

    if spec.fractions is not None:
        cum = 0.0
        cuts = []
        for f in spec.fractions[:-1]:
            cum += f
            cuts.append(min(n, math.ceil(cum * n - 1e-9)))
        bounds = [0, *cuts, n]
        for g in range(spec.n_groups):
            for r in ordered[bounds[g]:bounds[g + 1]]:
                membership[r.user] = g
        thresholds = [ordered[c].value if c < n else 1.0 for c in cuts]
    else:
        thresholds = list(spec.thresholds)
        for r in ordered:
            membership[r.user] = sum(1 for t in thresholds if r.value >= t)

    edges = [0.0, *thresholds, 1.0]
    groups = [Group(names[g], edges[g], edges[g + 1]) for g in range(spec.n_groups)]
    return GroupAssignment(groups, membership, scores, [float(t) for t in thresholds])


def save_assignment(assignment: GroupAssignment, path: str) -> None:
    doc = {
        "groups": [{"name": g.name, "lo": g.lo, "hi": g.hi, "label": g.label} for g in assignment.groups],
        "thresholds": assignment.thresholds,
        "membership": assignment.membership,
        "scores": assignment.scores,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_assignment(path: str) -> GroupAssignment:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return GroupAssignment([Group(**g) for g in doc["groups"]], doc["membership"],
                           doc["scores"], doc["thresholds"])


# -- decile binning -----------------------------------------------------------

def decile_of(score: float) -> int:
    """Nearest upper decile, 1..10: 0.05 -> 1 (bin (0, 0.1]), 0.1 -> 1, 0.11 -> 2.

    A score of exactly 0 joins the first bin.
    """
    return min(10, max(1, math.ceil(round(score * 10, 9))))


def decile_bins(users, assignment: GroupAssignment, g, columns, attributes) -> list[dict]:
    """Per-decile means of node attributes over ``users`` that carry a score."""
    buckets: dict[int, list[int]] = {b: [] for b in range(1, 11)}
    for u in users:
        s = assignment.scores.get(u)
        if s is not None and u in g.index:
            buckets[decile_of(s)].append(g.index[u])
    if not any(buckets.values()):
        return []
    out = []
    for b, rows in buckets.items():
        entry = {"bin": round(b / 10, 1), "lo": round((b - 1) / 10, 1), "hi": round(b / 10, 1),
                 "count": len(rows), "empty": not rows}
        for name, col in attributes.items():
            entry[name] = float(columns[col][rows].mean()) if rows else None
        out.append(entry)
    return out
