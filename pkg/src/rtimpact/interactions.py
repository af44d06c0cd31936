"""Retweet interaction records: parsing, serialization and seeded sampling.

Two on-disk layouts are supported, both UTF-8:

* NDJSON, one object per line with exactly the keys ``retweeter``,
  ``retweeted``, ``tweet``, ``topics`` (array of strings) and ``timestamp``.
* CSV with a header naming the same five columns; ``topics`` is a single
  ``;``-separated field.

Timestamps are accepted as ISO-8601 strings or integer epoch seconds and are
stored as integer epoch seconds (UTC).
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyDataset, InvalidFraction, ParseError

log = logging.getLogger(__name__)

FIELDS = ("retweeter", "retweeted", "tweet", "topics", "timestamp")
FORMATS = ("ndjson", "csv")


def normalize_topics(raw: Iterable[str]) -> tuple[str, ...]:
    """Lowercase, strip a leading '#', drop empties and duplicates (order kept)."""
    seen: dict[str, None] = {}
    for item in raw:
        if not isinstance(item, str):
            raise ValueError(f"topic {item!r} is not a string")
        topic = item.strip()
        if topic.startswith("#"):
            topic = topic[1:]
        topic = topic.strip().lower()
        if topic:
            seen.setdefault(topic, None)
    return tuple(seen)


def parse_timestamp(value) -> int:
    if isinstance(value, bool):
        raise ValueError("boolean is not a timestamp")
    if isinstance(value, (int, float)):
        if value != value:
            raise ValueError("NaN timestamp")
        return int(value)
    if not isinstance(value, str) or not value.strip():
        raise ValueError("missing timestamp")
    text = value.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_timestamp(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True, order=True)
class Interaction:
    """One retweet: ``retweeter`` shared ``tweet`` authored by ``retweeted``."""

    timestamp: int
    tweet: str
    retweeter: str
    retweeted: str
    topics: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("retweeter", "retweeted", "tweet"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise ValueError(f"{name} must be a non-empty string")

    @classmethod
    def from_mapping(cls, row: dict) -> "Interaction":
        missing = [k for k in FIELDS if k not in row or row[k] is None]
        if missing:
            raise ValueError(f"missing field(s): {', '.join(missing)}")
        extra = set(row) - set(FIELDS)
        if extra:
            raise ValueError(f"unexpected field(s): {', '.join(sorted(extra))}")
        topics = row["topics"]
        if isinstance(topics, str):
            topics = topics.split(";")
        elif not isinstance(topics, list):
            raise ValueError("topics must be a list")
        return cls(
            timestamp=parse_timestamp(row["timestamp"]),
            tweet=_ident(row["tweet"], "tweet"),
            retweeter=_ident(row["retweeter"], "retweeter"),
            retweeted=_ident(row["retweeted"], "retweeted"),
            topics=normalize_topics(topics),
        )

    def to_json_obj(self) -> dict:
        return {
            "retweeter": self.retweeter,
            "retweeted": self.retweeted,
            "tweet": self.tweet,
            "topics": list(self.topics),
            "timestamp": format_timestamp(self.timestamp),
        }


def _ident(value, name: str) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ValueError(f"{name} must be a string")
    text = str(value).strip()
    if not text:
        raise ValueError(f"{name} is empty")
    return text


@dataclass(frozen=True)
class InteractionDataset:
    interactions: tuple[Interaction, ...]
    window_start: int
    window_end: int
    source_path: str = ""
    dropped_count: int = 0

    def __len__(self) -> int:
        return len(self.interactions)

    def __iter__(self) -> Iterator[Interaction]:
        return iter(self.interactions)

    @classmethod
    def from_interactions(
        cls,
        interactions: Iterable[Interaction],
        source_path: str = "",
        dropped_count: int = 0,
        window: tuple[int, int] | None = None,
    ) -> "InteractionDataset":
        items = tuple(interactions)
        if window is None:
            if items:
                stamps = [t.timestamp for t in items]
                window = (min(stamps), max(stamps))
            else:
                window = (0, 0)
        return cls(items, window[0], window[1], source_path, dropped_count)

    def users(self) -> list[str]:
        """Sorted list of every user appearing as retweeter or retweeted."""
        seen = set()
        for t in self.interactions:
            seen.add(t.retweeter)
            seen.add(t.retweeted)
        return sorted(seen)

    def canonical(self) -> tuple[Interaction, ...]:
        # dataclass ordering is (timestamp, tweet, retweeter, retweeted, topics)
        return tuple(sorted(self.interactions))


def _iter_ndjson(path: str) -> Iterator[tuple[int, dict | None, str]]:
    with open(path, encoding="utf-8") as fh:
        row = 0
        for line in fh:
            if not line.strip():
                continue
            row += 1
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                yield row, None, f"invalid JSON: {exc.msg}"
                continue
            if not isinstance(obj, dict):
                yield row, None, "line is not a JSON object"
                continue
            yield row, obj, ""


def _iter_csv(path: str) -> Iterator[tuple[int, dict | None, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return
        header = [h.strip() for h in header]
        if sorted(header) != sorted(FIELDS):
            raise ParseError(0, f"CSV header must name exactly {', '.join(FIELDS)}")
        row = 0
        for values in reader:
            if not values or (len(values) == 1 and not values[0].strip()):
                continue
            row += 1
            if len(values) != len(header):
                yield row, None, f"expected {len(header)} fields, got {len(values)}"
                continue
            obj = dict(zip(header, values))
            obj["topics"] = obj["topics"].split(";") if obj["topics"] else []
            if obj["timestamp"] == "":
                obj["timestamp"] = None
            yield row, obj, ""


def load_dataset(path: str, format: str | None = None, on_error: str = "skip") -> InteractionDataset:
    """Read an interaction file.

    ``format`` defaults to the file extension (``.csv`` or anything else as
    NDJSON). With ``on_error="skip"`` malformed rows are counted in
    ``dropped_count``; with ``"fail"`` the first one raises :class:`ParseError`.
    """
    if on_error not in ("skip", "fail"):
        raise ValueError("on_error must be 'skip' or 'fail'")
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    if format is None:
        format = "csv" if path.lower().endswith(".csv") else "ndjson"
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}")
    rows = _iter_ndjson(path) if format == "ndjson" else _iter_csv(path)

    kept: list[Interaction] = []
    dropped = 0
    for row, obj, reason in rows:
        if obj is not None:
            try:
                kept.append(Interaction.from_mapping(obj))
                continue
            except ValueError as exc:
                reason = str(exc)
        if on_error == "fail":
            raise ParseError(row, reason)
        dropped += 1
        log.debug("dropping row %d of %s: %s", row, path, reason)
    if not kept:
        raise EmptyDataset(f"no valid interactions in {path}")
    if dropped:
        log.warning("%s: dropped %d malformed row(s)", path, dropped)
    return InteractionDataset.from_interactions(kept, source_path=path, dropped_count=dropped)


def write_dataset(ds: InteractionDataset | Sequence[Interaction], path: str, format: str = "ndjson") -> None:
    items = ds.interactions if isinstance(ds, InteractionDataset) else ds
    if format == "ndjson":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for t in items:
                fh.write(json.dumps(t.to_json_obj(), ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FIELDS)
            for t in items:
                writer.writerow([t.retweeter, t.retweeted, t.tweet, ";".join(t.topics),
                                 format_timestamp(t.timestamp)])
    else:
        raise ValueError(f"unknown format {format!r}")


def sample_dataset(ds: InteractionDataset, fraction: float, seed: int) -> InteractionDataset:
    """Uniform sample of ``floor(fraction * n)`` interactions without replacement.

    Interactions are put in canonical order first, so two files holding the
    same interactions in different row orders sample identically.
    """
    if not (0.0 < fraction <= 1.0):
        raise InvalidFraction(f"fraction must be in (0, 1], got {fraction}")
    if fraction == 1.0:
        return ds
    items = ds.canonical()
    k = int(np.floor(fraction * len(items) + 1e-9))
    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(len(items), size=k, replace=False))
    return InteractionDataset(
        interactions=tuple(items[i] for i in picked),
        window_start=ds.window_start,
        window_end=ds.window_end,
        source_path=ds.source_path,
        dropped_count=ds.dropped_count,
    )
