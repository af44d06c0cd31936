"""Run configuration read from an INI-style file.

Example::

    [dataset]
    path = dataset.ndjson
    sample_fraction = 0.2
    sample_seed = 7

    [scores]
    source = file            ; file | http | constant
    path = scores.csv

    [groups]
    fractions = 0.7, 0.2, 0.1
    names = Likely Humans, Likely Semi-Bots, Likely Bots

    [analysis]
    epsilon = 0.10

Relative paths are resolved against the config file's directory. Every
key is optional except the dataset path and the score source.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace

from .errors import ConfigError, InvalidSpec
from .grouping import (ConstantScoreSource, FileScoreSource, GroupSpec, HttpScoreSource, DEFAULT_FRACTIONS,
                       ScoreSource)
from .report import PERSPECTIVES


@dataclass
class RunConfig:
    dataset_path: str = ""
    dataset_format: str | None = None
    on_error: str = "skip"
    sample_fraction: float = 1.0
    sample_seed: int = 0
    score_source: str = "file"
    score_path: str = ""
    score_url: str = ""
    score_token_env: str | None = None
    score_cache_dir: str | None = None
    score_retries: int = 3
    score_backoff: float = 0.5
    score_timeout: float = 10.0
    score_parallelism: int = 4
    score_value: float = 0.0
    fractions: tuple[float, ...] | None = DEFAULT_FRACTIONS
    thresholds: tuple[float, ...] | None = None
    names: tuple[str, ...] | None = None
    epsilon: float = 0.10
    epsilon_overrides: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    betweenness: str = "auto"
    removal_order: str = "score_desc"
    removal_seed: int | None = None
    attribution: str = "retweeter"
    damping: float = 0.85
    pagerank: str = "weighted"
    temporal_unit: str = "day"
    include_unknown: bool = False
    topics_k: int = 8
    jaccard_threshold: float = 0.5
    min_size: float = 50.0
    max_hours: float = 24.0
    out_dir: str = "out"
    figures: bool = False

    def epsilon_for(self, perspective: str) -> float:
        return self.epsilon_overrides.get(perspective, self.epsilon)

    def group_spec(self) -> GroupSpec:
        try:
            if self.thresholds is not None:
                return GroupSpec(thresholds=self.thresholds, names=self.names)
            return GroupSpec(fractions=self.fractions, names=self.names)
        except InvalidSpec as exc:
            raise ConfigError(f"[groups] {exc}") from None

    def score_source_obj(self) -> ScoreSource:
        if self.score_source == "file":
            return FileScoreSource(self.score_path)
        if self.score_source == "http":
            return HttpScoreSource(self.score_url, self.score_token_env, self.score_cache_dir, self.score_retries,
                                   self.score_backoff, self.score_timeout, self.score_parallelism)
        if self.score_source == "constant":
            return ConstantScoreSource(self.score_value)
        raise ConfigError(f"unknown score source {self.score_source!r}")

    def with_overrides(self, out_dir: str | None = None, seed: int | None = None,
                       epsilon: float | None = None, figures: bool | None = None) -> "RunConfig":
        cfg = self
        if out_dir is not None:
            cfg = replace(cfg, out_dir=out_dir)
        if seed is not None:
            cfg = replace(cfg, seed=seed, sample_seed=seed, removal_seed=seed)
        if epsilon is not None:
            if epsilon <= 0:
                raise ConfigError("epsilon must be positive")
            cfg = replace(cfg, epsilon=epsilon, epsilon_overrides={})
        if figures:
            cfg = replace(cfg, figures=True)
        return cfg

    def fingerprint_fields(self) -> dict:
        """Settings that determine the dataset and the grouping."""
        return {"dataset": [self.dataset_path, self.dataset_format, self.on_error,
                            self.sample_fraction, self.sample_seed],
                "scores": [self.score_source, self.score_path, self.score_url, self.score_value],
                "groups": [self.fractions, self.thresholds, self.names]}

    def as_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k not in ("out_dir", "score_cache_dir")}
        return {k: list(v) if isinstance(v, tuple) else v for k, v in out.items()}


def _floats(text: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected a comma-separated list of numbers, got {text!r}") from None


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.replace(";", ",").split(",") if x.strip())


def load_config(path: str) -> RunConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = os.path.dirname(os.path.abspath(path))
    return config_from_parser(parser, base)


def config_from_parser(parser: configparser.ConfigParser, base: str = ".") -> RunConfig:
    def get(section, key, conv=str, default=None):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key).strip()
        try:
            if conv is bool:
                return parser.getboolean(section, key)
            return conv(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: cannot read {raw!r}") from None

    def resolve(p):
        return p if not p or os.path.isabs(p) else os.path.normpath(os.path.join(base, p))

    known = {"dataset", "scores", "groups", "analysis", "epsilon", "robustness", "influence",
             "temporal", "virality", "output"}
    extra = set(parser.sections()) - known
    if extra:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(extra))}")

    cfg = RunConfig()
    cfg.dataset_path = resolve(get("dataset", "path", default=""))
    cfg.dataset_format = get("dataset", "format")
    cfg.on_error = get("dataset", "on_error", default="skip")
    cfg.sample_fraction = get("dataset", "sample_fraction", float, 1.0)
    cfg.sample_seed = get("dataset", "sample_seed", int, 0)

    cfg.score_source = get("scores", "source", default="file")
    cfg.score_path = resolve(get("scores", "path", default=""))
    cfg.score_url = get("scores", "base_url", default="")
    cfg.score_token_env = get("scores", "token_env")
    cache = get("scores", "cache_dir")
    cfg.score_cache_dir = resolve(cache) if cache else None
    cfg.score_retries = get("scores", "retries", int, 3)
    cfg.score_backoff = get("scores", "backoff", float, 0.5)
    cfg.score_timeout = get("scores", "timeout", float, 10.0)
    cfg.score_parallelism = get("scores", "parallelism", int, 4)
    cfg.score_value = get("scores", "value", float, 0.0)

    if parser.has_option("groups", "thresholds"):
        cfg.thresholds = _floats(parser.get("groups", "thresholds"), "thresholds")
        cfg.fractions = None
    elif parser.has_option("groups", "fractions"):
        cfg.fractions = _floats(parser.get("groups", "fractions"), "fractions")
    if parser.has_option("groups", "names"):
        cfg.names = _names(parser.get("groups", "names"))

    cfg.epsilon = get("analysis", "epsilon", float, 0.10)
    cfg.seed = get("analysis", "seed", int, 0)
    cfg.betweenness = get("analysis", "betweenness", default="auto")
    if parser.has_section("epsilon"):
        for key, raw in parser.items("epsilon"):
            if key not in PERSPECTIVES:
                raise ConfigError(f"[epsilon] unknown perspective {key!r}")
            try:
                cfg.epsilon_overrides[key] = float(raw)
            except ValueError:
                raise ConfigError(f"[epsilon] {key}: cannot read {raw!r}") from None

    cfg.removal_order = get("robustness", "order", default="score_desc")
    cfg.removal_seed = get("robustness", "seed", int)
    cfg.attribution = get("robustness", "attribution", default="retweeter")
    cfg.damping = get("influence", "damping", float, 0.85)
    cfg.pagerank = get("influence", "pagerank", default="weighted")
    cfg.temporal_unit = get("temporal", "unit", default="day")
    cfg.include_unknown = get("temporal", "include_unknown", bool, False)
    cfg.topics_k = get("virality", "k", int, 8)
    cfg.jaccard_threshold = get("virality", "jaccard_threshold", float, 0.5)
    cfg.min_size = get("virality", "min_size", float, 50.0)
    cfg.max_hours = get("virality", "max_hours", float, 24.0)
    cfg.out_dir = resolve(get("output", "dir", default="out"))
    cfg.figures = get("output", "figures", bool, False)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if not cfg.dataset_path:
        raise ConfigError("[dataset] path is required")
    if cfg.dataset_format not in (None, "ndjson", "csv"):
        raise ConfigError(f"[dataset] format must be ndjson or csv, got {cfg.dataset_format!r}")
    if cfg.on_error not in ("skip", "fail"):
        raise ConfigError("[dataset] on_error must be skip or fail")
    tolerances = [cfg.epsilon, *cfg.epsilon_overrides.values(), cfg.jaccard_threshold, cfg.min_size, cfg.max_hours]
    if any(t <= 0 for t in tolerances):
        raise ConfigError("tolerances and thresholds must be positive")
    if not 0 < cfg.damping < 1:
        raise ConfigError("[influence] damping must be in (0, 1)")
    if cfg.pagerank not in ("weighted", "classic"):
        raise ConfigError("[influence] pagerank must be weighted or classic")
    if cfg.temporal_unit not in ("day", "hour"):
        raise ConfigError("[temporal] unit must be day or hour")
    if cfg.attribution not in ("retweeter", "incident"):
        raise ConfigError("[robustness] attribution must be retweeter or incident")
    if cfg.score_source not in ("file", "http", "constant"):
        raise ConfigError(f"[scores] unknown source {cfg.score_source!r}")
    if cfg.score_source == "http" and not cfg.score_url:
        raise ConfigError("[scores] base_url is required for the http source")
    if cfg.score_source == "file" and not cfg.score_path:
        raise ConfigError("[scores] path is required for the file source")
    cfg.group_spec()
