"""Command-line entry point: ``rtimpact <command> --config run.ini``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 computation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from functools import cached_property

from . import __version__
from .composition import global_composition, node_composition
from .config import RunConfig, load_config
from .errors import ConfigError, NoTopics, RtImpactError
from .graph import build_graph, graph_properties, induced_subgraph
from .grouping import assign_groups, categorize, load_assignment, save_assignment
from .influence import influence_analysis
from .interactions import format_timestamp, load_dataset, sample_dataset
from .report import PERSPECTIVES, assemble_report, perspective_summary, text_table, write_artifacts, write_csv
from .robustness import robustness_analysis
from .stats import statistical_analysis
from .structure import kshell_decomposition, structure_analysis
from .synth import PRESETS, preset, write_scenario
from .temporal import temporal_analysis
from .virality import extract_cascades, topic_profiles, virality_analysis

log = logging.getLogger("rtimpact")


class Pipeline:
    """Lazily loads the dataset, grouping and graph shared by the perspectives."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        os.makedirs(cfg.out_dir, exist_ok=True)
        if not os.access(cfg.out_dir, os.W_OK):
            raise ConfigError(f"output directory is not writable: {cfg.out_dir}")

    def path(self, name: str) -> str:
        return os.path.join(self.cfg.out_dir, name)

    @cached_property
    def raw_dataset(self):
        if not os.path.isfile(self.cfg.dataset_path):
            raise ConfigError(f"dataset not found: {self.cfg.dataset_path}")
        return load_dataset(self.cfg.dataset_path, self.cfg.dataset_format, self.cfg.on_error)

    @cached_property
    def dataset(self):
        return sample_dataset(self.raw_dataset, self.cfg.sample_fraction, self.cfg.sample_seed)

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha1(json.dumps(self.cfg.fingerprint_fields(), sort_keys=True).encode())
        inputs = [self.cfg.dataset_path]
        if self.cfg.score_source == "file":
            inputs.append(self.cfg.score_path)
        for path in inputs:
            if not os.path.isfile(path):
                continue  # the loaders report the missing file
            with open(path, "rb") as fh:
                for chunk in iter(lambda: fh.read(1 << 20), b""):
                    h.update(chunk)
        return h.hexdigest()

    @cached_property
    def assignment(self):
        cache, stamp = self.path("groups.json"), self.path("groups.key")
        if os.path.isfile(cache) and os.path.isfile(stamp):
            with open(stamp, encoding="utf-8") as fh:
                if fh.read().strip() == self.fingerprint:
                    log.info("reusing cached grouping %s", cache)
                    return load_assignment(cache)
        results = categorize(self.dataset.users(), self.cfg.score_source_obj())
        assignment = assign_groups(results, self.cfg.group_spec())
        save_assignment(assignment, cache)
        with open(stamp, "w", encoding="utf-8") as fh:
            fh.write(self.fingerprint + "\n")
        write_csv(self.path("groups.csv"), ["user", "score", "group"], assignment.to_rows())
        return assignment

    @cached_property
    def graph(self):
        return build_graph(self.dataset)

    def context(self) -> dict:
        ds = self.dataset
        doc = {
            "dataset": {
                "path": self.cfg.dataset_path,
                "interactions": len(ds),
                "dropped_rows": ds.dropped_count,
                "window": [format_timestamp(ds.window_start), format_timestamp(ds.window_end)],
                "sample_fraction": self.cfg.sample_fraction,
                "sample_seed": self.cfg.sample_seed,
            },
            "config": self.cfg.as_dict(),
        }
        if "assignment" in self.__dict__:
            a = self.assignment
            doc["groups"] = {"names": a.names, "sizes": a.sizes, "fractions": a.fractions,
                             "thresholds": a.thresholds, "unknown": len(a.unknown)}
        if "graph" in self.__dict__:
            doc["graph"] = {**graph_properties(self.graph).as_dict(), "self_loop_drops": self.graph.self_loop_drops}
        return doc

    # -- perspectives ---------------------------------------------------------

    def run(self, name: str):
        cfg = self.cfg
        eps = cfg.epsilon_for(name)
        if name == "stats":
            return statistical_analysis(self.assignment, eps)
        if name == "network":
            return (global_composition(self.graph, self.assignment, eps, cfg.betweenness, cfg.seed),
                    node_composition(self.graph, self.assignment, eps, cfg.betweenness))
        if name == "robustness":
            seed = cfg.seed if cfg.removal_seed is None else cfg.removal_seed
            return robustness_analysis(self.graph, self.assignment, cfg.removal_order, seed, eps, cfg.attribution)
        if name == "influence":
            return influence_analysis(self.graph, self.assignment, eps, cfg.damping, cfg.pagerank == "weighted")
        if name == "structure":
            keep = [u for u in self.assignment.categorized if u in self.graph.index]
            shells = kshell_decomposition(induced_subgraph(self.graph, keep))
            return structure_analysis(shells, self.assignment, eps)
        if name == "temporal":
            return temporal_analysis(self.dataset, self.assignment, cfg.temporal_unit, eps, cfg.include_unknown)
        if name == "virality":
            try:
                topics = topic_profiles(self.dataset, self.assignment, cfg.topics_k, cfg.jaccard_threshold)
            except NoTopics as exc:
                log.warning("topics skipped: %s", exc)
                topics = None
            viral = virality_analysis(extract_cascades(self.dataset), self.assignment, eps,
                                      cfg.min_size, cfg.max_hours)
            return topics, viral
        raise ConfigError(f"unknown perspective {name!r}")

    def emit(self, name: str, result) -> list[str]:
        files = write_artifacts(name, result, self.cfg.out_dir)
        doc, _ = perspective_summary(name, result)
        with open(self.path(f"{name}.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        files.insert(0, f"{name}.json")
        if self.cfg.figures:
            from . import plotting
            files += plotting.render(name, result, self.cfg.out_dir)
        return files


# -- commands -------------------------------------------------------------------

def cmd_ingest(p: Pipeline) -> int:
    g = p.graph
    g.export_edgelist(p.path("graph.edgelist"))
    doc = p.context()
    with open(p.path("ingest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump({k: doc[k] for k in ("dataset", "graph")}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    props = graph_properties(g)
    print(f"{len(p.dataset)} interactions ({p.dataset.dropped_count} dropped), "
          f"{props.order} users, {props.size} edges, giant component {props.giant_component_size}")
    return 0


def cmd_groups(p: Pipeline) -> int:
    a = p.assignment
    for name, size, frac in zip(a.names, a.sizes, a.fractions):
        print(f"{name}: {size} users ({100 * frac:.1f}%)")
    print(f"Unknown: {len(a.unknown)} users")
    if a.thresholds:
        print("thresholds: " + ", ".join(f"{t:g}" for t in a.thresholds))
    return 0


def run_perspectives(p: Pipeline, names: list[str], full_report: bool) -> int:
    results, artifacts, errors = {}, {}, {}
    status = 0
    for name in names:
        log.info("running %s", name)
        try:
            result = p.run(name)
            artifacts[name] = p.emit(name, result)
            results[name] = result
        except RtImpactError as exc:
            print(f"rtimpact: {name}: {exc}", file=sys.stderr)
            errors[name] = f"{type(exc).__name__}: {exc}"
            status = status or exc.exit_code
            if not full_report:
                return status
    report = assemble_report(results, p.context(), artifacts, errors)
    if full_report:
        report.write(p.path("report.json"))
    sys.stdout.write(report.text_table() if full_report else _only(report, names))
    return status


def _only(report, names) -> str:
    return text_table([r for r in report.rows if r.perspective in names])


def cmd_synth(args) -> int:
    out = args.out or f"synth-{args.scenario}"
    seed = args.seed if args.seed is not None else 0
    spec = preset(args.scenario, seed=seed, users=args.users, interactions=args.interactions, days=args.days)
    paths = write_scenario(spec, out)
    for key in ("dataset.ndjson", "scores.csv", "ground_truth.json", "config.ini"):
        print(paths[key])
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration (INI file)")
    common.add_argument("--out", help="output directory (overrides [output] dir)")
    common.add_argument("--perspective", help="comma-separated perspectives for 'all'")
    common.add_argument("--seed", type=int, help="override every seed in the config")
    common.add_argument("--epsilon", type=float, help="override the relative tolerance of every perspective")
    common.add_argument("--figures", action="store_true", help="also render PNG figures next to the CSVs")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="rtimpact", description="Measure how user groups shape a retweet network.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="load the dataset and export the graph")
    sub.add_parser("groups", parents=[common], help="score users and split them into groups")
    for name in PERSPECTIVES:
        sub.add_parser(name, parents=[common], help=f"run the {name} perspective")
    sub.add_parser("all", parents=[common], help="run every perspective and write report.json")
    s = sub.add_parser("synth", parents=[common], help="write a synthetic scenario")
    s.add_argument("--scenario", choices=PRESETS, default="null")
    s.add_argument("--users", type=int, default=5000)
    s.add_argument("--interactions", type=int, default=100_000)
    s.add_argument("--days", type=int, default=7)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if not args.config:
            raise ConfigError("--config is required")
        cfg = load_config(args.config).with_overrides(args.out, args.seed, args.epsilon, args.figures)
        p = Pipeline(cfg)
        if args.command == "ingest":
            return cmd_ingest(p)
        if args.command == "groups":
            return cmd_groups(p)
        if args.command == "all":
            names = list(PERSPECTIVES)
            if args.perspective:
                names = [n.strip() for n in args.perspective.split(",") if n.strip()]
                bad = [n for n in names if n not in PERSPECTIVES]
                if bad:
                    raise ConfigError(f"unknown perspective(s): {', '.join(bad)}")
            return run_perspectives(p, names, full_report=True)
        return run_perspectives(p, [args.command], full_report=False)
    except RtImpactError as exc:
        print(f"rtimpact: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
