"""Assemble perspective results into report.json, CSV side tables and a text table."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

from .composition import STAGE_COLUMNS, GlobalComposition, NodeComposition
from .errors import InvalidSpec, NoResults
from .influence import CSV_COLUMNS as INFLUENCE_COLUMNS, SCORES, InfluenceResult
from .robustness import CSV_COLUMNS as ROBUSTNESS_COLUMNS, RobustnessResult
from .stats import DistributionReport
from .structure import StructureResult
from .temporal import TemporalSeries
from .verdicts import Verdict
from .virality import TopicResult, ViralityResult

SCHEMA_VERSION = "1.0"
PERSPECTIVES = ("stats", "network", "robustness", "influence", "structure", "temporal", "virality")
NOT_RUN = "not run"


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


@dataclass
class VerdictRow:
    perspective: str
    aspect: str
    group: str
    verdict: Verdict
    tolerance: dict
    detail: str = ""

    def as_dict(self) -> dict:
        return {"perspective": self.perspective, "aspect": self.aspect, "group": self.group,
                "verdict": self.verdict.value, "tolerance": self.tolerance, "detail": self.detail}


@dataclass
class PerspectiveReport:
    document: dict
    rows: list[VerdictRow] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.document, indent=2, sort_keys=True, allow_nan=False) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    def text_table(self) -> str:
        return text_table(self.rows, self.document["perspectives"])


# -- per-perspective rows and artifacts ---------------------------------------

def _eps(e: float) -> dict:
    return {"epsilon_rel": e}


def stats_rows(r: DistributionReport) -> list[VerdictRow]:
    return [VerdictRow("stats", "distribution", "all", r.verdict, _eps(r.epsilon_rel),
                       ", ".join(f"{n}={c}" for n, c in zip(r.names, r.cardinalities)))]


def network_rows(gc: GlobalComposition | None, nc: NodeComposition | None) -> list[VerdictRow]:
    rows = []
    if gc is not None:
        for st in gc.stages[1:]:
            rows.append(VerdictRow("network", "global", st.included_groups[-1], st.verdict, _eps(gc.epsilon_rel),
                                   f"order {st.properties.order}"))
        rows.append(VerdictRow("network", "global", "all", gc.overall, _eps(gc.epsilon_rel)))
    if nc is not None:
        rows.append(VerdictRow("network", "node", "all", nc.verdict, _eps(nc.epsilon_rel)))
    return rows


def robustness_rows(r: RobustnessResult) -> list[VerdictRow]:
    rows = []
    for name, v in r.group_verdicts.items():
        steps = [s for s in r.steps if s.group == name and s.verdict is Verdict.DESTABILIZING]
        detail = "r=" + ",".join(f"{s.r:g}" for s in steps) if steps else ""
        rows.append(VerdictRow("robustness", r.order_mode, name, v, _eps(r.epsilon_rel), detail))
    return rows


def influence_rows(r: InfluenceResult) -> list[VerdictRow]:
    return [VerdictRow("influence", r.pagerank_variant, "all", r.verdict, _eps(r.epsilon_rel))]


def structure_rows(r: StructureResult) -> list[VerdictRow]:
    return [VerdictRow("structure", f"core k={r.max_k}", n, v, _eps(r.epsilon_rel))
            for n, v in r.core_verdicts.items()]


def temporal_rows(r: TemporalSeries) -> list[VerdictRow]:
    rows = []
    flagged = r.flagged()
    for name in r.names:
        marks = flagged[name]
        if not any(marks.values()):
            rows.append(VerdictRow("temporal", r.unit, name, Verdict.NORMAL, _eps(r.epsilon_rel), "every bucket"))
        for verdict in (Verdict.OVER, Verdict.UNDER):
            if marks[verdict.value]:
                rows.append(VerdictRow("temporal", r.unit, name, verdict, _eps(r.epsilon_rel),
                                       " ".join(marks[verdict.value])))
    return rows


def virality_rows(topics: TopicResult | None, viral: ViralityResult | None) -> list[VerdictRow]:
    rows = []
    if topics is not None:
        rows.append(VerdictRow("virality", "topics", "all", topics.verdict,
                               {"jaccard_threshold": topics.threshold, "k": topics.k},
                               f"mean jaccard {topics.similarity:.3f}"))
    if viral is not None:
        rows.append(VerdictRow("virality", "cascades", "all", viral.verdict, _eps(viral.epsilon_rel)))
        limits = {"min_size": viral.min_size, "max_hours": viral.max_hours}
        for g in viral.groups:
            rows.append(VerdictRow("virality", "influencer", g.group, g.influencer, limits,
                                   f"mean size {g.mean_size:.1f}, mean duration {g.mean_duration_s / 3600:.1f}h"))
    return rows


def write_artifacts(name: str, result, out_dir: str) -> list[str]:
    """Write the CSV side tables of one perspective; returns their file names."""
    def path(f):
        return os.path.join(out_dir, f)

    files = []
    if name == "stats":
        write_csv(path("stats.csv"), ["group", "size", "fraction"],
                  zip(result.names, result.cardinalities, result.fractions))
        files.append("stats.csv")
    elif name == "network":
        gc, nc = result
        if gc is not None:
            write_csv(path("network_global.csv"), ["stage", "groups", *STAGE_COLUMNS, "verdict"],
                      [[i + 1, ";".join(st.included_groups), *(st.row()[c] for c in STAGE_COLUMNS),
                        "Base" if st.verdict is None else st.verdict.value] for i, st in enumerate(gc.stages)])
            files.append("network_global.csv")
        if nc is not None:
            write_csv(path("network_node.csv"), ["group", *STAGE_COLUMNS],
                      [[p.group, *(p.row()[c] for c in STAGE_COLUMNS)] for p in nc.profiles])
            attrs = list(nc.grand_means)
            write_csv(path("network_deciles.csv"), ["group", "bin", "count", *attrs],
                      [[p.group, d["bin"], d["count"], *("" if d[a] is None else d[a] for a in attrs)]
                       for p in nc.profiles for d in p.deciles])
            files += ["network_node.csv", "network_deciles.csv"]
    elif name == "robustness":
        write_csv(path("robustness.csv"), ROBUSTNESS_COLUMNS, result.csv_rows())
        files.append("robustness.csv")
    elif name == "influence":
        write_csv(path("influence_nodes.csv"), INFLUENCE_COLUMNS, result.rows)
        write_csv(path("influence_groups.csv"), ["group", *SCORES],
                  [[n, *(m[s] for s in SCORES)] for n, m in zip(result.names, result.means)])
        files += ["influence_nodes.csv", "influence_groups.csv"]
    elif name == "structure":
        write_csv(path("structure.csv"), result.csv_header(), result.csv_rows())
        files.append("structure.csv")
    elif name == "temporal":
        write_csv(path("temporal.csv"), result.csv_header(), result.csv_rows())
        files.append("temporal.csv")
    elif name == "virality":
        topics, viral = result
        if viral is not None:
            write_csv(path("cascades.csv"), ["tweet", "author", "group", "size", "duration_s"], viral.cascade_rows)
            write_csv(path("cascade_curves.csv"), ["group", "i", "mean_offset_s"], viral.curve_rows())
            files += ["cascades.csv", "cascade_curves.csv"]
        if topics is not None:
            write_csv(path("topics.csv"), ["group", "rank", "topic", "count"], topics.csv_rows())
            files.append("topics.csv")
    return files


def perspective_summary(name: str, result) -> tuple[dict, list[VerdictRow]]:
    if name == "stats":
        return result.as_dict(), stats_rows(result)
    if name == "network":
        gc, nc = result
        doc = {"global": None if gc is None else gc.as_dict(), "node": None if nc is None else nc.as_dict()}
        return doc, network_rows(gc, nc)
    if name == "robustness":
        return result.as_dict(), robustness_rows(result)
    if name == "influence":
        return result.as_dict(), influence_rows(result)
    if name == "structure":
        return result.as_dict(), structure_rows(result)
    if name == "temporal":
        return result.as_dict(), temporal_rows(result)
    if name == "virality":
        topics, viral = result
        doc = {"topics": None if topics is None else topics.as_dict(),
               "cascades": None if viral is None else viral.as_dict()}
        return doc, virality_rows(topics, viral)
    raise InvalidSpec(f"unknown perspective {name!r}")


# -- assembly -----------------------------------------------------------------

def assemble_report(results: dict, context: dict | None = None, artifacts: dict | None = None,
                    errors: dict | None = None) -> PerspectiveReport:
    """Combine perspective results (keyed by perspective name) into one report.

    Perspectives absent from ``results`` are marked "not run"; ``errors``
    maps perspective names to the message of a failed run.
    """
    errors = errors or {}
    artifacts = artifacts or {}
    unknown = sorted((set(results) | set(errors)) - set(PERSPECTIVES))
    if unknown:
        raise InvalidSpec(f"unknown perspective(s): {', '.join(unknown)}")
    if not results and not errors:
        raise NoResults("no perspective ran")
    sections, rows = {}, []
    for name in PERSPECTIVES:
        if name in results:
            doc, prow = perspective_summary(name, results[name])
            sections[name] = {"status": "ok", "result": doc, "artifacts": artifacts.get(name, [])}
            rows += prow
        elif name in errors:
            sections[name] = {"status": "error", "error": errors[name]}
        else:
            sections[name] = {"status": NOT_RUN}
    document = {
        "schema_version": SCHEMA_VERSION,
        "context": context or {},
        "perspectives": sections,
        "verdicts": [r.as_dict() for r in rows],
    }
    return PerspectiveReport(document, rows)


def text_table(rows: list[VerdictRow], sections: dict | None = None) -> str:
    header = ("perspective", "aspect", "group", "verdict", "detail")
    body = [(r.perspective, r.aspect, r.group, r.verdict.value, r.detail) for r in rows]
    for name, sec in (sections or {}).items():
        if sec["status"] != "ok":
            body.append((name, "", "", sec["status"], sec.get("error", "")))
    order = {p: i for i, p in enumerate(PERSPECTIVES)}
    body.sort(key=lambda r: order.get(r[0], len(order)))
    widths = [max(len(h), *(len(str(r[i])) for r in body)) if body else len(h) for i, h in enumerate(header)]
    widths[-1] = len(header[-1])
    line = lambda cells: "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(header), line(["-" * w for w in widths])]
    out += [line(r) for r in body]
    return "\n".join(out) + "\n"
