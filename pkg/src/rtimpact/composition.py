"""Network composition: incremental (global) and per-group (node) views.

Global view: stage ``k`` is the subgraph induced on the members of groups
``1..k`` (groups ordered by increasing automation), so an edge between two
groups shows up at the first stage holding both endpoints and the last stage
is the whole categorized graph. Adding a group is *proportional* when the new
stage, thinned back to the previous stage's order, looks like the previous
stage: a seeded uniform sample of ``order_{k-1}`` nodes is drawn from stage
``k`` and its density and averaged attributes are compared with stage
``k-1``. If the added group is wired like the groups already present the two
graphs are draws from the same induced-sampling process, whatever the size
dependence of each metric; a group that brings heavier, denser or more
central members shifts the thinned stage away. The group is an *ecosystem
maintainer* when every metric stays within ``epsilon_rel``.

Node view: attributes are computed once on the full graph and averaged per
group; groups *behave similarly* when every group mean is within
``epsilon_rel`` of the grand mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGroup, EmptyStage
from .graph import (BetweennessMode, GraphProperties, NodeAttributeTable, SocialGraph, density,
                    graph_properties, node_attributes, subgraph_by_mask)
from .grouping import GroupAssignment, decile_bins
from .verdicts import Verdict, within

STAGE_COLUMNS = ("order", "size", "density", "avg_deg_in", "avg_deg_out", "avg_str_in", "avg_str_out",
                 "avg_closeness_norm", "avg_betweenness_norm")

# attribute -> column of the node attribute table
PROFILE_ATTRIBUTES = {
    "deg_in": "deg_in",
    "deg_out": "deg_out",
    "str_in": "str_in",
    "str_out": "str_out",
    "farness": "farness",
    "closeness_norm": "closeness",
    "betweenness_norm": "betweenness_norm",
}


def _averages(attrs: NodeAttributeTable, rows: np.ndarray | None = None) -> dict[str, float]:
    c = attrs.columns
    pick = (lambda a: a) if rows is None else (lambda a: a[rows])
    if (rows is not None and rows.size == 0) or len(attrs) == 0:
        return {k: 0.0 for k in ("avg_deg_in", "avg_deg_out", "avg_str_in", "avg_str_out",
                                 "avg_farness", "avg_closeness_norm", "avg_betweenness", "avg_betweenness_norm")}
    return {
        "avg_deg_in": float(pick(c["deg_in"]).mean()),
        "avg_deg_out": float(pick(c["deg_out"]).mean()),
        "avg_str_in": float(pick(c["str_in"]).mean()),
        "avg_str_out": float(pick(c["str_out"]).mean()),
        "avg_farness": float(pick(c["farness"]).mean()),
        "avg_closeness_norm": float(pick(c["closeness"]).mean()),
        "avg_betweenness": float(pick(c["betweenness"]).mean()),
        "avg_betweenness_norm": float(pick(c["betweenness_norm"]).mean()),
    }


def _group_mask(g: SocialGraph, assignment: GroupAssignment, groups) -> np.ndarray:
    mask = np.zeros(g.order, bool)
    wanted = set(groups)
    for i, u in enumerate(g.users):
        if assignment.group_of(u) in wanted:
            mask[i] = True
    return mask


@dataclass
class CompositionStage:
    included_groups: list[str]
    properties: GraphProperties
    averages: dict[str, float]
    verdict: Verdict | None = None
    checks: dict[str, dict[str, float]] = field(default_factory=dict)

    def row(self) -> dict:
        p = self.properties
        return {"order": p.order, "size": p.size, "density": p.density, **self.averages}

    def as_dict(self) -> dict:
        return {
            "groups": self.included_groups,
            **self.row(),
            "total_weight": self.properties.total_weight,
            "giant_component_size": self.properties.giant_component_size,
            "verdict": None if self.verdict is None else self.verdict.value,
            "checks": self.checks,
        }


@dataclass
class GlobalComposition:
    stages: list[CompositionStage]
    epsilon_rel: float
    betweenness_mode: str
    seed: int = 0

    @property
    def verdicts(self) -> dict[str, str]:
        """Per added group; the first group is the base network."""
        out = {}
        for i, st in enumerate(self.stages):
            out[st.included_groups[-1]] = "Base" if i == 0 else st.verdict.value
        return out

    @property
    def overall(self) -> Verdict:
        if all(st.verdict in (None, Verdict.MAINTAINER) for st in self.stages):
            return Verdict.MAINTAINER
        return Verdict.CHANGER

    def as_dict(self) -> dict:
        return {"epsilon_rel": self.epsilon_rel, "betweenness_mode": self.betweenness_mode,
                "thinning_seed": self.seed, "stages": [s.as_dict() for s in self.stages], "verdicts": self.verdicts,
                "verdict": self.overall.value}


CHECKED = ("density", "avg_deg_in", "avg_deg_out", "avg_str_in", "avg_str_out",
           "avg_closeness_norm", "avg_betweenness_norm")


def _stage_checks(prev: CompositionStage, thinned: dict[str, float], eps: float) -> tuple[Verdict, dict]:
    reference = {"density": prev.properties.density, **prev.averages}
    checks = {}
    ok = True
    for name in CHECKED:
        value, expected = thinned[name], reference[name]
        passed = within(value, expected, eps)
        ok &= passed
        checks[name] = {"value": value, "expected": expected,
                        "rel_diff": (value - expected) / expected if expected else 0.0,
                        "within": passed}
    return (Verdict.MAINTAINER if ok else Verdict.CHANGER), checks


def thinned_stage(sub: SocialGraph, order: int, betweenness_mode, seed: int) -> dict[str, float]:
    """Density and averages of a seeded uniform ``order``-node sample of ``sub``."""
    keep = np.zeros(sub.order, bool)
    keep[np.random.default_rng(seed).choice(sub.order, size=order, replace=False)] = True
    thin = subgraph_by_mask(sub, keep)
    return {"density": density(thin.order, thin.size), **_averages(node_attributes(thin, betweenness_mode))}


def global_composition(g: SocialGraph, assignment: GroupAssignment, epsilon_rel: float = 0.10,
                       betweenness_mode: BetweennessMode | str = "auto", seed: int = 0) -> GlobalComposition:
    stages: list[CompositionStage] = []
    sizes = [0] * assignment.n_groups
    for u in g.users:
        k = assignment.group_of(u)
        if k is not None:
            sizes[k] += 1
    for k in range(assignment.n_groups):
        if sizes[k] == 0:
            raise EmptyStage(f"group {assignment.names[k]!r} has no members in the graph")
        sub = subgraph_by_mask(g, _group_mask(g, assignment, range(k + 1)))
        attrs = node_attributes(sub, betweenness_mode)
        stage = CompositionStage(assignment.names[: k + 1], graph_properties(sub), _averages(attrs))
        if stages:
            thinned = thinned_stage(sub, stages[-1].properties.order, betweenness_mode, seed + k)
            stage.verdict, stage.checks = _stage_checks(stages[-1], thinned, epsilon_rel)
        stages.append(stage)
    mode = str(BetweennessMode.parse(betweenness_mode))
    return GlobalComposition(stages, epsilon_rel, mode, seed)


@dataclass
class GroupProfile:
    group: str
    members: int
    subgraph: GraphProperties
    means: dict[str, float]
    medians: dict[str, float]
    deciles: list[dict]

    def row(self) -> dict:
        p = self.subgraph
        return {"order": self.members, "size": p.size, "density": p.density,
                **{f"avg_{k}": v for k, v in self.means.items()}}

    def as_dict(self) -> dict:
        return {"group": self.group, "members": self.members, "subgraph": self.subgraph.as_dict(),
                "means": self.means, "medians": self.medians, "deciles": self.deciles}


@dataclass
class NodeComposition:
    profiles: list[GroupProfile]
    grand_means: dict[str, float]
    verdict: Verdict
    epsilon_rel: float
    betweenness_mode: str
    deviations: dict[str, list[float]]

    def as_dict(self) -> dict:
        return {"epsilon_rel": self.epsilon_rel, "betweenness_mode": self.betweenness_mode,
                "grand_means": self.grand_means, "relative_deviation": self.deviations,
                "groups": [p.as_dict() for p in self.profiles], "verdict": self.verdict.value}


def _rows_of(g: SocialGraph, users) -> np.ndarray:
    return np.array(sorted(g.index[u] for u in users if u in g.index), dtype=np.int64)


def profile_means(columns: dict[str, np.ndarray], rows: np.ndarray, attributes: dict[str, str]) -> dict[str, float]:
    return {name: float(columns[col][rows].mean()) if rows.size else 0.0 for name, col in attributes.items()}


def similarity_verdict(means: list[dict[str, float]], grand: dict[str, float], eps: float) -> tuple[bool, dict]:
    deviations = {}
    ok = True
    for name, ref in grand.items():
        devs = [(m[name] - ref) / ref if ref else 0.0 for m in means]
        deviations[name] = devs
        ok &= all(within(m[name], ref, eps) for m in means)
    return ok, deviations


def node_composition(g: SocialGraph, assignment: GroupAssignment, epsilon_rel: float = 0.10,
                     betweenness_mode: BetweennessMode | str = "auto",
                     attrs: NodeAttributeTable | None = None) -> NodeComposition:
    if attrs is None:
        attrs = node_attributes(g, betweenness_mode)
    cols = attrs.columns
    profiles = []
    all_rows = _rows_of(g, assignment.categorized)
    for k, name in enumerate(assignment.names):
        members = [u for u in assignment.members(k) if u in g.index]
        if not members:
            raise EmptyGroup(f"group {name!r} has no members in the graph")
        rows = _rows_of(g, members)
        sub = subgraph_by_mask(g, np.isin(np.arange(g.order), rows))
        means = profile_means(cols, rows, PROFILE_ATTRIBUTES)
        medians = {a: float(np.median(cols[c][rows])) for a, c in PROFILE_ATTRIBUTES.items()}
        profiles.append(GroupProfile(name, len(members), graph_properties(sub), means, medians,
                                     decile_bins(members, assignment, g, cols, PROFILE_ATTRIBUTES)))
    grand = profile_means(cols, all_rows, PROFILE_ATTRIBUTES)
    ok, devs = similarity_verdict([p.means for p in profiles], grand, epsilon_rel)
    verdict = Verdict.BEHAVE_SIMILARLY if ok else Verdict.BEHAVE_DIFFERENTLY
    return NodeComposition(profiles, grand, verdict, epsilon_rel, str(attrs.mode), devs)
