"""Staged removal of groups and proportional-damage verdicts.

Groups are removed one after another from a residual copy of the graph,
each in cumulative portions ``r = 0.2, 0.4, ..., 1.0`` of its members. For
a group holding a share ``p_g`` of the categorized users the proportional
expectation is that removing a portion ``r`` lowers each metric by
``r * p_g`` of its original total. A step whose measured drop exceeds that
expectation by more than ``epsilon_rel`` (relative) is *destabilizing*.

Edges and weight are attributed to the user who performed the retweet
(``attribution="retweeter"``, the default): removing a user withdraws the
retweets it made. With ``attribution="incident"`` every edge touching a
removed user is lost, which double-counts edges between two removed users
and makes even a uniform random graph shed edges at ``1 - (1 - r)**2``.
The residual graph itself (incident removal) is always reported as well,
as percentages of the original totals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import EmptyGroup, InvalidOrder
from .graph import SocialGraph
from .grouping import GroupAssignment
from .verdicts import Verdict

FRACTIONS = (0.2, 0.4, 0.6, 0.8, 1.0)
METRICS = ("edges", "weight", "giant")
CSV_COLUMNS = ("order_mode", "group", "r", "nodes_remaining_pct", "giant_pct", "edges_pct", "weight_pct",
               "attributed_edges_pct", "attributed_weight_pct", "verdict")


def giant_of(g: SocialGraph, alive: np.ndarray) -> int:
    if not alive.any():
        return 0
    e = alive[g.src] & alive[g.dst]
    n = g.order
    adj = sparse.csr_matrix((np.ones(int(e.sum())), (g.src[e], g.dst[e])), shape=(n, n))
    _, labels = connected_components(adj, directed=True, connection="weak")
    return int(np.bincount(labels[alive]).max())


def _measure(g: SocialGraph, alive: np.ndarray, attribution: str) -> dict[str, float]:
    both = alive[g.src] & alive[g.dst]
    kept = alive[g.src] if attribution == "retweeter" else both
    return {
        "edges": int(kept.sum()),
        "weight": int(g.weight[kept].sum()),
        "giant": giant_of(g, alive),
        "residual_edges": int(both.sum()),
        "residual_weight": int(g.weight[both].sum()),
        "nodes": int(alive.sum()),
    }


@dataclass
class RemovalStep:
    group: str
    r: float
    removed: int
    measured: dict[str, float]
    baseline: dict[str, float]
    drop: dict[str, float]
    expected_drop: dict[str, float]
    percent: dict[str, float]
    verdict: Verdict
    infeasible: list[str] = field(default_factory=list)

    def csv_row(self, mode: str) -> list:
        p = self.percent
        return [mode, self.group, self.r, p["nodes"], p["giant"], p["residual_edges"], p["residual_weight"],
                p["edges"], p["weight"], self.verdict.value]

    def as_dict(self) -> dict:
        return {"group": self.group, "r": self.r, "removed": self.removed, "measured": self.measured,
                "baseline": self.baseline, "drop": self.drop, "expected_drop": self.expected_drop,
                "percent_of_original": self.percent, "verdict": self.verdict.value,
                "infeasible_baseline": self.infeasible}


@dataclass
class RobustnessResult:
    order_mode: str
    attribution: str
    epsilon_rel: float
    totals: dict[str, float]
    steps: list[RemovalStep]
    group_verdicts: dict[str, Verdict]

    def csv_rows(self) -> list[list]:
        return [s.csv_row(self.order_mode) for s in self.steps]

    def as_dict(self) -> dict:
        return {"order_mode": self.order_mode, "attribution": self.attribution, "epsilon_rel": self.epsilon_rel,
                "totals": self.totals, "steps": [s.as_dict() for s in self.steps],
                "verdicts": {k: v.value for k, v in self.group_verdicts.items()}}


def _parse_order(order: str, seed: int | None) -> tuple[str, int | None]:
    if order == "score_desc":
        return order, None
    if order == "random":
        return order, 0 if seed is None else seed
    if order.startswith("random:"):
        return "random", int(order.split(":", 1)[1])
    raise InvalidOrder(f"unknown removal order {order!r}; use score_desc or random[:SEED]")


def robustness_analysis(g: SocialGraph, assignment: GroupAssignment, order: str = "score_desc",
                        seed: int | None = None, epsilon_rel: float = 0.10,
                        attribution: str = "retweeter") -> RobustnessResult:
    """Remove groups from the most automated one down, in portions of each.

    ``order`` picks members within a group: ``score_desc`` (highest raw score
    first, ties by user id) or ``random`` (seeded shuffle).
    """
    mode, seed = _parse_order(order, seed)
    if attribution not in ("retweeter", "incident"):
        raise ValueError("attribution must be 'retweeter' or 'incident'")
    if g.order == 0:
        raise EmptyGroup("graph is empty")
    rng = np.random.default_rng(seed) if mode == "random" else None

    alive = np.ones(g.order, bool)
    totals = _measure(g, alive, attribution)
    fractions = assignment.fractions
    steps: list[RemovalStep] = []
    verdicts: dict[str, Verdict] = {}

    for k in reversed(range(assignment.n_groups)):
        name = assignment.names[k]
        members = [u for u in assignment.members(k) if u in g.index]
        if not members:
            raise EmptyGroup(f"group {name!r} has no members in the graph")
        if mode == "score_desc":
            members.sort(key=lambda u: (-assignment.scores.get(u, 0.0), u))
        else:
            members = [members[i] for i in rng.permutation(len(members))]
        codes = np.array([g.index[u] for u in members], dtype=np.int64)
        p_g = fractions[k]
        before = _measure(g, alive, attribution)
        worst = Verdict.NON_DESTABILIZING
        for r in FRACTIONS:
            count = min(len(codes), math.ceil(r * len(codes) - 1e-9))
            alive[codes[:count]] = False
            now = _measure(g, alive, attribution)
            drop, expected, baseline, infeasible = {}, {}, {}, []
            destabilizing = False
            for m in METRICS:
                share = p_g * totals[m]
                drop[m] = before[m] - now[m]
                expected[m] = r * share
                baseline[m] = (1 - r) * share
                if share > before[m] + 1e-9:
                    infeasible.append(m)
                if drop[m] > (1 + epsilon_rel) * expected[m] + 1e-9:
                    destabilizing = True
            percent = {key: (100.0 * now[key] / totals[key] if totals[key] else 0.0)
                       for key in ("edges", "weight", "giant", "residual_edges", "residual_weight", "nodes")}
            verdict = Verdict.DESTABILIZING if destabilizing else Verdict.NON_DESTABILIZING
            if destabilizing:
                worst = Verdict.DESTABILIZING
            steps.append(RemovalStep(name, r, count, now, baseline, drop, expected, percent, verdict, infeasible))
        alive[codes] = False
        verdicts[name] = worst
    ordered = {name: verdicts[name] for name in assignment.names}
    return RobustnessResult(mode if mode == "score_desc" else f"random:{seed}", attribution, epsilon_rel,
                            totals, steps, ordered)
