"""Group cardinalities and the equally / unevenly distributed verdict."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoGroups
from .grouping import GroupAssignment
from .verdicts import Verdict


@dataclass(frozen=True)
class DistributionReport:
    names: list[str]
    cardinalities: list[int]
    fractions: list[float]
    verdict: Verdict
    epsilon_rel: float
    max_deviation: float

    def as_dict(self) -> dict:
        return {
            "groups": [{"group": n, "size": c, "fraction": f}
                       for n, c, f in zip(self.names, self.cardinalities, self.fractions)],
            "max_deviation_from_uniform": self.max_deviation,
            "epsilon_rel": self.epsilon_rel,
            "verdict": self.verdict.value,
        }


def distribution_verdict(sizes: list[int], epsilon_rel: float = 0.10) -> tuple[Verdict, float]:
    """Equally distributed iff every share is within ``epsilon_rel / n`` of ``1 / n``."""
    total = sum(sizes)
    if not sizes or total == 0:
        raise NoGroups("no categorized users")
    n = len(sizes)
    dev = max(abs(s / total - 1 / n) for s in sizes)
    ok = dev <= epsilon_rel / n + 1e-15
    return (Verdict.EQUALLY_DISTRIBUTED if ok else Verdict.UNEVENLY_DISTRIBUTED), dev


def statistical_analysis(assignment: GroupAssignment, epsilon_rel: float = 0.10) -> DistributionReport:
    sizes = assignment.sizes
    verdict, dev = distribution_verdict(sizes, epsilon_rel)
    return DistributionReport(assignment.names, sizes, assignment.fractions, verdict, epsilon_rel, dev)
