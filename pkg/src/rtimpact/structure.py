"""k-shell decomposition and how each group populates the shells.

Shells are peeled on the symmetrized simple graph (``u ~ v`` when either
retweeted the other), using unweighted total degree. Isolated users sit in
shell 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import SocialGraph
from .grouping import GroupAssignment
from .verdicts import Verdict


@dataclass
class ShellAssignment:
    users: tuple[str, ...]
    shell: np.ndarray

    @property
    def max_k(self) -> int:
        return int(self.shell.max()) if self.shell.size else 0

    def __getitem__(self, user: str) -> int:
        return int(self.shell[self.users.index(user)])

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.users, self.shell.tolist()))

    def sizes(self) -> np.ndarray:
        return np.bincount(self.shell, minlength=self.max_k + 1)


def kshell_decomposition(g: SocialGraph) -> ShellAssignment:
    indptr, indices = g.undirected_csr
    return ShellAssignment(g.users, _kernels.core_numbers(indptr, indices, g.order))


def shell_verdict(p_gk: float, p_g: float, epsilon_rel: float) -> Verdict:
    if abs(p_gk - p_g) <= epsilon_rel * p_g + 1e-12:
        return Verdict.PROPORTIONATE
    return Verdict.HIGHLY_POPULATED if p_gk > p_g else Verdict.DEPOPULATED


@dataclass
class ShellRow:
    k: int
    size: int
    fractions: list[float]
    verdicts: list[Verdict]


@dataclass
class StructureResult:
    names: list[str]
    user_shares: list[float]
    rows: list[ShellRow]
    skipped: list[int]
    epsilon_rel: float

    @property
    def max_k(self) -> int:
        return self.rows[-1].k if self.rows else 0

    @property
    def core_verdicts(self) -> dict[str, Verdict]:
        """Verdict of each group in the innermost (highest) non-empty shell."""
        if not self.rows:
            return {}
        return dict(zip(self.names, self.rows[-1].verdicts))

    def verdict_counts(self) -> dict[str, dict[str, int]]:
        out = {}
        for i, name in enumerate(self.names):
            counts = {v.value: 0 for v in (Verdict.PROPORTIONATE, Verdict.HIGHLY_POPULATED, Verdict.DEPOPULATED)}
            for row in self.rows:
                counts[row.verdicts[i].value] += 1
            out[name] = counts
        return out

    def csv_header(self) -> list[str]:
        return ["k", "shell_size", *(f"p_{n}" for n in self.names), *(f"verdict_{n}" for n in self.names)]

    def csv_rows(self) -> list[list]:
        return [[r.k, r.size, *r.fractions, *(v.value for v in r.verdicts)] for r in self.rows]

    def as_dict(self) -> dict:
        return {
            "epsilon_rel": self.epsilon_rel,
            "user_shares": dict(zip(self.names, self.user_shares)),
            "max_k": self.max_k,
            "empty_shells_skipped": self.skipped,
            "shells": [{"k": r.k, "size": r.size, "fractions": dict(zip(self.names, r.fractions)),
                        "verdicts": {n: v.value for n, v in zip(self.names, r.verdicts)}} for r in self.rows],
            "core_verdicts": {k: v.value for k, v in self.core_verdicts.items()},
            "verdict_counts": self.verdict_counts(),
        }


def structure_analysis(shells: ShellAssignment, assignment: GroupAssignment,
                       epsilon_rel: float = 0.10) -> StructureResult:
    """Compare each group's share of every shell with its share of all users.

    Expects shells computed on the subgraph of categorized users; users
    without a group are ignored either way.
    """
    n_groups = assignment.n_groups
    p_g = assignment.fractions
    groups = np.array([-1 if (k := assignment.group_of(u)) is None else k for u in shells.users], dtype=np.int64)
    keep = groups >= 0
    width = shells.max_k + 1
    counts = np.zeros((width, n_groups), np.int64)
    np.add.at(counts, (shells.shell[keep], groups[keep]), 1)
    rows, skipped = [], []
    for k in range(width):
        size = int(counts[k].sum())
        if size == 0:
            skipped.append(k)
            continue
        fractions = (counts[k] / size).tolist()
        rows.append(ShellRow(k, size, fractions,
                             [shell_verdict(f, p, epsilon_rel) for f, p in zip(fractions, p_g)]))
    return StructureResult(assignment.names, p_g, rows, skipped, epsilon_rel)
