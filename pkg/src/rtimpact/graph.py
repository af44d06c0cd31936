"""Weighted directed retweet graph.

An edge ``(u, v, w)`` means user ``u`` retweeted user ``v`` exactly ``w``
times. Under this orientation ``deg_out(u)`` counts the distinct users ``u``
retweeted and ``deg_in(u)`` the distinct users who retweeted ``u``; the
social reading of those two numbers (activity vs. popularity) depends on
which way one draws the arrows, so nothing downstream relies on the labels.

Nodes are stored as a sorted tuple of user ids and edges as parallel numpy
arrays sorted by (source, target), which keeps million-node graphs cheap.
Distances used by farness and betweenness are unweighted hop counts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .errors import EmptyDataset, InvalidPivotCount, UnknownUser
from .interactions import InteractionDataset

log = logging.getLogger(__name__)

EXACT_BETWEENNESS_LIMIT = 10_000
DEFAULT_PIVOTS = 256


class SocialGraph:
    def __init__(self, users: Iterable[str], src, dst, weight, self_loop_drops: int = 0):
        self.users: tuple[str, ...] = tuple(users)
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.weight = np.asarray(weight, dtype=np.int64)
        self.self_loop_drops = int(self_loop_drops)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_codes(cls, users: Iterable[str], src, dst, counts=None) -> "SocialGraph":
        """Aggregate (possibly repeated) directed pairs given as node codes.

        ``users`` must be sorted; ``counts`` defaults to one per pair.
        Self-pairs are dropped and tallied.
        """
        users = tuple(users)
        n = len(users)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        counts = np.ones(src.shape[0], np.int64) if counts is None else np.asarray(counts, np.int64)
        loops = src == dst
        drops = int(counts[loops].sum())
        if drops:
            keep = ~loops
            src, dst, counts = src[keep], dst[keep], counts[keep]
        key = src * max(n, 1) + dst
        uniq, inverse = np.unique(key, return_inverse=True)
        weight = np.bincount(inverse, weights=counts, minlength=uniq.shape[0]).astype(np.int64)
        return cls(users, uniq // max(n, 1), uniq % max(n, 1), weight, drops)

    @classmethod
    def from_edges(cls, edges: Mapping[tuple[str, str], int] | Iterable[tuple[str, str, int]],
                   nodes: Iterable[str] = ()) -> "SocialGraph":
        items = list(edges.items()) if isinstance(edges, Mapping) else [((u, v), w) for u, v, w in edges]
        users = sorted(set(nodes) | {u for (u, _), _ in items} | {v for (_, v), _ in items})
        index = {u: i for i, u in enumerate(users)}
        src = [index[u] for (u, _), _ in items]
        dst = [index[v] for (_, v), _ in items]
        return cls.from_codes(users, src, dst, [w for _, w in items])

    # -- basic queries ----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.users)

    @property
    def size(self) -> int:
        return int(self.src.shape[0])

    @property
    def total_weight(self) -> int:
        return int(self.weight.sum())

    @cached_property
    def index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.users)}

    def edges(self) -> dict[tuple[str, str], int]:
        u = self.users
        return {(u[s], u[d]): int(w) for s, d, w in zip(self.src, self.dst, self.weight)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return (self.users == other.users
                and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.weight, other.weight))

    def __repr__(self) -> str:
        return f"SocialGraph(order={self.order}, size={self.size}, weight={self.total_weight})"

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.order + 1, np.int64)
        np.cumsum(np.bincount(self.src, minlength=self.order), out=indptr[1:])
        return indptr, self.dst

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        perm = np.lexsort((self.src, self.dst))
        indptr = np.zeros(self.order + 1, np.int64)
        np.cumsum(np.bincount(self.dst, minlength=self.order), out=indptr[1:])
        return indptr, self.src[perm]

    @cached_property
    def undirected_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetrized simple adjacency: u~v iff u->v or v->u."""
        n = self.order
        a = np.concatenate([self.src, self.dst])
        b = np.concatenate([self.dst, self.src])
        key = np.unique(a * max(n, 1) + b)
        a, b = key // max(n, 1), key % max(n, 1)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(np.bincount(a, minlength=n), out=indptr[1:])
        return indptr, b

    def adjacency(self, weighted: bool = True) -> sparse.csr_matrix:
        """Sparse matrix with A[u, v] = w(u, v) (or 1 when unweighted)."""
        data = self.weight.astype(float) if weighted else np.ones(self.size)
        return sparse.csr_matrix((data, (self.src, self.dst)), shape=(self.order, self.order))

    def degrees(self) -> dict[str, np.ndarray]:
        n = self.order
        w = self.weight
        return {
            "deg_in": np.bincount(self.dst, minlength=n).astype(np.int64),
            "deg_out": np.bincount(self.src, minlength=n).astype(np.int64),
            "str_in": np.bincount(self.dst, weights=w, minlength=n).astype(np.int64),
            "str_out": np.bincount(self.src, weights=w, minlength=n).astype(np.int64),
        }

    def weak_component_labels(self) -> np.ndarray:
        if self.order == 0:
            return np.zeros(0, np.int64)
        _, labels = connected_components(self.adjacency(weighted=False), directed=True, connection="weak")
        return labels

    def giant_component_size(self) -> int:
        if self.order == 0:
            return 0
        return int(np.bincount(self.weak_component_labels()).max())

    def export_edgelist(self, path: str) -> None:
        """Write ``u v w`` lines, one per edge."""
        u = self.users
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for s, d, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
                fh.write(f"{u[s]} {u[d]} {w}\n")

    @classmethod
    def read_edgelist(cls, path: str, nodes: Iterable[str] = ()) -> "SocialGraph":
        edges = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    u, v, w = line.split()
                    edges.append((u, v, int(w)))
        return cls.from_edges(edges, nodes)


def build_graph(ds: InteractionDataset) -> SocialGraph:
    """Social graph of a dataset; self-retweets are dropped and counted."""
    if len(ds) == 0:
        raise EmptyDataset("cannot build a graph from an empty dataset")
    users = ds.users()
    index = {u: i for i, u in enumerate(users)}
    src = np.fromiter((index[t.retweeter] for t in ds.interactions), np.int64, len(ds))
    dst = np.fromiter((index[t.retweeted] for t in ds.interactions), np.int64, len(ds))
    return SocialGraph.from_codes(users, src, dst)


def induced_subgraph(g: SocialGraph, keep: Iterable[str]) -> SocialGraph:
    keep = set(keep)
    unknown = keep.difference(g.index)
    if unknown:
        raise UnknownUser(f"{len(unknown)} user(s) not in graph, e.g. {sorted(unknown)[0]!r}")
    mask = np.zeros(g.order, bool)
    mask[[g.index[u] for u in keep]] = True
    return subgraph_by_mask(g, mask)


def subgraph_by_mask(g: SocialGraph, mask: np.ndarray) -> SocialGraph:
    mask = np.asarray(mask, bool)
    new_code = np.cumsum(mask) - 1
    users = tuple(u for u, m in zip(g.users, mask) if m)
    e = mask[g.src] & mask[g.dst]
    # relabelling is monotone so (src, dst) order is preserved
    return SocialGraph(users, new_code[g.src[e]], new_code[g.dst[e]], g.weight[e])


# -- graph properties -------------------------------------------------------

@dataclass(frozen=True)
class GraphProperties:
    order: int
    size: int
    density: float
    total_weight: int
    giant_component_size: int

    def as_dict(self) -> dict:
        return {"order": self.order, "size": self.size, "density": self.density,
                "total_weight": self.total_weight, "giant_component_size": self.giant_component_size}


def density(order: int, size: int) -> float:
    return size / (order * (order - 1)) if order >= 2 else 0.0


def graph_properties(g: SocialGraph) -> GraphProperties:
    return GraphProperties(g.order, g.size, density(g.order, g.size), g.total_weight,
                           g.giant_component_size())


# -- node attributes --------------------------------------------------------

@dataclass(frozen=True)
class BetweennessMode:
    """``exact``, ``sampled`` (k pivots, seeded) or ``auto``.

    ``auto`` is exact up to 10,000 nodes and 256 sampled pivots above.
    """

    kind: str = "auto"
    k: int = DEFAULT_PIVOTS
    seed: int = 0

    @classmethod
    def parse(cls, text: str | "BetweennessMode" | None, seed: int = 0) -> "BetweennessMode":
        if isinstance(text, BetweennessMode):
            return text
        if text is None:
            return cls(seed=seed)
        parts = str(text).strip().lower().split(":")
        if parts[0] in ("exact", "auto") and len(parts) == 1:
            return cls(parts[0], DEFAULT_PIVOTS, seed)
        if parts[0] == "sampled" and len(parts) in (2, 3):
            return cls("sampled", int(parts[1]), int(parts[2]) if len(parts) == 3 else seed)
        raise ValueError(f"bad betweenness mode {text!r}; use exact, auto or sampled:K[:SEED]")

    def resolve(self, n: int) -> "BetweennessMode":
        if self.kind == "auto":
            if n <= EXACT_BETWEENNESS_LIMIT:
                return BetweennessMode("exact", n, self.seed)
            return BetweennessMode("sampled", min(n, DEFAULT_PIVOTS), self.seed)
        return self

    def __str__(self) -> str:
        return self.kind if self.kind != "sampled" else f"sampled:{self.k}:{self.seed}"


@dataclass(frozen=True)
class NodeAttributes:
    deg_in: int
    deg_out: int
    str_in: int
    str_out: int
    farness: float
    reachable: float
    closeness: float
    betweenness: float
    betweenness_norm: float

    @property
    def degree(self) -> int:
        return self.deg_in + self.deg_out

    @property
    def strength(self) -> int:
        return self.str_in + self.str_out


ATTRIBUTE_COLUMNS = ("deg_in", "deg_out", "str_in", "str_out", "farness", "reachable",
                     "closeness", "betweenness", "betweenness_norm")


@dataclass
class NodeAttributeTable:
    """Column-oriented node attributes; index it with a user id for one row.

    ``closeness`` is the Wasserman-Faust normalized closeness
    ``(r / (n-1)) * (r / farness)`` with ``r`` the number of reachable
    nodes, so it stays in [0, 1] on disconnected graphs. ``betweenness_norm``
    divides by ``(n-1)(n-2)``. In sampled mode farness and reachable counts
    of non-pivot nodes are pivot estimates (``estimated`` is True).
    """

    users: tuple[str, ...]
    columns: dict[str, np.ndarray]
    mode: BetweennessMode
    estimated: bool = False

    def __getitem__(self, user: str) -> NodeAttributes:
        i = self._index[user]
        c = self.columns
        return NodeAttributes(
            int(c["deg_in"][i]), int(c["deg_out"][i]), int(c["str_in"][i]), int(c["str_out"][i]),
            float(c["farness"][i]), float(c["reachable"][i]), float(c["closeness"][i]),
            float(c["betweenness"][i]), float(c["betweenness_norm"][i]))

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self):
        return iter(self.users)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.users)}

    def as_dict(self) -> dict[str, NodeAttributes]:
        return {u: self[u] for u in self.users}


def betweenness(g: SocialGraph, mode: BetweennessMode | str = "exact") -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Raw betweenness plus (pivots, farness, reachable) of the BFS sources."""
    mode = BetweennessMode.parse(mode).resolve(g.order)
    n = g.order
    if mode.kind == "exact":
        pivots = np.arange(n, dtype=np.int64)
    else:
        if not 1 <= mode.k <= n:
            raise InvalidPivotCount(f"pivot count must be in [1, {n}], got {mode.k}")
        rng = np.random.default_rng(mode.seed)
        pivots = np.sort(rng.choice(n, size=mode.k, replace=False)).astype(np.int64)
    indptr, indices = g.out_csr
    bc, far, reach = _kernels.brandes(indptr, indices, n, pivots)
    if mode.kind == "sampled":
        bc = bc * (n / mode.k)
    return bc, pivots, far, reach


def node_attributes(g: SocialGraph, betweenness_mode: BetweennessMode | str = "auto") -> NodeAttributeTable:
    mode = BetweennessMode.parse(betweenness_mode).resolve(g.order)
    n = g.order
    cols: dict[str, np.ndarray] = {k: v.astype(float) for k, v in g.degrees().items()}
    bc, pivots, far, reach = betweenness(g, mode)
    farness = np.zeros(n)
    reachable = np.zeros(n)
    estimated = mode.kind == "sampled" and mode.k < n
    if estimated:
        rindptr, rindices = g.in_csr
        sums, counts = _kernels.distance_sums_to(rindptr, rindices, n, pivots)
        # non-pivot estimates; pivots are overwritten with exact values below
        farness = sums * ((n - 1) / mode.k)
        reachable = counts * ((n - 1) / mode.k)
    farness[pivots] = far
    reachable[pivots] = reach
    with np.errstate(divide="ignore", invalid="ignore"):
        closeness = np.where(farness > 0, (reachable / max(n - 1, 1)) * (reachable / farness), 0.0)
    norm = (n - 1) * (n - 2)
    cols.update(
        farness=farness,
        reachable=reachable,
        closeness=closeness,
        betweenness=bc,
        betweenness_norm=bc / norm if norm > 0 else np.zeros(n),
    )
    return NodeAttributeTable(g.users, cols, mode, estimated)
