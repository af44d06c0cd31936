"""PageRank, HITS and eigenvector centrality, averaged per group.

PageRank is a plain power iteration. HITS and eigenvector centrality are the
limits of power iterations started from the uniform vector, i.e. the uniform
vector projected onto the top eigenspace; they are computed with a symmetric
eigensolver because plain iteration stalls when two components have nearly
equal leading eigenvalues. Identical inputs give identical floats.

PageRank moves rank along retweets: a user passes its rank to the users it
retweeted, split by edge weight over its out-strength. Users that retweet
nobody spread their rank uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import EmptyGroup, NoConvergence, NoEdges, ZeroVector
from .graph import SocialGraph
from .grouping import GroupAssignment, decile_bins, decile_of
from .verdicts import Verdict, within

SCORES = ("pagerank", "hub", "auth", "eigenvector")
CSV_COLUMNS = ("user", "score_bin", "pagerank", "hub", "auth", "eigenvector")


def pagerank(g: SocialGraph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 200,
             weighted: bool = True) -> np.ndarray:
    """Rank vector indexed like ``g.users``; converged when the L1 change < tol.

    ``weighted=False`` gives classic PageRank (each out-edge counts once).
    """
    n = g.order
    if n == 0:
        raise ZeroVector("graph is empty")
    a = g.adjacency(weighted)
    out = np.asarray(a.sum(axis=1)).ravel()
    dangling = out == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, out))
    # transition transposed: column v spreads v's rank over the users v retweeted
    pt = (sparse.diags(inv) @ a).T.tocsr()
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (pt @ x + x[dangling].sum() / n) + (1.0 - damping) / n
        nxt /= nxt.sum()
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt
    raise NoConvergence("pagerank", max_iter)


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ZeroVector(f"{what} vector vanished")
    return v / norm


DENSE_LIMIT = 500


def _principal(op, n: int, tol: float, max_iter: int, what: str) -> np.ndarray:
    """Uniform start vector projected onto the top eigenspace of a symmetric
    nonnegative operator (a sparse matrix or a LinearOperator)."""
    start = np.full(n, 1.0 / np.sqrt(n))
    if n <= DENSE_LIMIT:
        dense = op.toarray() if sparse.issparse(op) else op.matmat(np.eye(n))
        vals, vecs = np.linalg.eigh((dense + dense.T) / 2)
        top = vecs[:, vals >= vals[-1] - 1e-9 * abs(vals[-1])]
        x = top @ (top.T @ start)
    else:
        try:
            _, vecs = eigsh(op, k=1, which="LA", v0=start, tol=tol * 1e-2, maxiter=max(max_iter, 10 * n))
        except ArpackNoConvergence:
            raise NoConvergence(what, max_iter) from None
        x = vecs[:, 0]
    if x.sum() < 0:
        x = -x
    x[x < 0] = 0.0  # rounding noise around zero entries
    return _unit(x, what)


def hits(g: SocialGraph, tol: float = 1e-10, max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Weighted (hub, authority) vectors, each with unit L2 norm.

    The hub vector is the principal eigenvector of ``A A^T`` reached from a
    uniform start; authorities follow as ``A^T hub``, normalized.
    """
    if g.size == 0:
        raise NoEdges("HITS needs at least one edge")
    n = g.order
    a = g.adjacency(True)
    at = a.T.tocsr()
    op = LinearOperator((n, n), matvec=lambda v: a @ (at @ v), matmat=lambda m: a @ (at @ m), dtype=float)
    hub = _principal(op, n, tol, max_iter, "hub")
    return hub, _unit(at @ hub, "authority")


def eigenvector_centrality(g: SocialGraph, tol: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    """Principal eigenvector of the symmetrized weighted adjacency, unit L2 norm.

    Reached from a uniform start, so users outside the dominant component(s)
    and isolated users get 0.
    """
    if g.size == 0:
        raise ZeroVector("eigenvector centrality needs at least one edge")
    a = g.adjacency(True)
    return _principal((a + a.T).tocsr(), g.order, tol, max_iter, "eigenvector")


@dataclass
class InfluenceScores:
    users: tuple[str, ...]
    pagerank: np.ndarray
    hub: np.ndarray
    auth: np.ndarray
    eigenvector: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def __getitem__(self, user: str) -> dict[str, float]:
        i = self.users.index(user)
        return {k: float(self.column(k)[i]) for k in SCORES}


def influence_scores(g: SocialGraph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 200,
                     weighted_pagerank: bool = True) -> InfluenceScores:
    pr = pagerank(g, damping, tol, max_iter, weighted_pagerank)
    if g.size:
        hub, auth = hits(g, tol, max_iter)
        eig = eigenvector_centrality(g, tol, max(max_iter, 1000))
    else:
        hub = auth = eig = np.zeros(g.order)
    return InfluenceScores(g.users, pr, hub, auth, eig)


@dataclass
class InfluenceResult:
    names: list[str]
    means: list[dict[str, float]]
    grand_means: dict[str, float]
    deviations: dict[str, list[float]]
    deciles: list[list[dict]]
    verdict: Verdict
    epsilon_rel: float
    pagerank_variant: str
    rows: list[list]

    def as_dict(self) -> dict:
        return {"epsilon_rel": self.epsilon_rel, "pagerank": self.pagerank_variant,
                "grand_means": self.grand_means, "relative_deviation": self.deviations,
                "groups": [{"group": n, "means": m, "deciles": d}
                           for n, m, d in zip(self.names, self.means, self.deciles)],
                "verdict": self.verdict.value}


def influence_analysis(g: SocialGraph, assignment: GroupAssignment, epsilon_rel: float = 0.10,
                       damping: float = 0.85, weighted_pagerank: bool = True,
                       scores: InfluenceScores | None = None) -> InfluenceResult:
    """Group means of the four scores; similar iff each is within ``epsilon_rel`` of the grand mean."""
    if scores is None:
        scores = influence_scores(g, damping, weighted_pagerank=weighted_pagerank)
    cols = {k: scores.column(k) for k in SCORES}
    attrs = {k: k for k in SCORES}
    idx = g.index
    means, deciles = [], []
    for k, name in enumerate(assignment.names):
        members = [u for u in assignment.members(k) if u in idx]
        if not members:
            raise EmptyGroup(f"group {name!r} has no members in the graph")
        rows = np.array([idx[u] for u in members], dtype=np.int64)
        means.append({s: float(cols[s][rows].mean()) for s in SCORES})
        deciles.append(decile_bins(members, assignment, g, cols, attrs))
    everyone = np.array([idx[u] for u in assignment.categorized if u in idx], dtype=np.int64)
    grand = {s: float(cols[s][everyone].mean()) for s in SCORES}
    deviations = {s: [(m[s] - grand[s]) / grand[s] if grand[s] else 0.0 for m in means] for s in SCORES}
    ok = all(within(m[s], grand[s], epsilon_rel) for m in means for s in SCORES)

    rows_out = []
    for i, u in enumerate(g.users):
        score = assignment.scores.get(u)
        rows_out.append([u, "" if score is None else decile_of(score) / 10,
                         *(float(cols[s][i]) for s in SCORES)])
    return InfluenceResult(assignment.names, means, grand, deviations, deciles,
                           Verdict.INFLUENCE_SIMILARLY if ok else Verdict.INFLUENCE_DIFFERENTLY,
                           epsilon_rel, "weighted" if weighted_pagerank else "classic", rows_out)
