import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from helpers import coded_graph, graph, labelled, scored
from rtimpact.errors import EmptyGroup, NoConvergence, NoEdges, ZeroVector
from rtimpact.graph import SocialGraph
from rtimpact.grouping import Group, GroupAssignment
from rtimpact.influence import eigenvector_centrality, hits, influence_analysis, influence_scores, pagerank
from rtimpact.verdicts import Verdict


def test_pagerank_two_cycle():
    np.testing.assert_allclose(pagerank(graph([("A", "B", 3), ("B", "A", 3)])), [0.5, 0.5], atol=1e-12)


def test_pagerank_three_cycle():
    g = graph([("a", "b", 1), ("b", "c", 1), ("c", "a", 1)])
    np.testing.assert_allclose(pagerank(g), [1 / 3] * 3, atol=1e-12)


def test_pagerank_star_matches_oracle():
    edges = [(f"L{i}", "H", 1) for i in range(1, 5)]
    g = graph(edges)
    pr = dict(zip(g.users, pagerank(g)))
    idx = {u: i for i, u in enumerate(g.users)}
    ref = oracles.pagerank_oracle(5, [(idx[u], idx[v], w) for u, v, w in edges])
    for u, i in idx.items():
        assert round(pr[u], 6) == round(ref[i], 6)
        assert pr[u] == pytest.approx(ref[i], abs=1e-8)
    assert max(pr, key=pr.get) == "H"


def test_pagerank_weights_matter():
    # A splits its retweets 9:1 between B and C
    g = graph([("A", "B", 9), ("A", "C", 1)])
    pr = dict(zip(g.users, pagerank(g)))
    assert pr["B"] > pr["C"]
    classic = dict(zip(g.users, pagerank(g, weighted=False)))
    assert classic["B"] == pytest.approx(classic["C"])


def test_pagerank_matches_oracle_random():
    rng = np.random.default_rng(8)
    for _ in range(30):
        n = int(rng.integers(2, 30))
        edges = oracles.random_digraph(rng, n, 0.15, max_weight=4)
        g = coded_graph(n, edges)
        np.testing.assert_allclose(pagerank(g), oracles.pagerank_oracle(n, edges), atol=1e-8)
        np.testing.assert_allclose(pagerank(g, weighted=False), oracles.pagerank_oracle(n, edges, weighted=False),
                                   atol=1e-8)


def test_pagerank_no_convergence():
    g = graph([("a", "b", 1), ("b", "c", 1)])
    with pytest.raises(NoConvergence):
        pagerank(g, max_iter=1)


def test_hits_single_edge():
    hub, auth = hits(graph([("A", "B", 1)]))
    np.testing.assert_allclose(hub, [1, 0], atol=1e-12)
    np.testing.assert_allclose(auth, [0, 1], atol=1e-12)


def test_hits_two_cycle_symmetric():
    hub, auth = hits(graph([("A", "B", 2), ("B", "A", 2)]))
    np.testing.assert_allclose(hub, [1 / math.sqrt(2)] * 2, atol=1e-12)
    np.testing.assert_allclose(auth, hub, atol=1e-12)


def test_hits_scale_invariant():
    rng = np.random.default_rng(3)
    edges = oracles.random_digraph(rng, 25, 0.15)
    a = hits(coded_graph(25, edges))
    b = hits(coded_graph(25, [(u, v, 2 * w) for u, v, w in edges]))
    np.testing.assert_allclose(a[0], b[0], atol=1e-9)
    np.testing.assert_allclose(a[1], b[1], atol=1e-9)


def test_hits_unit_weights_match_oracle():
    rng = np.random.default_rng(21)
    for _ in range(10):
        n = int(rng.integers(3, 15))
        edges = oracles.random_digraph(rng, n, 0.3, max_weight=1)
        if not edges:
            continue
        hub, auth = hits(coded_graph(n, edges), max_iter=2000)
        ref_hub, ref_auth = oracles.hits_oracle(n, edges)
        np.testing.assert_allclose(hub, ref_hub, atol=1e-6)
        np.testing.assert_allclose(auth, ref_auth, atol=1e-6)


def test_hits_no_edges():
    with pytest.raises(NoEdges):
        hits(graph([], nodes=["a"]))


def test_eigenvector_triangle():
    g = graph([("a", "b", 1), ("b", "c", 1), ("c", "a", 1)])
    np.testing.assert_allclose(eigenvector_centrality(g), [1 / math.sqrt(3)] * 3, atol=1e-9)


def test_eigenvector_path_ratio():
    x = dict(zip(*(("A", "B", "C"), eigenvector_centrality(graph([("A", "B", 1), ("C", "B", 1)])))))
    assert x["A"] == pytest.approx(x["C"], abs=1e-12)
    assert x["B"] / x["A"] == pytest.approx(math.sqrt(2), abs=1e-8)


def test_eigenvector_isolated_zero():
    x = eigenvector_centrality(graph([("a", "b", 1), ("b", "c", 1)], nodes=["z"]))
    assert x[3] == 0.0 and np.linalg.norm(x) == pytest.approx(1.0)


def test_eigenvector_no_edges():
    with pytest.raises(ZeroVector):
        eigenvector_centrality(graph([], nodes=["a", "b"]))


def test_eigenvector_matches_dense_solver():
    rng = np.random.default_rng(13)
    n = 30
    edges = oracles.random_digraph(rng, n, 0.2)
    g = coded_graph(n, edges)
    a = g.adjacency().toarray()
    vals, vecs = np.linalg.eigh(a + a.T)
    ref = np.abs(vecs[:, np.argmax(vals)])
    np.testing.assert_allclose(eigenvector_centrality(g), ref, atol=1e-6)


graphs = st.integers(2, 25).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, 6)),
                         min_size=1, max_size=60)))


@settings(max_examples=60)
@given(graphs)
def test_conservation_and_determinism(case):
    n, edges = case
    g = coded_graph(n, edges)
    pr = pagerank(g)
    assert abs(pr.sum() - 1) <= 1e-9 and (pr > 0).all()
    assert np.array_equal(pr, pagerank(g))
    if g.size == 0:
        return
    hub, auth = hits(g, max_iter=5000)
    assert abs(np.linalg.norm(hub) - 1) <= 1e-9 and abs(np.linalg.norm(auth) - 1) <= 1e-9
    eig = eigenvector_centrality(g)
    assert abs(np.linalg.norm(eig) - 1) <= 1e-9 and (eig >= 0).all()
    assert np.array_equal(eig, eigenvector_centrality(g))


@settings(max_examples=40)
@given(graphs, st.integers(2, 7))
def test_eigenvector_argmax_scale_invariant(case, factor):
    n, edges = case
    g = coded_graph(n, edges)
    if g.size == 0:
        return
    x = eigenvector_centrality(g)
    y = eigenvector_centrality(coded_graph(n, [(u, v, w * factor) for u, v, w in edges]))
    np.testing.assert_allclose(x, y, atol=1e-7)
    top = np.flatnonzero(x >= x.max() - 1e-9)
    assert int(np.argmax(y)) in top


def test_analysis_single_group():
    rng = np.random.default_rng(0)
    g = coded_graph(20, oracles.random_digraph(rng, 20, 0.2))
    res = influence_analysis(g, scored({u: 0.5 for u in g.users}))
    assert res.verdict is Verdict.INFLUENCE_SIMILARLY
    assert len(res.rows) == 20 and res.rows[0][1] == 0.5


def authority_case():
    edges = [(f"f{i:02d}", "star", 1) for i in range(30)] + [(f"f{i:02d}", f"f{(i + 1) % 30:02d}", 1) for i in range(30)]
    g = graph(edges)
    return g, {u: ("b" if u == "star" else "a") for u in g.users}


def test_planted_authority_differs():
    g, labels = authority_case()
    res = influence_analysis(g, labelled(labels))
    assert res.verdict is Verdict.INFLUENCE_DIFFERENTLY
    star = res.means[res.names.index("b")]
    fans = res.means[res.names.index("a")]
    assert star["auth"] > 5 * fans["auth"] and star["pagerank"] > fans["pagerank"]


def test_group_order_does_not_matter():
    g, labels = authority_case()
    flipped = {u: {"a": "b", "b": "a"}[k] for u, k in labels.items()}
    a = influence_analysis(g, labelled(labels))
    b = influence_analysis(g, labelled(flipped))
    assert a.verdict is b.verdict
    assert a.grand_means == b.grand_means


def test_analysis_empty_group():
    g, _ = authority_case()
    with pytest.raises(EmptyGroup):
        influence_analysis(g, GroupAssignment([Group("x"), Group("y")], {u: 0 for u in g.users}))


def test_scores_without_edges():
    s = influence_scores(graph([], nodes=["a", "b"]))
    assert s["a"] == {"pagerank": 0.5, "hub": 0.0, "auth": 0.0, "eigenvector": 0.0}
