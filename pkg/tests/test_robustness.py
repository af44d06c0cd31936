import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from helpers import T0, coded_graph, dataset, graph, labelled, rt, scored
from rtimpact.errors import EmptyGroup, InvalidOrder
from rtimpact.graph import build_graph
from rtimpact.grouping import Group, GroupAssignment
from rtimpact.robustness import FRACTIONS, giant_of, robustness_analysis
from rtimpact.synth import generate, preset
from rtimpact.grouping import CategorizationResult, GroupSpec, assign_groups
from rtimpact.verdicts import Verdict


def cycle(n=10):
    users = [f"c{i}" for i in range(n)]
    g = graph([(users[i], users[(i + 1) % n], 1) for i in range(n)])
    # scores fall along the cycle, so removals eat one contiguous arc
    a = scored({u: 1 - i / n for i, u in enumerate(users)}, (1.0,))
    return g, a


def test_cycle_arc_shrinks():
    g, a = cycle()
    res = robustness_analysis(g, a)
    assert [s.removed for s in res.steps] == [2, 4, 6, 8, 10]
    assert [s.measured["giant"] for s in res.steps] == [8, 6, 4, 2, 0]
    # edges whose retweeter survives: one per surviving node
    assert [s.measured["edges"] for s in res.steps] == [8, 6, 4, 2, 0]
    assert [s.measured["residual_edges"] for s in res.steps] == [7, 5, 3, 1, 0]
    last = res.steps[-1]
    assert all(last.measured[m] == 0 for m in ("edges", "weight", "giant", "residual_weight"))
    # a uniform cycle loses exactly its proportional share
    assert res.group_verdicts == {"G1": Verdict.NON_DESTABILIZING}


def test_baselines_linear_in_r():
    g, a = cycle()
    res = robustness_analysis(g, a)
    for s in res.steps:
        for m in ("edges", "weight", "giant"):
            assert s.baseline[m] == pytest.approx((1 - s.r) * res.totals[m])
            assert s.expected_drop[m] == pytest.approx(s.r * res.totals[m])


def test_destabilizing_hub_group():
    # ten bots carry most of the retweets
    edges = [(f"bot{b}", f"h{i:02d}", 5) for b in range(10) for i in range(90) if (i + b) % 9 == 0]
    edges += [(f"h{i:02d}", f"h{(i + 1) % 90:02d}", 1) for i in range(90)]
    g = graph(edges)
    a = labelled({u: ("b-bot" if u.startswith("bot") else "a-human") for u in g.users})
    res = robustness_analysis(g, a)
    assert res.group_verdicts["b-bot"] is Verdict.DESTABILIZING
    assert res.steps[0].group == "b-bot"  # most automated first


def heavy_case():
    spec = preset("heavy", seed=1, users=1000, interactions=20_000)
    ds, scores, truth = generate(spec)
    results = [CategorizationResult(u, s) for u, s in sorted(scores.items())]
    a = assign_groups(results, GroupSpec(fractions=tuple(truth.group_fractions), names=tuple(truth.group_names)))
    return build_graph(ds), a, truth


def test_planted_heavy_weight_drop():
    g, a, truth = heavy_case()
    res = robustness_analysis(g, a)
    bots = [s for s in res.steps if s.group == "Likely Bots"]
    assert bots[-1].verdict is Verdict.DESTABILIZING
    drop_pct = 100 * bots[-1].drop["weight"] / res.totals["weight"]
    assert drop_pct == pytest.approx(truth.planted["weight_share"]["Likely Bots"] * 100, abs=2)
    assert drop_pct == pytest.approx(40, abs=2)


def test_residual_weight_matches_dataset_recount():
    rng = np.random.default_rng(7)
    items = [rt(f"u{int(rng.integers(0, 30))}", f"u{int(rng.integers(0, 30))}", T0 + i, tweet=f"t{i}")
             for i in range(400)]
    ds = dataset(*items)
    g = build_graph(ds)
    a = scored({u: float(rng.random()) for u in g.users}, (0.6, 0.4))
    res = robustness_analysis(g, a)
    removed = set()
    order = {}
    for k in reversed(range(2)):
        order[k] = sorted(a.members(k), key=lambda u: (-a.scores[u], u))
    steps = iter(res.steps)
    for k in reversed(range(2)):
        for r in FRACTIONS:
            s = next(steps)
            cur = removed | set(order[k][: s.removed])
            kept = [t for t in ds if t.retweeter != t.retweeted and t.retweeter not in cur and t.retweeted not in cur]
            assert s.measured["residual_weight"] == len(kept)
            attributed = [t for t in ds if t.retweeter != t.retweeted and t.retweeter not in cur]
            assert s.measured["weight"] == len(attributed)
        removed |= set(order[k])
    # every categorized user is gone at the end
    assert res.steps[-1].measured["nodes"] == 0


def test_unknown_users_survive():
    g, a = cycle()
    a = a.restricted_to(g.users[:8])  # c8, c9 have no score
    res = robustness_analysis(g, a)
    assert res.steps[-1].measured["nodes"] == 2 and res.steps[-1].measured["giant"] == 2


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_monotone_and_deterministic(seed):
    rng = np.random.default_rng(seed)
    g = coded_graph(40, oracles.random_digraph(rng, 40, 0.08))
    a = scored({u: float(x) for u, x in zip(g.users, rng.random(40))}, (0.7, 0.2, 0.1))
    res = robustness_analysis(g, a)
    assert res.as_dict() == robustness_analysis(g, a).as_dict()
    for k in a.names:
        steps = [s for s in res.steps if s.group == k]
        for m in ("edges", "weight", "giant", "residual_weight"):
            vals = [s.measured[m] for s in steps]
            assert vals == sorted(vals, reverse=True)
    assert res.steps[-1].measured["nodes"] == 0
    r1 = robustness_analysis(g, a, "random", seed=3)
    r2 = robustness_analysis(g, a, "random:3")
    assert r1.as_dict() == r2.as_dict() and r1.order_mode == "random:3"


def test_incident_attribution():
    g, a = cycle()
    res = robustness_analysis(g, a, attribution="incident")
    assert [s.measured["edges"] for s in res.steps] == [7, 5, 3, 1, 0]
    assert res.attribution == "incident"


def test_infeasible_baseline_flagged():
    # group x: three isolated users, a third of everyone; y: a six-node path.
    # After y is gone x is owed 1/3 of the original giant (2 nodes) but has 1.
    path = [(f"y{i}", f"y{i + 1}", 1) for i in range(5)]
    g = graph(path, nodes=["x0", "x1", "x2"])
    a = labelled({u: u[0] for u in g.users})
    res = robustness_analysis(g, a)
    second = [s for s in res.steps if s.group == "x"]
    assert "giant" in second[0].infeasible and "edges" in second[0].infeasible
    assert all(not s.infeasible for s in res.steps if s.group == "y")


def test_errors():
    g, a = cycle()
    with pytest.raises(InvalidOrder):
        robustness_analysis(g, a, "by_degree")
    empty = GroupAssignment([Group("x"), Group("y")], {u: 0 for u in g.users})
    with pytest.raises(EmptyGroup):
        robustness_analysis(g, empty)


def test_giant_of_mask():
    g = graph([("a", "b", 1), ("b", "c", 1), ("d", "e", 1)])
    alive = np.ones(5, bool)
    assert giant_of(g, alive) == 3
    alive[1] = False
    assert giant_of(g, alive) == 2
    assert giant_of(g, np.zeros(5, bool)) == 0


def test_csv_rows_shape():
    g, a = cycle()
    rows = robustness_analysis(g, a).csv_rows()
    assert len(rows) == 5 and rows[0][:3] == ["score_desc", "G1", 0.2]
    assert rows[0][3] == 80.0 and rows[-1][-1] == "Non-destabilizing"
