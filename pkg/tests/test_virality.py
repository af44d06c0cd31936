import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import T0, dataset, labelled, rt, scored
from rtimpact.errors import ConflictingAuthor, EmptyGroup, NoTopics
from rtimpact.grouping import Group, GroupAssignment
from rtimpact.synth import generate, preset
from rtimpact.grouping import CategorizationResult, GroupSpec, assign_groups
from rtimpact.verdicts import Verdict
from rtimpact.virality import extract_cascades, ith_retweeter_curve, jaccard, topic_profiles, virality_analysis


def test_cascade_hand_built():
    ds = dataset(rt("x", "A", T0, "T"), rt("y", "A", T0 + 60, "T"), rt("z", "A", T0 + 3600, "T"))
    (c,) = extract_cascades(ds)
    assert (c.tweet, c.author, c.size, c.distinct_retweeters) == ("T", "A", 3, 3)
    assert c.duration == 3600 and c.retweet_offsets == (0, 60, 3600)
    assert c.start == T0 and c.end == T0 + 3600


def test_single_retweet_cascade():
    (c,) = extract_cascades(dataset(rt("x", "A", T0, "T")))
    assert c.size == 1 and c.duration == 0 and c.retweet_offsets == (0,)


def test_repeat_retweeter():
    (c,) = extract_cascades(dataset(rt("x", "A", T0, "T"), rt("x", "A", T0 + 5, "T")))
    assert c.size == 2 and c.distinct_retweeters == 1 and c.retweeter_offsets == (0,)


def test_conflicting_author():
    with pytest.raises(ConflictingAuthor):
        extract_cascades(dataset(rt("x", "A", T0, "T"), rt("y", "B", T0, "T")))


stream = st.lists(st.tuples(st.sampled_from("abcdef"), st.sampled_from("ABC"), st.integers(0, 10_000),
                            st.integers(0, 5)), min_size=1, max_size=60)


@settings(max_examples=60)
@given(stream)
def test_cascade_invariants(items):
    # tweet ids embed the author so authors never conflict
    ds = dataset(*(rt(s, d, T0 + t, f"{d}{k}") for s, d, t, k in items))
    cascades = extract_cascades(ds)
    assert sum(c.size for c in cascades) == len(ds)
    for c in cascades:
        assert c.size >= 1 and c.end >= c.start and c.retweet_offsets[0] == 0
        assert list(c.retweet_offsets) == sorted(c.retweet_offsets)
    a = scored({u: 0.5 for u in ds.users()})
    curve = virality_analysis(cascades, a).groups[0].curve
    assert curve == sorted(curve)


def test_topics_identical():
    ds = dataset(rt("x", "A", T0, "1", ("electionday",)), rt("y", "B", T0, "2", ("electionday",)))
    res = topic_profiles(ds, labelled({"A": "g1", "B": "g2", "x": "g1", "y": "g2"}))
    assert res.similarity == 1.0 and res.verdict is Verdict.DISCUSS_SIMILARLY


def test_topics_disjoint():
    ds = dataset(rt("x", "A", T0, "1", ("red",)), rt("y", "B", T0, "2", ("blue",)))
    res = topic_profiles(ds, labelled({"A": "g1", "B": "g2", "x": "g1", "y": "g2"}))
    assert res.similarity == 0.0 and res.verdict is Verdict.DISCUSS_DIFFERENTLY


def test_topics_truncate_and_rank():
    ds = dataset(rt("x", "A", T0, "1", ("b", "a")), rt("y", "A", T0, "1", ("b",)))
    res = topic_profiles(ds, scored({"A": 0.1, "x": 0.2, "y": 0.3}), k=8)
    assert res.profiles[0].top_topics == [("b", 2), ("a", 1)]
    assert res.csv_rows() == [["G1", 1, "b", 2], ["G1", 2, "a", 1]]


def test_topics_attributed_to_author():
    ds = dataset(rt("A", "B", T0, "1", ("only",)))
    res = topic_profiles(ds, labelled({"A": "g1", "B": "g2"}))
    assert res.profiles[0].top_topics == [] and res.profiles[1].top_topics == [("only", 1)]


def test_no_topics():
    with pytest.raises(NoTopics):
        topic_profiles(dataset(rt("x", "A")), scored({"x": 0.1, "A": 0.2}))


@settings(max_examples=40)
@given(st.lists(st.tuples(st.sampled_from("xyz"), st.sampled_from("AB"),
                          st.lists(st.sampled_from(["p", "q", "r", "s"]), max_size=3)), min_size=1, max_size=30),
       st.randoms(use_true_random=False))
def test_topic_counts_order_free(rows, rnd):
    items = [rt(s, d, T0 + i, f"{d}{i}", tuple(dict.fromkeys(t))) for i, (s, d, t) in enumerate(rows)]
    shuffled = list(items)
    rnd.shuffle(shuffled)
    a = labelled({"A": "g1", "B": "g2", "x": "g1", "y": "g2", "z": "g2"})
    try:
        r1 = topic_profiles(dataset(*items), a)
    except NoTopics:
        return
    assert r1.as_dict() == topic_profiles(dataset(*shuffled), a).as_dict()


def test_jaccard():
    assert jaccard(set(), set()) == 1.0
    assert jaccard({"a", "b"}, {"b", "c"}) == pytest.approx(1 / 3)


def test_single_group_identical_cascades():
    items = []
    for k in range(4):
        for i, off in enumerate((0, 30, 90)):
            items.append(rt(f"r{i}", "A", T0 + k * 1000 + off, f"T{k}"))
    res = virality_analysis(extract_cascades(dataset(*items)), scored({"A": 0.1, "r0": 0.2, "r1": 0.3, "r2": 0.4}))
    assert res.groups[0].curve == [0.0, 30.0, 90.0]
    assert res.verdict is Verdict.EQUALLY_VIRAL


def test_mean_size_identity():
    items = [rt("x", "A", T0 + i, f"a{i % 3}") for i in range(9)] + [rt("y", "B", T0 + i, f"b{i}") for i in range(4)]
    a = labelled({"A": "g1", "x": "g1", "B": "g2", "y": "g2"})
    res = virality_analysis(extract_cascades(dataset(*items)), a)
    assert [g.mean_size for g in res.groups] == [9 / 3, 4 / 4]
    assert res.grand_mean_size == 13 / 7


def test_planted_fast_vs_slow():
    spec = preset("fast", seed=2, users=1000, interactions=20_000)
    ds, scores, truth = generate(spec)
    a = assign_groups([CategorizationResult(u, s) for u, s in sorted(scores.items())],
                      GroupSpec(fractions=tuple(truth.group_fractions), names=tuple(truth.group_names)))
    res = virality_analysis(extract_cascades(ds), a)
    by = {g.group: g for g in res.groups}
    assert res.verdict is Verdict.UNEVENLY_VIRAL
    assert by["Fast"].influencer is Verdict.INFLUENCER and by["Slow"].influencer is Verdict.NON_INFLUENCER
    assert by["Fast"].mean_duration_s <= 3600 and by["Fast"].mean_size >= 50


def test_thresholds_configurable():
    ds = dataset(*(rt(f"r{i}", "A", T0 + i, "T") for i in range(5)))
    a = scored({u: 0.3 for u in ds.users()})
    assert virality_analysis(extract_cascades(ds), a, min_size=5, max_hours=1).groups[0].influencer is Verdict.INFLUENCER
    assert virality_analysis(extract_cascades(ds), a, min_size=6).groups[0].influencer is Verdict.NON_INFLUENCER


def test_group_without_cascades():
    ds = dataset(rt("x", "A", T0, "T"))
    with pytest.raises(EmptyGroup):
        virality_analysis(extract_cascades(ds), labelled({"A": "g1", "x": "g2"}))
    with pytest.raises(EmptyGroup):
        virality_analysis([], scored({"A": 0.1}))


def test_curve_depth_is_smallest_cascade():
    ds = dataset(rt("x", "A", T0, "T1"), rt("y", "A", T0 + 10, "T1"), rt("x", "A", T0, "T2"))
    assert ith_retweeter_curve(extract_cascades(ds)) == [0.0]
