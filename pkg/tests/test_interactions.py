import json
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import T0, dataset, rt
from rtimpact.errors import EmptyDataset, InvalidFraction, ParseError
from rtimpact.interactions import (Interaction, InteractionDataset, format_timestamp, load_dataset,
                                   normalize_topics, parse_timestamp, sample_dataset, write_dataset)

ROWS = [
    {"retweeter": "a", "retweeted": "b", "tweet": "1", "topics": ["#Vote"], "timestamp": "2019-04-01T10:00:00Z"},
    {"retweeter": "c", "retweeted": "b", "tweet": "1", "topics": [], "timestamp": 1554113000},
    {"retweeter": "b", "retweeted": "a", "tweet": "2", "topics": ["x", "X", "#x"], "timestamp": "2019-04-02T00:00:00"},
]


def write_ndjson(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return str(path)


def test_load_three_valid_rows(tmp_path):
    ds = load_dataset(write_ndjson(tmp_path / "d.ndjson", ROWS))
    assert len(ds) == 3 and ds.dropped_count == 0
    assert [t.retweeter for t in ds] == ["a", "c", "b"]
    assert ds.interactions[0].topics == ("vote",)
    assert ds.interactions[2].topics == ("x",)


def test_missing_timestamp_skip_and_fail(tmp_path):
    bad = dict(ROWS[2])
    del bad["timestamp"]
    path = write_ndjson(tmp_path / "d.ndjson", ROWS[:2] + [bad])
    ds = load_dataset(path, on_error="skip")
    assert len(ds) == 2 and ds.dropped_count == 1
    with pytest.raises(ParseError) as err:
        load_dataset(path, on_error="fail")
    assert err.value.row == 3


def test_garbage_lines_counted(tmp_path):
    path = tmp_path / "d.ndjson"
    path.write_text(json.dumps(ROWS[0]) + "\nnot json\n[1,2]\n", encoding="utf-8")
    ds = load_dataset(str(path))
    assert len(ds) == 1 and ds.dropped_count == 2


def test_empty_and_missing(tmp_path):
    path = tmp_path / "e.ndjson"
    path.write_text("\n", encoding="utf-8")
    with pytest.raises(EmptyDataset):
        load_dataset(str(path))
    with pytest.raises(FileNotFoundError):
        load_dataset(str(tmp_path / "nope.ndjson"))


def test_extra_key_rejected(tmp_path):
    row = dict(ROWS[0], text="hello")
    ds = load_dataset(write_ndjson(tmp_path / "d.ndjson", [row, ROWS[1]]))
    assert len(ds) == 1 and ds.dropped_count == 1


def test_csv_format(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text('retweeter,retweeted,tweet,topics,timestamp\n'
                    'a,b,1,"#One;two",2019-04-01T00:00:00Z\n'
                    'c,b,1,,1554076900\n', encoding="utf-8")
    ds = load_dataset(str(path))
    assert [t.topics for t in ds] == [("one", "two"), ()]
    assert ds.interactions[1].timestamp == 1554076900


def test_window_bounds():
    ds = dataset(rt("a", "b", T0 + 50), rt("b", "c", T0 + 10), rt("c", "a", T0 + 99))
    assert ds.window_start == T0 + 10 and ds.window_end == T0 + 99


def test_timestamps():
    assert parse_timestamp("2019-04-01T00:00:00Z") == T0
    assert parse_timestamp("2019-04-01T02:00:00+02:00") == T0
    assert parse_timestamp(str(T0)) == T0
    assert format_timestamp(T0) == "2019-04-01T00:00:00Z"
    with pytest.raises(ValueError):
        parse_timestamp("")


def test_normalize_topics():
    assert normalize_topics(["#A", "a", " b ", "", "#"]) == ("a", "b")


def test_identifiers_must_be_non_empty():
    with pytest.raises(ValueError):
        Interaction(T0, "t", "", "b")


@pytest.mark.parametrize("fmt", ["ndjson", "csv"])
def test_round_trip(tmp_path, fmt):
    ds = load_dataset(write_ndjson(tmp_path / "d.ndjson", ROWS))
    out = str(tmp_path / f"o.{fmt}")
    write_dataset(ds, out, fmt)
    again = load_dataset(out, fmt)
    assert again.interactions == ds.interactions


ids = st.text(alphabet="abcdefgh123", min_size=1, max_size=4)
interaction = st.builds(
    Interaction,
    timestamp=st.integers(0, 2_000_000_000),
    tweet=ids, retweeter=ids, retweeted=ids,
    topics=st.lists(st.text(alphabet="abcxyz", min_size=1, max_size=5), max_size=3).map(
        lambda xs: normalize_topics(xs)),
)


@given(st.lists(interaction, min_size=1, max_size=30))
def test_round_trip_property(items):
    import tempfile, os
    ds = InteractionDataset.from_interactions(items)
    with tempfile.TemporaryDirectory() as d:
        for fmt in ("ndjson", "csv"):
            path = os.path.join(d, "x." + fmt)
            write_dataset(ds, path, fmt)
            assert load_dataset(path, fmt).interactions == ds.interactions


def stream(n=10):
    return dataset(*(rt(f"u{i % 4}", f"u{(i + 1) % 4}", T0 + i, tweet=f"t{i}") for i in range(n)))


def test_sample_identity():
    ds = stream()
    assert sample_dataset(ds, 1.0, 3) is ds


def test_sample_deterministic():
    ds = stream()
    a = sample_dataset(ds, 0.2, 7)
    b = sample_dataset(ds, 0.2, 7)
    assert len(a) == 2 and a.interactions == b.interactions


@pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
def test_sample_invalid_fraction(fraction):
    with pytest.raises(InvalidFraction):
        sample_dataset(stream(), fraction, 0)


@given(st.lists(interaction, min_size=1, max_size=40), st.floats(0.01, 1.0), st.integers(0, 2**31),
       st.randoms(use_true_random=False))
def test_sample_subset_and_order_independent(items, fraction, seed, shuffler):
    ds = InteractionDataset.from_interactions(items)
    got = sample_dataset(ds, fraction, seed)
    assert len(got) == math.floor(fraction * len(items) + 1e-9)
    assert not Counter(got.interactions) - Counter(items)
    permuted = list(items)
    shuffler.shuffle(permuted)
    other = sample_dataset(InteractionDataset.from_interactions(permuted), fraction, seed)
    assert Counter(other.interactions) == Counter(got.interactions)


def test_sample_binomial_per_user():
    # 10 users x 100 interactions each; each kept count is ~ Bin(100, 0.2)
    items = [rt(f"u{i % 10}", "hub", T0 + i, tweet=f"t{i}") for i in range(1000)]
    got = sample_dataset(dataset(*items), 0.2, 11)
    counts = Counter(t.retweeter for t in got)
    mean, sd = 100 * 0.2, math.sqrt(100 * 0.2 * 0.8)
    assert len(got) == 200
    for u in range(10):
        assert abs(counts[f"u{u}"] - mean) <= 3 * sd
