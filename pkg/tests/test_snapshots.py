import json
import random
from datetime import date

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hottopics.snapshots import (
    BadOrder,
    DuplicateDate,
    Snapshot,
    SnapshotStore,
    UnknownTopic,
    UnwritableStore,
    classify_trend,
    parse_period,
    period_delta,
    ratio2_series,
    series_csv,
    series_json,
)
from oracle import oracle_ratio2, random_corpus

D1, D2, D3, D4 = date(2015, 10, 19), date(2015, 10, 26), date(2015, 11, 2), date(2015, 11, 9)


def snap(day, **usage):
    return Snapshot(day, usage)


# store -------------------------------------------------------------------


def test_add_to_empty_store(tmp_path):
    store = SnapshotStore(tmp_path / "s")
    assert store.dates() == []
    store.add(snap(D1, A=3))
    assert store.dates() == [D1] and len(store) == 1


def test_duplicate_date(tmp_path):
    store = SnapshotStore(tmp_path)
    store.add(snap(D1, A=3))
    with pytest.raises(DuplicateDate):
        store.add(snap(D1, A=4))
    assert store.load(D1).usage == {"A": 3}


def test_dates_sorted(tmp_path):
    store = SnapshotStore(tmp_path)
    store.add(snap(D2, A=5))
    store.add(snap(D1, A=3))
    assert store.dates() == [D1, D2]
    assert [s.date for s in store.snapshots()] == [D1, D2]


def test_file_format(tmp_path):
    store = SnapshotStore(tmp_path)
    path = store.add(Snapshot(D1, {"WOS:2": 7, "WOS:1": 0}))
    assert path.read_text(encoding="utf-8") == "#date: 2015-10-19\nWOS:1\t0\nWOS:2\t7\n"
    loaded = store.load(D1)
    assert loaded.usage == {"WOS:1": 0, "WOS:2": 7} and loaded.source_file == path


def test_unwritable_store(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(UnwritableStore):
        SnapshotStore(blocker).add(snap(D1, A=1))


def test_negative_usage_rejected():
    with pytest.raises(ValueError):
        snap(D1, A=-1)


def test_corpus_round_trip(tmp_path, fixture_records):
    store = SnapshotStore(tmp_path)
    assert store.read_corpus() == []
    store.write_corpus(fixture_records)
    assert store.read_corpus() == fixture_records


# deltas ------------------------------------------------------------------


def test_delta_simple():
    d = period_delta(snap(D1, A=10), snap(D2, A=13))
    assert dict(d.per_article) == {"A": 3} and d.valid


def test_delta_negative():
    d = period_delta(snap(D1, A=10), snap(D2, A=7))
    assert not d.valid and d.invalid_reason == "negative delta"


def test_delta_new_article():
    d = period_delta(snap(D1, A=10), snap(D2, A=10, B=4))
    assert dict(d.per_article) == {"A": 0, "B": 4} and d.valid


def test_delta_order():
    with pytest.raises(BadOrder):
        period_delta(snap(D2, A=1), snap(D1, A=1))
    with pytest.raises(BadOrder):
        period_delta(snap(D1, A=1), snap(D1, A=1))


def test_parse_period():
    assert parse_period("2016-01-18..2016-01-25") == (date(2016, 1, 18), date(2016, 1, 25))
    for bad in ("2016-01-25..2016-01-18", "2016-01-18", "x..y"):
        with pytest.raises(ValueError):
            parse_period(bad)


# series ------------------------------------------------------------------

TOPICS = {"A": {"fmri"}, "B": {"eeg"}, "C": {"fmri", "eeg"}, "D": set(), "E": set()}
HAND = [
    snap(D1, A=10, B=5, C=0, D=2),
    snap(D2, A=14, B=9, C=3, D=2),
    snap(D3, A=15, B=9, C=8, D=4, E=6),
]


def test_hand_fixture_series():
    # period 1 deltas A4 B4 C3 D0 (total 11); period 2 A1 B0 C5 D2 E6 (total 14)
    fmri = ratio2_series(HAND, TOPICS, "fmri")
    eeg = ratio2_series(HAND, TOPICS, "eeg")
    assert fmri.values == [7 / 11, 6 / 14]
    assert eeg.values == [7 / 11, 5 / 14]
    assert [(p.topic_usage, p.period_usage) for p in fmri.points] == [(7, 11), (6, 14)]
    assert [(p.start, p.end) for p in eeg.points] == [(D1, D2), (D2, D3)]


def test_only_used_article_gives_one():
    snaps = [snap(D1, A=1, B=4), snap(D2, A=3, B=4), snap(D3, A=9, B=4)]
    series = ratio2_series(snaps, {"A": {"fmri"}, "B": {"eeg"}}, "fmri")
    assert series.values == [1.0, 1.0]


def test_excluding_middle_period():
    snaps = [snap(D1, A=1), snap(D2, A=2), snap(D3, A=3), snap(D4, A=5)]
    series = ratio2_series(snaps, {"A": {"x"}}, "x", excluded_periods=[(D2, D3)])
    assert [(p.start, p.end) for p in series.points] == [(D1, D2), (D3, D4)]


def test_exclusion_range_covers_several_periods():
    snaps = [snap(D1, A=1), snap(D2, A=2), snap(D3, A=3), snap(D4, A=5)]
    series = ratio2_series(snaps, {"A": {"x"}}, "x", excluded_periods=[(D1, D3)])
    assert [(p.start, p.end) for p in series.points] == [(D3, D4)]


def test_negative_period_dropped_unless_overridden():
    snaps = [snap(D1, A=5, B=1), snap(D2, A=3, B=2), snap(D3, A=6, B=2)]
    assert len(ratio2_series(snaps, {"A": {"x"}}, "x").points) == 1
    kept = ratio2_series(snaps, {"A": {"x"}}, "x", include_invalid=True)
    assert kept.points[0].flags == ("negative delta",)


def test_zero_denominator_flagged():
    snaps = [snap(D1, A=5), snap(D2, A=5), snap(D3, A=6)]
    series = ratio2_series(snaps, {"A": {"x"}}, "x")
    assert series.values == [0.0, 1.0]
    assert series.points[0].flags == ("zero-denominator",)


def test_unknown_topic():
    with pytest.warns(UnknownTopic):
        series = ratio2_series(HAND, TOPICS, "bci")
    assert series.points == [] and series.classification == "inactive"


def test_needs_two_snapshots():
    with pytest.raises(ValueError):
        ratio2_series(HAND[:1], TOPICS, "fmri")


def test_store_as_input(tmp_path):
    store = SnapshotStore(tmp_path)
    for s in HAND:
        store.add(s)
    assert ratio2_series(store, TOPICS, "fmri").values == [7 / 11, 6 / 14]


def test_series_csv():
    series = ratio2_series(HAND, TOPICS, "fmri")
    text = series_csv([series])
    assert text.splitlines() == [
        "topic,period_start,period_end,ratio2,flags",
        f"fmri,2015-10-19,2015-10-26,{7 / 11!r},",
        f"fmri,2015-10-26,2015-11-02,{6 / 14!r},",
    ]
    labelled = series_csv([series], with_classification=True).splitlines()
    assert labelled[0].endswith(",classification")
    assert labelled[1].endswith(f",{series.classification}")
    payload = json.loads(series_json([series]))
    assert payload[0]["points"][0]["ratio2"] == 7 / 11


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_random_series_match_oracle(seed):
    rng = random.Random(seed)
    records, sets, snapshots = random_corpus(rng)
    topics = {r.accession_id: s for r, s in zip(records, sets)}
    dates = [s.date for s in snapshots]
    excluded = []
    if len(dates) > 2 and rng.random() < 0.5:
        i = rng.randrange(len(dates) - 1)
        excluded = [(dates[i], dates[i + 1])]
    for topic in set().union(*sets):
        got = ratio2_series(snapshots, topics, topic, excluded)
        want = oracle_ratio2(snapshots, records, sets, topic, excluded)
        assert [(p.start, p.end) for p in got.points] == [(a, b) for a, b, _ in want]
        for p, (_, _, r) in zip(got.points, want):
            assert abs(p.ratio2 - r) <= 1e-12
            assert 0.0 <= p.ratio2 <= 1.0


# classification ----------------------------------------------------------


@pytest.mark.parametrize(
    "values, label",
    [
        ([0.05, 0.05, 0.05], "stable"),
        ([0.0, 0.0, 0.0, 0.04, 0.05], "emerging"),
        ([0.05, 0.04, 0.001, 0.0], "declining"),
        ([0.0005, 0.0, 0.0009], "inactive"),
        ([0.05, 0.2, 0.01, 0.3, 0.05, 0.2], "volatile"),
        ([0.08, 0.07, 0.09, 0.08, 0.075, 0.085, 0.08], "stable"),
        ([0.04], "stable"),
    ],
)
def test_classify(values, label):
    assert classify_trend(values) == label


def test_classify_empty():
    with pytest.raises(ValueError):
        classify_trend([])


@given(
    st.lists(st.floats(0.002, 0.2), min_size=1, max_size=12),
    st.floats(1.0, 4.0),
)
def test_classification_scale_consistent(values, factor):
    # scaling up keeps every point above epsilon, so only ratio tests decide
    scaled = [v * factor for v in values]
    assume(all(v <= 1.0 for v in scaled))
    assert classify_trend(values) == classify_trend(scaled)
