import numpy as np
import pytest

from flustack.epiweek import EpiWeek
from flustack.vintages import Snapshot, VintagedObservation, VintagedSeries, series_from_rows


def wk(i):
    """Map a small integer index onto a real epiweek."""
    return EpiWeek(2014, 1) + i


@pytest.fixture
def revised_series():
    # week 100->wk(0): first report at wk(1) value 1.0, revision at wk(3) value 1.2
    return series_from_rows("cdc", [(wk(0), wk(1), 1.0), (wk(0), wk(3), 1.2)])


def test_as_of_sees_only_first_report(revised_series):
    snap = revised_series.as_of(wk(2))
    assert snap.values == {wk(0): 1.0}


def test_as_of_revision_supersedes(revised_series):
    assert revised_series.as_of(wk(4)).values == {wk(0): 1.2}


def test_as_of_before_any_report_is_empty(revised_series):
    snap = revised_series.as_of(wk(0))
    assert snap.values == {}
    assert snap.latest_week() is None


def test_final_equals_as_of_max_report(revised_series):
    assert revised_series.final().values == revised_series.as_of(wk(3)).values == {wk(0): 1.2}


def test_first_reported(revised_series):
    report, value = revised_series.first_reported(wk(0))
    assert report == wk(1) and value == 1.0
    assert revised_series.first_reported(wk(5)) is None


def test_latest_week():
    s = series_from_rows("x", [(wk(0), wk(1), 1.0), (wk(1), wk(2), 1.1)])
    snap = s.as_of(wk(9))
    assert snap.latest_week() == wk(1)


def test_report_before_target_rejected():
    with pytest.raises(ValueError):
        VintagedObservation(wk(3), wk(2), 1.0)


def test_duplicate_vintage_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        series_from_rows("cdc", [(wk(0), wk(1), 1.0), (wk(0), wk(1), 2.0)])


def test_negative_and_nonfinite_rejected():
    with pytest.raises(ValueError):
        VintagedObservation(wk(0), wk(1), -0.5)
    with pytest.raises(ValueError):
        VintagedObservation(wk(0), wk(1), float("nan"))


def test_monotone_information():
    s = series_from_rows(
        "cdc",
        [(wk(i), wk(i + 2), 1.0 + i) for i in range(6)]
        + [(wk(i), wk(i + 4), 2.0 + i) for i in range(6)],
    )
    for t1 in range(0, 10):
        snap1 = s.as_of(wk(t1))
        snap2 = s.as_of(wk(t1 + 1))
        assert set(snap1.values) <= set(snap2.values)


def test_as_of_ignores_later_reports():
    base = [(wk(0), wk(1), 1.0), (wk(1), wk(2), 1.5)]
    extra = base + [(wk(1), wk(7), 9.9), (wk(5), wk(8), 3.0)]
    a = series_from_rows("s", base).as_of(wk(4))
    b = series_from_rows("s", extra).as_of(wk(4))
    assert a.values == b.values


def test_vector_observations():
    v = np.array([1.0, 2.0, 0.0])
    s = series_from_rows("gt", [(wk(0), wk(1), v)], unit="raw_volume")
    out = s.as_of(wk(1)).values[wk(0)]
    assert np.array_equal(out, v)
    with pytest.raises(ValueError):
        VintagedObservation(wk(0), wk(1), np.array([1.0, -2.0]))


def test_series_equality_handles_vectors():
    rows = [(wk(0), wk(1), np.array([1.0, 2.0]))]
    assert series_from_rows("gt", rows) == series_from_rows("gt", rows)
    assert series_from_rows("gt", rows) != series_from_rows(
        "gt", [(wk(0), wk(1), np.array([1.0, 3.0]))]
    )


def test_snapshot_contains_and_len():
    snap = Snapshot(wk(2), {wk(0): 1.0, wk(1): 1.1})
    assert wk(0) in snap and wk(5) not in snap
    assert len(snap) == 2
    assert snap.get(wk(5)) is None
