import datetime as dt

import pytest
from hypothesis import given, strategies as st

from flustack.epiweek import EpiWeek, from_date, from_label, iter_weeks, weeks_in_year, year_start


def test_parse_basic():
    assert from_label("2014-W01") == EpiWeek(2014, 1)
    assert from_label("2014-W53") == EpiWeek(2014, 53)


def test_2014_has_53_weeks():
    # the week 2014-12-28..2015-01-03 has only 3 January days, so it
    # belongs to 2014 as week 53
    assert weeks_in_year(2014) == 53
    assert EpiWeek(2014, 53).start_date() == dt.date(2014, 12, 28)


def test_2013_has_52_weeks():
    # 2013-12-29..2014-01-04 has 4 January days and is 2014 week 1
    assert weeks_in_year(2013) == 52
    with pytest.raises(ValueError):
        from_label("2013-W53")
    assert EpiWeek(2014, 1).start_date() == dt.date(2013, 12, 29)


@pytest.mark.parametrize(
    "label",
    ["2014W01", "14-W01", "2014-w01", "2014-W1", "2014-W00", "2014-W54", "garbage"],
)
def test_parse_rejects(label):
    with pytest.raises(ValueError):
        from_label(label)


def test_label_round_trip():
    for label in ("2004-W02", "2013-W27", "2014-W53", "2015-W01"):
        assert str(from_label(label)) == label


def test_add_examples():
    assert EpiWeek(2014, 10) + 0 == EpiWeek(2014, 10)
    assert EpiWeek(2014, 53) + 1 == EpiWeek(2015, 1)
    assert EpiWeek(2015, 1) - 1 == EpiWeek(2014, 53)


def test_add_out_of_range():
    with pytest.raises(ValueError):
        EpiWeek(2100, 50) + 60


def test_total_order():
    assert EpiWeek(2013, 52) < EpiWeek(2014, 1) < EpiWeek(2014, 2)


def test_week_difference():
    assert EpiWeek(2015, 1) - EpiWeek(2014, 53) == 1
    assert EpiWeek(2014, 1) - EpiWeek(2015, 1) == -53


def test_from_date_paper_calendar():
    # July 06, 2013 (a Saturday) sits in MMWR week 2013-W27
    assert from_date(dt.date(2013, 7, 6)) == EpiWeek(2013, 27)
    assert from_date(dt.date(2013, 6, 30)) == EpiWeek(2013, 27)


@given(st.integers(min_value=2001, max_value=2099), st.integers(min_value=-260, max_value=260))
def test_add_then_subtract_is_identity(year, k):
    w = EpiWeek(year, 1)
    assert (w + k) - k == w
    assert (w + k) - w == k


@given(st.integers(min_value=2000, max_value=2099))
def test_weeks_in_year_bounds_and_continuity(year):
    n = weeks_in_year(year)
    assert n in (52, 53)
    last = EpiWeek(year, n)
    first_next = EpiWeek(year + 1, 1)
    # consecutive MMWR weeks map to consecutive Sundays
    assert (first_next.start_date() - last.start_date()).days == 7


def test_iter_weeks_inclusive():
    ws = list(iter_weeks(EpiWeek(2014, 51), EpiWeek(2015, 2)))
    assert [str(w) for w in ws] == ["2014-W51", "2014-W52", "2014-W53", "2015-W01", "2015-W02"]


def test_year_start_is_sunday():
    for year in range(2000, 2101):
        assert year_start(year).weekday() == 6  # Python: Monday=0 .. Sunday=6
