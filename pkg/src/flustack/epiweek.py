"""MMWR surveillance-week calendar: parsing, validation and arithmetic.

MMWR weeks run Sunday through Saturday.  Week 1 of a year is the first
week containing at least four days of January, which is equivalent to the
Sunday-based week containing January 4.  Years therefore have 52 or 53
weeks.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

MIN_YEAR = 2000
MAX_YEAR = 2100

_LABEL_RE = re.compile(r"^(\d{4})-W(\d{2})$")


@lru_cache(maxsize=None)
def year_start(year: int) -> dt.date:
    """Sunday on which MMWR week 1 of ``year`` begins."""
    jan4 = dt.date(year, 1, 4)
    return jan4 - dt.timedelta(days=(jan4.weekday() + 1) % 7)


def weeks_in_year(year: int) -> int:
    """Number of MMWR weeks in ``year`` (52 or 53)."""
    return (year_start(year + 1) - year_start(year)).days // 7


@dataclass(frozen=True, order=True)
class EpiWeek:
    """One MMWR surveillance week, totally ordered as (year, week)."""

    year: int
    week: int

    def __post_init__(self):
        if not MIN_YEAR <= self.year <= MAX_YEAR:
            raise ValueError(
                f"year {self.year} outside supported range {MIN_YEAR}..{MAX_YEAR}"
            )
        n = weeks_in_year(self.year)
        if not 1 <= self.week <= n:
            raise ValueError(
                f"week {self.week} out of range for {self.year} ({n} weeks)"
            )

    def start_date(self) -> dt.date:
        """Sunday on which this week begins."""
        return year_start(self.year) + dt.timedelta(weeks=self.week - 1)

    def __add__(self, k: int) -> "EpiWeek":
        if not isinstance(k, int):
            return NotImplemented
        return from_date(self.start_date() + dt.timedelta(weeks=k))

    def __sub__(self, other):
        """``week - int`` shifts backwards; ``week - week`` counts weeks between."""
        if isinstance(other, EpiWeek):
            return (self.start_date() - other.start_date()).days // 7
        if isinstance(other, int):
            return self.__add__(-other)
        return NotImplemented

    def __str__(self) -> str:
        return f"{self.year:04d}-W{self.week:02d}"


def from_label(label: str) -> EpiWeek:
    """Parse a ``YYYY-Www`` label; formatting the result round-trips exactly."""
    m = _LABEL_RE.match(label)
    if not m:
        raise ValueError(f"malformed epiweek label {label!r} (expected YYYY-Www)")
    return EpiWeek(int(m.group(1)), int(m.group(2)))


def from_date(d: dt.date) -> EpiWeek:
    """EpiWeek containing the calendar date ``d``."""
    sunday = d - dt.timedelta(days=(d.weekday() + 1) % 7)
    year = sunday.year + 1 if sunday >= year_start(sunday.year + 1) else sunday.year
    return EpiWeek(year, (sunday - year_start(year)).days // 7 + 1)


def iter_weeks(first: EpiWeek, last: EpiWeek) -> Iterator[EpiWeek]:
    """Yield consecutive weeks from ``first`` through ``last`` inclusive."""
    w = first
    while w <= last:
        yield w
        if w == last:
            break
        w = w + 1
