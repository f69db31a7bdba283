"""Revision-aware weekly series with strict "information as of" snapshots.

Every observation is keyed by (target week, report week).  ``as_of(t)``
exposes exactly what a forecaster sitting at week ``t`` could have seen:
per target week, the latest value reported no later than ``t``.  Sources
that are never revised are stored the same way, with a single report per
target week at ``target + lag``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .epiweek import EpiWeek

Value = Union[float, np.ndarray]


def _check_value(value: Value) -> Value:
    if isinstance(value, np.ndarray):
        if value.ndim != 1 or value.size == 0:
            raise ValueError("array observation must be a non-empty 1-D vector")
        if not np.all(np.isfinite(value)) or np.any(value < 0):
            raise ValueError("observation values must be finite and >= 0")
        v = np.asarray(value, dtype=float)
        v.setflags(write=False)
        return v
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError(f"observation value must be finite and >= 0, got {value}")
    return value


def _values_equal(a: Value, b: Value) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return isinstance(a, np.ndarray) and isinstance(b, np.ndarray) and np.array_equal(a, b)
    return a == b


@dataclass(frozen=True, eq=False)
class VintagedObservation:
    """One value for ``target_week`` as reported at ``report_week``."""

    target_week: EpiWeek
    report_week: EpiWeek
    value: Value

    def __post_init__(self):
        if self.report_week < self.target_week:
            raise ValueError(
                f"report week {self.report_week} precedes target week {self.target_week}"
            )
        object.__setattr__(self, "value", _check_value(self.value))

    def __eq__(self, other):
        if not isinstance(other, VintagedObservation):
            return NotImplemented
        return (
            self.target_week == other.target_week
            and self.report_week == other.report_week
            and _values_equal(self.value, other.value)
        )


@dataclass(frozen=True)
class Snapshot:
    """All values visible at ``issue_week``; treat as read-only."""

    issue_week: EpiWeek
    values: Mapping[EpiWeek, Value]

    def latest_week(self) -> Optional[EpiWeek]:
        """Most recent target week present, or None for an empty snapshot."""
        return max(self.values) if self.values else None

    def get(self, week: EpiWeek, default=None):
        return self.values.get(week, default)

    def __contains__(self, week: EpiWeek) -> bool:
        return week in self.values

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class VintagedSeries:
    """Immutable per-source collection of vintaged observations."""

    source_id: str
    observations: tuple = ()
    unit: str = "percent_ili"
    _by_target: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.unit not in ("percent_ili", "raw_volume"):
            raise ValueError(f"unknown unit {self.unit!r}")
        obs = tuple(
            sorted(self.observations, key=lambda o: (o.target_week, o.report_week))
        )
        by_target: dict[EpiWeek, list] = {}
        seen = set()
        for o in obs:
            key = (o.target_week, o.report_week)
            if key in seen:
                raise ValueError(
                    f"duplicate observation for {self.source_id}: "
                    f"target {o.target_week}, report {o.report_week}"
                )
            seen.add(key)
            by_target.setdefault(o.target_week, []).append((o.report_week, o.value))
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "_by_target", by_target)

    def __eq__(self, other):
        if not isinstance(other, VintagedSeries):
            return NotImplemented
        return (
            self.source_id == other.source_id
            and self.unit == other.unit
            and self.observations == other.observations
        )

    def __len__(self) -> int:
        return len(self.observations)

    def targets(self) -> tuple:
        """Target weeks with at least one report, ascending."""
        return tuple(self._by_target)

    def max_report_week(self) -> Optional[EpiWeek]:
        return max((o.report_week for o in self.observations), default=None)

    def as_of(self, issue: EpiWeek) -> Snapshot:
        """Latest value per target week with report week <= ``issue``."""
        values = {}
        for target, reports in self._by_target.items():
            best = None
            for report, value in reports:
                if report <= issue:
                    best = value
                else:
                    break  # reports are sorted ascending
            if best is not None:
                values[target] = best
        return Snapshot(issue_week=issue, values=values)

    def final(self) -> Snapshot:
        """Latest value per target week regardless of report date."""
        last = self.max_report_week()
        if last is None:
            raise ValueError(f"series {self.source_id} is empty")
        return self.as_of(last)

    def first_reported(self, target: EpiWeek):
        """(report_week, value) of the first release for ``target``, or None."""
        reports = self._by_target.get(target)
        return reports[0] if reports else None


def series_from_rows(
    source_id: str,
    rows: Iterable[tuple],
    unit: str = "percent_ili",
) -> VintagedSeries:
    """Build a series from (target_week, report_week, value) triples."""
    obs = tuple(VintagedObservation(t, r, v) for t, r, v in rows)
    return VintagedSeries(source_id=source_id, observations=obs, unit=unit)
