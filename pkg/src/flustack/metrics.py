"""Evaluation metrics and ledger scoring against final-vintage values.

Five headline metrics per (model, horizon): Pearson correlation, RMSE,
root mean squared percent error, maximum absolute percent error (a
maximum, not a mean — named mape_max to avoid the usual confusion), and
the hit rate of week-over-week direction changes.  A conventional mean
APE is emitted alongside, clearly flagged as an extra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .backtest import PredictionLedger
from .epiweek import EpiWeek
from .vintages import Snapshot

HIGHER_BETTER = ("corr", "hit_rate")
METRIC_NAMES = ("corr", "rmse", "rmspe", "mape_max", "hit_rate")


def _pair(y, x, min_len=1):
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != x.shape or y.ndim != 1:
        raise ValueError("series must be 1-D with equal lengths")
    if y.shape[0] < min_len:
        raise ValueError(f"need at least {min_len} points, got {y.shape[0]}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
        raise ValueError("non-finite values in input series")
    return y, x


def pearson(y, x) -> float:
    y, x = _pair(y, x, min_len=2)
    dy = y - y.mean()
    dx = x - x.mean()
    sy = float(np.sqrt(dy @ dy))
    sx = float(np.sqrt(dx @ dx))
    if sy == 0.0 or sx == 0.0:
        raise ValueError("correlation undefined for a constant series")
    r = float(dy @ dx) / (sy * sx)
    return float(min(1.0, max(-1.0, r)))


def rmse(y, x) -> float:
    y, x = _pair(y, x)
    d = y - x
    return float(np.sqrt(np.mean(d * d)))


def rmspe(y, x) -> float:
    y, x = _pair(y, x)
    if np.any(y == 0.0):
        raise ValueError("rmspe undefined when an observed value is 0")
    q = (y - x) / y
    return float(np.sqrt(np.mean(q * q)) * 100.0)


def mape_max(y, x) -> float:
    y, x = _pair(y, x)
    if np.any(y == 0.0):
        raise ValueError("mape undefined when an observed value is 0")
    return float(np.max(np.abs(y - x) / y) * 100.0)


def mean_ape(y, x) -> float:
    """Mean absolute percent error (not a headline metric; see mape_max)."""
    y, x = _pair(y, x)
    if np.any(y == 0.0):
        raise ValueError("mean ape undefined when an observed value is 0")
    return float(np.mean(np.abs(y - x) / y) * 100.0)


def hit_rate(y, x) -> float:
    """Percent of weeks whose direction of change matches exactly.

    sign(0) counts as its own direction, so two flat weeks agree.
    """
    y, x = _pair(y, x, min_len=2)
    sy = np.sign(np.diff(y))
    sx = np.sign(np.diff(x))
    return float(np.mean(sy == sx) * 100.0)


@dataclass(frozen=True)
class MetricsRow:
    model: str
    horizon: int
    corr: float
    rmse: float
    rmspe: float
    mape_max: float
    hit_rate: float
    n: int
    mean_ape: float
    notes: tuple = ()


@dataclass(frozen=True)
class MetricsReport:
    rows: tuple = ()

    def horizons(self) -> tuple:
        return tuple(sorted({r.horizon for r in self.rows}))

    def models(self, horizon: int) -> tuple:
        return tuple(r.model for r in self.rows if r.horizon == horizon)

    def get(self, model: str, horizon: int) -> MetricsRow:
        for r in self.rows:
            if r.model == model and r.horizon == horizon:
                return r
        raise KeyError((model, horizon))

    def best(self, horizon: int, metric: str) -> Optional[str]:
        """Model winning ``metric`` at ``horizon`` (Table-style bold flag)."""
        if metric not in METRIC_NAMES:
            raise ValueError(f"unknown metric {metric!r}")
        rows = [r for r in self.rows if r.horizon == horizon]
        vals = [(getattr(r, metric), r.model) for r in rows]
        vals = [(v, m) for v, m in vals if not math.isnan(v)]
        if not vals:
            return None
        pick = max if metric in HIGHER_BETTER else min
        return pick(vals, key=lambda t: t[0])[1]


@dataclass(frozen=True)
class RelativeErrorSeries:
    model: str
    horizon: int
    weeks: tuple
    rel_errors: np.ndarray  # |y - x| / y, only where y > 0
    rrmse: float
    max_rel: float


def _metric_or_nan(fn, y, x, notes, name):
    try:
        return fn(y, x)
    except ValueError as exc:
        notes.append(f"{name}: {exc}")
        return float("nan")


def evaluate_ledger(
    ledger: PredictionLedger,
    cdc_final: Snapshot,
    start: Optional[EpiWeek] = None,
    end: Optional[EpiWeek] = None,
    include_weak: bool = True,
):
    """Score every (model, horizon) against final-vintage values.

    Weak estimates join the comparison at horizon 0 under their source
    ids.  Within a horizon all models are scored over the identical week
    set: any week missing a prediction for one model is dropped for all
    (common support).  Returns (MetricsReport, [RelativeErrorSeries]).
    """
    series: dict = {}
    for rec in ledger.records:
        series.setdefault((rec.model_id, rec.horizon), {})[rec.target_week] = rec.value
    if include_weak:
        for est in ledger.weak_estimates:
            series.setdefault((est.source_id, 0), {})[est.target_week] = est.value
    if not series:
        raise ValueError("empty ledger: nothing to evaluate")

    horizons = sorted({h for _, h in series})
    rows = []
    rel_series = []
    evaluated = 0
    for h in horizons:
        models = sorted(m for m, hh in series if hh == h)
        common = None
        for m in models:
            weeks = set(series[(m, h)])
            common = weeks if common is None else common & weeks
        common &= set(cdc_final.values)
        if start is not None:
            common = {w for w in common if w >= start}
        if end is not None:
            common = {w for w in common if w <= end}
        weeks = tuple(sorted(common))
        if not weeks:
            continue
        evaluated += 1
        y = np.array([cdc_final.values[w] for w in weeks], dtype=float)
        for m in models:
            x = np.array([series[(m, h)][w] for w in weeks], dtype=float)
            notes: list[str] = []
            row = MetricsRow(
                model=m,
                horizon=h,
                corr=_metric_or_nan(pearson, y, x, notes, "corr"),
                rmse=_metric_or_nan(rmse, y, x, notes, "rmse"),
                rmspe=_metric_or_nan(rmspe, y, x, notes, "rmspe"),
                mape_max=_metric_or_nan(mape_max, y, x, notes, "mape_max"),
                hit_rate=_metric_or_nan(hit_rate, y, x, notes, "hit_rate"),
                n=len(weeks),
                mean_ape=_metric_or_nan(mean_ape, y, x, notes, "mean_ape"),
                notes=tuple(notes),
            )
            rows.append(row)
            pos = y > 0.0
            rel = np.abs(y[pos] - x[pos]) / y[pos]
            rel_series.append(
                RelativeErrorSeries(
                    model=m,
                    horizon=h,
                    weeks=tuple(w for w, p in zip(weeks, pos) if p),
                    rel_errors=rel,
                    rrmse=float(np.sqrt(np.mean(rel * rel))) if rel.size else float("nan"),
                    max_rel=float(np.max(rel)) if rel.size else float("nan"),
                )
            )
    if not evaluated:
        raise ValueError("no overlap between predictions, truth and requested weeks")
    return MetricsReport(rows=tuple(rows)), rel_series
