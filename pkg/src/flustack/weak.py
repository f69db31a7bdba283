"""Single-source weekly ILI estimators ("weak predictors").

Each data source produces an independent out-of-sample estimate of the
most recent completed week, refit at every issue week from snapshots of
what was available then:

- ``linear_map``      dynamic least-squares map from the source signal onto
                      the surveillance signal (hospital-visit and
                      participatory-survey sources);
- ``multiquery_lasso`` lasso over a panel of search-query volumes, lambda
                      picked by blocked cross-validation;
- ``arx_exog``        autoregression on the three most recent surveillance
                      values plus an exogenous volume signal (microblog
                      source);
- ``passthrough``     the source already emits the target unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .epiweek import EpiWeek
from .regressors import lasso_predict
from .regressors.lasso import LassoFit, lasso_path_cv, lasso_path_fit
from .vintages import Snapshot

ARX_RIDGE = 1e-8
FIXED_WINDOW_WEEKS = 104  # two 52-week seasons

MIN_ROWS = {"linear_map": 3, "multiquery_lasso": 10, "arx_exog": 8, "passthrough": 0}

KINDS = tuple(MIN_ROWS)
TRAININGS = ("expanding", "fixed_window")


class InsufficientHistoryError(ValueError):
    """Too little overlapping history to fit this source at this issue week."""


class MissingSourceValueError(ValueError):
    """The source has no usable latest value at this issue week."""


@dataclass(frozen=True)
class LinearMapFit:
    slope: float
    intercept: float
    n_train: int


@dataclass(frozen=True)
class ArxFit:
    intercept: float
    lag_coeffs: tuple  # 3 coefficients on the lagged surveillance values
    exog_coeff: Optional[float]
    horizon: int


@dataclass(frozen=True)
class WeakEstimate:
    source_id: str
    issue_week: EpiWeek
    target_week: EpiWeek
    value: float


@dataclass(frozen=True)
class SourceSpec:
    source_id: str
    kind: str
    lag_weeks: int = 1
    training: str = "expanding"
    recalibrate: bool = False  # passthrough only: map onto the target signal anyway

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.training not in TRAININGS:
            raise ValueError(f"unknown training mode {self.training!r}")
        if self.lag_weeks < 0:
            raise ValueError("lag_weeks must be >= 0")


def fit_linear_map(x, y) -> LinearMapFit:
    """Ordinary least squares y ~ a*x + b on at least 3 pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D with equal lengths")
    if x.shape[0] < 3:
        raise ValueError(f"need at least 3 training pairs, got {x.shape[0]}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training values")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise ValueError("constant x: singular design")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    return LinearMapFit(slope=slope, intercept=float(ym - slope * xm), n_train=x.shape[0])


def predict_linear_map(fit: LinearMapFit, x: float) -> float:
    return max(0.0, fit.slope * float(x) + fit.intercept)


def fit_arx(cdc_lags, exog, targets, horizon: int) -> ArxFit:
    """Least squares of the horizon-h target on [1, lag1, lag2, lag3(, exog)].

    The normal equations carry a fixed 1e-8 diagonal stabilizer so that
    collinear lag columns on smooth series stay solvable.
    """
    cdc_lags = np.asarray(cdc_lags, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if cdc_lags.ndim != 2 or cdc_lags.shape[1] != 3:
        raise ValueError("cdc_lags must be an n x 3 matrix")
    n = cdc_lags.shape[0]
    if targets.shape != (n,):
        raise ValueError("targets length must match rows of cdc_lags")
    if n < 8:
        raise ValueError(f"need at least 8 training rows, got {n}")
    if not 0 <= horizon <= 3:
        raise ValueError("horizon must be in 0..3")
    cols = [np.ones(n), cdc_lags[:, 0], cdc_lags[:, 1], cdc_lags[:, 2]]
    if exog is not None:
        exog = np.asarray(exog, dtype=float)
        if exog.shape != (n,):
            raise ValueError("exog length must match rows of cdc_lags")
        cols.append(exog)
    D = np.column_stack(cols)
    if not (np.all(np.isfinite(D)) and np.all(np.isfinite(targets))):
        raise ValueError("non-finite training values")
    A = D.T @ D + ARX_RIDGE * np.eye(D.shape[1])
    coef = np.linalg.solve(A, D.T @ targets)
    return ArxFit(
        intercept=float(coef[0]),
        lag_coeffs=tuple(float(c) for c in coef[1:4]),
        exog_coeff=float(coef[4]) if exog is not None else None,
        horizon=int(horizon),
    )


def predict_arx(fit: ArxFit, lags, exog=None) -> float:
    lags = np.asarray(lags, dtype=float)
    if lags.shape != (3,):
        raise ValueError("expected exactly 3 lag values")
    if (exog is None) != (fit.exog_coeff is None):
        raise ValueError("exogenous value presence must match the fit")
    v = fit.intercept + float(np.dot(fit.lag_coeffs, lags))
    if exog is not None:
        v += fit.exog_coeff * float(exog)
    return max(0.0, v)


def gt_multiquery_fit(queries, targets, cv_folds: int = 5) -> LassoFit:
    """Lasso from query-volume columns to %ILI, lambda by blocked CV.

    No sign constraint and no target transform (the identity transform
    outperformed the logit here).
    """
    queries = np.asarray(queries, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if queries.ndim != 2:
        raise ValueError("queries must be an n x q matrix")
    if queries.shape[0] < 10:
        raise ValueError(f"need at least 10 training rows, got {queries.shape[0]}")
    best_lam, _, _ = lasso_path_cv(queries, targets, n_folds=cv_folds, nonneg=False)
    return lasso_path_fit(queries, targets, best_lam, nonneg=False)


def _overlap_weeks(source_snapshot: Snapshot, cdc_snapshot: Snapshot):
    return sorted(set(source_snapshot.values) & set(cdc_snapshot.values))


def weak_nowcast(
    spec: SourceSpec,
    source_snapshot: Snapshot,
    cdc_snapshot: Snapshot,
    issue: EpiWeek,
) -> WeakEstimate:
    """One source's estimate of last week's %ILI, using as-of data only.

    The estimate targets ``issue - 1`` and is produced from the source's
    value at ``issue - lag_weeks``, mapped through a fit trained on the
    overlap of the two snapshots.
    """
    target = issue - 1
    latest_week = issue - spec.lag_weeks
    latest = source_snapshot.get(latest_week)
    if latest is None:
        raise MissingSourceValueError(
            f"source {spec.source_id!r} has no value for {latest_week} at issue {issue}"
        )

    kind = spec.kind
    if kind == "passthrough" and spec.recalibrate:
        kind = "linear_map"

    if kind == "passthrough":
        value = float(latest)
    elif kind == "linear_map":
        weeks = _overlap_weeks(source_snapshot, cdc_snapshot)
        if len(weeks) < MIN_ROWS["linear_map"]:
            raise InsufficientHistoryError(
                f"source {spec.source_id!r}: {len(weeks)} overlapping weeks at issue {issue}"
            )
        x = np.array([source_snapshot.values[w] for w in weeks], dtype=float)
        y = np.array([cdc_snapshot.values[w] for w in weeks], dtype=float)
        try:
            fit = fit_linear_map(x, y)
        except ValueError as exc:
            raise InsufficientHistoryError(f"source {spec.source_id!r}: {exc}") from exc
        value = predict_linear_map(fit, float(latest))
    elif kind == "multiquery_lasso":
        weeks = _overlap_weeks(source_snapshot, cdc_snapshot)
        if len(weeks) < MIN_ROWS["multiquery_lasso"]:
            raise InsufficientHistoryError(
                f"source {spec.source_id!r}: {len(weeks)} overlapping weeks at issue {issue}"
            )
        Q = np.vstack([np.asarray(source_snapshot.values[w], dtype=float) for w in weeks])
        y = np.array([cdc_snapshot.values[w] for w in weeks], dtype=float)
        fit = gt_multiquery_fit(Q, y)
        value = lasso_predict(fit, np.asarray(latest, dtype=float))
    elif kind == "arx_exog":
        value = _arx_nowcast(spec, source_snapshot, cdc_snapshot, issue, target)
    else:  # pragma: no cover - SourceSpec validates kinds
        raise ValueError(f"unknown source kind {kind!r}")

    return WeakEstimate(
        source_id=spec.source_id,
        issue_week=issue,
        target_week=target,
        value=max(0.0, float(value)),
    )


def _arx_nowcast(spec, source_snapshot, cdc_snapshot, issue, target):
    cdc = cdc_snapshot.values
    rows = []
    for w in sorted(cdc):
        if w - 1 in cdc and w - 2 in cdc and w - 3 in cdc and w in source_snapshot.values:
            rows.append(w)
    if spec.training == "fixed_window":
        rows = rows[:FIXED_WINDOW_WEEKS]
    if len(rows) < MIN_ROWS["arx_exog"]:
        raise InsufficientHistoryError(
            f"source {spec.source_id!r}: {len(rows)} usable rows at issue {issue}"
        )
    lags = np.array([[cdc[w - 1], cdc[w - 2], cdc[w - 3]] for w in rows], dtype=float)
    exog = np.array([source_snapshot.values[w] for w in rows], dtype=float)
    y = np.array([cdc[w] for w in rows], dtype=float)
    fit = fit_arx(lags, exog, y, horizon=0)
    pred_lags = [cdc.get(target - 1), cdc.get(target - 2), cdc.get(target - 3)]
    if any(v is None for v in pred_lags):
        raise InsufficientHistoryError(
            f"source {spec.source_id!r}: missing surveillance lags for {target} at issue {issue}"
        )
    pred_exog = source_snapshot.get(target)
    if pred_exog is None:
        raise MissingSourceValueError(
            f"source {spec.source_id!r} has no value for {target} at issue {issue}"
        )
    return predict_arx(fit, pred_lags, float(pred_exog))
