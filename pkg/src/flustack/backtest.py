"""Expanding-window weekly backtest over four horizons.

At every issue week the engine (a) freezes each source's weak estimate
from as-of snapshots, (b) assembles per-horizon design matrices whose
features are the weak estimates issued in past weeks and whose targets
are the first-released surveillance values available by the issue week,
(c) trains the requested ensembles from scratch plus an autoregressive
baseline, and (d) records one prediction per (horizon, model).  Nothing
reported after the issue week can influence its records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .epiweek import EpiWeek, from_label, iter_weeks
from .regressors import (
    CvPlan,
    NonConvergenceError,
    adaboost_predict,
    adaboost_r2_fit,
    cv_select,
    lasso_predict,
    svr_fit,
    svr_predict,
)
from .regressors.lasso import lasso_path_cv, lasso_path_fit
from .regressors.svr import svr_predict_many
from .vintages import VintagedSeries
from .weak import (
    InsufficientHistoryError,
    MissingSourceValueError,
    SourceSpec,
    WeakEstimate,
    fit_arx,
    predict_arx,
    weak_nowcast,
)

HORIZON_LABELS = ("last week", "this week", "next week", "in two weeks")

ENSEMBLE_METHODS = ("lasso_nn", "svr_rbf", "svr_linear", "adaboost")
BASELINE_METHOD = "ar3_baseline"
ALL_METHODS = ENSEMBLE_METHODS + (BASELINE_METHOD,)

ADABOOST_ROUNDS = 50
ADABOOST_DEPTH = 3
SVR_C_GRID = (0.1, 1.0, 10.0, 100.0)
# C=100 with a linear kernel on the near-collinear weak-estimate columns
# needs ~10x the solver's pair-update cap and never wins validation;
# the linear grid stops at 10.
SVR_C_GRID_LINEAR = (0.1, 1.0, 10.0)
SVR_EPS_FRACTIONS = (0.01, 0.05, 0.1)
SVR_GAMMA_FACTORS = (0.01, 0.1, 1.0)
BASELINE_MIN_ROWS = 8


@dataclass(frozen=True)
class HorizonSpec:
    h: int

    def __post_init__(self):
        if not 0 <= self.h <= 3:
            raise ValueError("horizon must be in 0..3")

    @property
    def label(self) -> str:
        return HORIZON_LABELS[self.h]

    def target_week(self, issue: EpiWeek) -> EpiWeek:
        return issue - 1 + self.h


HORIZONS = tuple(HorizonSpec(h) for h in range(4))


@dataclass(frozen=True)
class BacktestConfig:
    sources: tuple  # SourceSpec, in ensemble feature order
    first_issue: EpiWeek
    last_issue: EpiWeek
    cdc_lag_weeks: int = 2
    min_training_rows: int = 31
    ensemble_methods: tuple = ALL_METHODS
    cv_folds: int = 5
    seed: int = 42
    feature_lags: int = 0  # extra weeks of lagged weak estimates as features
    evaluation_start: Optional[EpiWeek] = None
    evaluation_end: Optional[EpiWeek] = None

    def __post_init__(self):
        if not self.sources:
            raise ValueError("at least one source is required")
        if not self.first_issue < self.last_issue:
            raise ValueError("first_issue must precede last_issue")
        if self.min_training_rows < 8:
            raise ValueError("min_training_rows must be >= 8")
        unknown = set(self.ensemble_methods) - set(ALL_METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")
        if not 0 <= self.feature_lags <= 8:
            raise ValueError("feature_lags must be in 0..8")


@dataclass(frozen=True)
class DesignMatrix:
    features: np.ndarray  # one row per past issue week
    targets: np.ndarray  # first-released surveillance values
    row_issues: tuple
    feature_ids: tuple

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class PredictionRecord:
    issue_week: EpiWeek
    horizon: int
    model_id: str
    target_week: EpiWeek
    value: float
    n_training_rows: int


@dataclass(frozen=True)
class PredictionLedger:
    records: tuple = ()
    weak_estimates: tuple = ()
    config_echo: dict = field(default_factory=dict)
    failures: tuple = ()


def default_sources() -> tuple:
    """The five weak predictors in their conventional reporting order."""
    return (
        SourceSpec("fny", "linear_map", lag_weeks=1),
        SourceSpec("ath", "linear_map", lag_weeks=1),
        SourceSpec("gt", "multiquery_lasso", lag_weeks=1),
        SourceSpec("gft", "passthrough", lag_weeks=1),
        SourceSpec("twt", "arx_exog", lag_weeks=1, training="fixed_window"),
    )


def default_config() -> BacktestConfig:
    """Backtest calendar matched to the bundled synthetic panel.

    Two lagged weeks of weak estimates join the feature row: a current
    estimate alone carries no trend, and the forecast horizons need one
    to compete with (and beat) the autoregressive baseline.
    """
    first = from_label("2013-W27")
    return BacktestConfig(
        sources=default_sources(),
        first_issue=first,
        last_issue=first + 99,
        feature_lags=2,
    )


def build_weak_ledger(config: BacktestConfig, panel: Mapping[str, VintagedSeries]) -> tuple:
    """All weak estimates computable honestly up to the last issue week.

    Iterates issue weeks in order from the first week any source could
    have enough history; a (source, issue) pair without its per-kind
    minimum history is skipped.  Each estimate is computed exactly once.
    """
    if "cdc" not in panel:
        raise ValueError("panel must contain a 'cdc' series")
    cdc = panel["cdc"]
    for spec in config.sources:
        if spec.source_id not in panel:
            raise ValueError(f"panel has no series for source {spec.source_id!r}")

    earliest = min(s.targets()[0] for s in panel.values() if len(s))
    estimates = []
    produced = {spec.source_id: 0 for spec in config.sources}
    for issue in iter_weeks(earliest + 1, config.last_issue):
        cdc_snap = cdc.as_of(issue)
        for spec in config.sources:
            snap = panel[spec.source_id].as_of(issue)
            try:
                est = weak_nowcast(spec, snap, cdc_snap, issue)
            except (InsufficientHistoryError, MissingSourceValueError):
                continue
            estimates.append(est)
            produced[spec.source_id] += 1
    never = sorted(sid for sid, k in produced.items() if k == 0)
    if never:
        raise ValueError(f"sources never reached their minimum history: {never}")
    return tuple(estimates)


def estimates_by_issue(estimates) -> dict:
    out: dict[EpiWeek, dict[str, float]] = {}
    for est in estimates:
        out.setdefault(est.issue_week, {})[est.source_id] = est.value
    return out


def _feature_row(weak_by_issue, source_ids, issue, lags):
    """Feature vector for one issue week: each source's current weak
    estimate followed, per lag, by its change since ``lag`` weeks before
    (trend terms; affine-equivalent to raw lagged levels but directly
    usable by sign constraints and tree splits).  Returns (row, None), or
    (None, missing_source) when any needed estimate is absent."""
    current = weak_by_issue.get(issue, {})
    row = []
    for sid in source_ids:
        if sid not in current:
            return None, sid
        row.append(current[sid])
    for lag in range(1, lags + 1):
        feats = weak_by_issue.get(issue - lag, {})
        for sid in source_ids:
            if sid not in feats:
                return None, sid
            row.append(current[sid] - feats[sid])
    return row, None


def feature_labels(source_ids, lags):
    labels = list(source_ids)
    for lag in range(1, lags + 1):
        labels.extend(f"{sid}_d{lag}" for sid in source_ids)
    return tuple(labels)


def build_design_matrix(
    weak_by_issue: Mapping,
    cdc_series: VintagedSeries,
    feature_ids: tuple,
    horizon: int,
    issue: EpiWeek,
    min_rows: int,
    feature_lags: int = 0,
) -> DesignMatrix:
    """Training rows for one (horizon, issue) cell.

    A past issue t' contributes a row when every enabled source has an
    estimate issued at t' (and at the ``feature_lags`` weeks before it)
    and the target week t' - 1 + horizon was first reported no later
    than ``issue``.  Targets are first-release values, so later
    revisions never alter a training set.
    """
    rows, targets, row_issues = [], [], []
    for t in sorted(weak_by_issue):
        if t > issue:
            break
        row, _ = _feature_row(weak_by_issue, feature_ids, t, feature_lags)
        if row is None:
            continue
        w = t - 1 + horizon
        first = cdc_series.first_reported(w)
        if first is None or first[0] > issue:
            continue
        rows.append(row)
        targets.append(first[1])
        row_issues.append(t)
    if len(rows) < min_rows:
        raise InsufficientHistoryError(
            f"{len(rows)} training rows < required {min_rows} (horizon {horizon}, issue {issue})"
        )
    return DesignMatrix(
        features=np.asarray(rows, dtype=float),
        targets=np.asarray(targets, dtype=float),
        row_issues=tuple(row_issues),
        feature_ids=feature_labels(feature_ids, feature_lags),
    )


def _nonneg_mask(n_features, n_sources):
    """Sign constraints apply to the stacking weights on the current weak
    estimates; the trend extension columns are unconstrained (a trend
    term needs a free sign to extrapolate)."""
    mask = np.zeros(n_features, dtype=np.uint8)
    mask[:n_sources] = 1
    return mask


def _fit_predict_lasso_nn(X, y, xrow, folds, n_sources):
    mask = _nonneg_mask(X.shape[1], n_sources)
    best_lam, _, _ = lasso_path_cv(X, y, n_folds=folds, nonneg_mask=mask)
    fit = lasso_path_fit(X, y, best_lam, nonneg_mask=mask)
    return lasso_predict(fit, xrow)


def _svr_grid(y, kernel, p):
    sd = float(np.std(y))
    grid = []
    for C in SVR_C_GRID if kernel == "rbf" else SVR_C_GRID_LINEAR:
        for f in SVR_EPS_FRACTIONS:
            if kernel == "rbf":
                for g in SVR_GAMMA_FACTORS:
                    grid.append((C, f * sd, g / p))
            else:
                grid.append((C, f * sd, None))
    return tuple(grid)


def _fit_predict_svr(X, y, xrow, folds, kernel):
    grid = _svr_grid(y, kernel, X.shape[1])

    def fit_fn(Xtr, ytr, params):
        C, eps, gamma = params
        f = svr_fit(Xtr, ytr, C=C, epsilon=eps, kernel=kernel, gamma=gamma)
        return lambda Xv: svr_predict_many(f, Xv)

    best, _ = cv_select(X, y, CvPlan(n_folds=folds, grid=grid), fit_fn)
    C, eps, gamma = best
    fit = svr_fit(X, y, C=C, epsilon=eps, kernel=kernel, gamma=gamma)
    return svr_predict(fit, xrow)


def _fit_predict_adaboost(X, y, xrow, folds):
    fit = adaboost_r2_fit(X, y, T=ADABOOST_ROUNDS, max_depth=ADABOOST_DEPTH)
    return adaboost_predict(fit, xrow)


_ENSEMBLE_FITTERS = {
    "lasso_nn": _fit_predict_lasso_nn,
    "svr_rbf": lambda X, y, x, f: _fit_predict_svr(X, y, x, f, "rbf"),
    "svr_linear": lambda X, y, x, f: _fit_predict_svr(X, y, x, f, "linear"),
    "adaboost": _fit_predict_adaboost,
}


def _baseline_predict(cdc: VintagedSeries, issue: EpiWeek, horizon: int):
    """Direct per-horizon autoregression on the three freshest values.

    Trained on everything first-reported by the issue week, with lag
    features read from the as-of snapshot at the same relative offsets
    that will be used for the prediction itself.
    """
    snap = cdc.as_of(issue)
    newest = snap.latest_week()
    if newest is None:
        raise InsufficientHistoryError(f"no surveillance data as of {issue}")
    target = issue - 1 + horizon
    delta = target - newest
    vals = snap.values
    rows, targets = [], []
    for w in sorted(vals):
        first = cdc.first_reported(w)
        if first is None or first[0] > issue:
            continue
        lags = (vals.get(w - delta), vals.get(w - delta - 1), vals.get(w - delta - 2))
        if any(v is None for v in lags):
            continue
        rows.append(lags)
        targets.append(first[1])
    if len(rows) < BASELINE_MIN_ROWS:
        raise InsufficientHistoryError(
            f"{len(rows)} baseline rows < required {BASELINE_MIN_ROWS} (horizon {horizon}, issue {issue})"
        )
    fit = fit_arx(np.asarray(rows, dtype=float), None, np.asarray(targets, dtype=float), horizon)
    pred_lags = (vals[newest], vals[newest - 1], vals[newest - 2])
    value = predict_arx(fit, pred_lags, None)
    return value, len(rows)


def run_issue(
    config: BacktestConfig,
    panel: Mapping[str, VintagedSeries],
    weak_by_issue: Mapping,
    issue: EpiWeek,
):
    """Predictions and failures for one issue week across all horizons."""
    cdc = panel["cdc"]
    feature_ids = tuple(s.source_id for s in config.sources)
    ensembles = [m for m in config.ensemble_methods if m != BASELINE_METHOD]
    records, failures = [], []

    def fail(h, model, reason):
        failures.append(
            {"issue": str(issue), "horizon": h, "model": model, "reason": reason}
        )

    current, missing = _feature_row(weak_by_issue, feature_ids, issue, config.feature_lags)
    for hor in HORIZONS:
        target = hor.target_week(issue)
        if BASELINE_METHOD in config.ensemble_methods:
            try:
                value, nrows = _baseline_predict(cdc, issue, hor.h)
            except (ValueError, np.linalg.LinAlgError) as exc:
                fail(hor.h, BASELINE_METHOD, str(exc))
            else:
                records.append(
                    PredictionRecord(issue, hor.h, BASELINE_METHOD, target, max(0.0, value), nrows)
                )
        if not ensembles:
            continue
        if current is None:
            for m in ensembles:
                fail(hor.h, m, f"no weak estimate for source '{missing}' at issue {issue}")
            continue
        try:
            dm = build_design_matrix(
                weak_by_issue,
                cdc,
                feature_ids,
                hor.h,
                issue,
                config.min_training_rows,
                config.feature_lags,
            )
        except InsufficientHistoryError as exc:
            for m in ensembles:
                fail(hor.h, m, str(exc))
            continue
        xrow = np.array(current, dtype=float)
        for m in ensembles:
            try:
                value = _ENSEMBLE_FITTERS[m](dm.features, dm.targets, xrow, config.cv_folds)
            except (ValueError, NonConvergenceError, np.linalg.LinAlgError) as exc:
                fail(hor.h, m, str(exc))
            else:
                records.append(
                    PredictionRecord(issue, hor.h, m, target, max(0.0, value), dm.n_rows)
                )
    return records, failures


def run_backtest(config: BacktestConfig, panel: Mapping[str, VintagedSeries]) -> PredictionLedger:
    """Full expanding-window run; deterministic given (config, panel)."""
    estimates = build_weak_ledger(config, panel)
    weak_by_issue = estimates_by_issue(estimates)
    records, failures = [], []
    for issue in iter_weeks(config.first_issue, config.last_issue):
        r, f = run_issue(config, panel, weak_by_issue, issue)
        records.extend(r)
        failures.extend(f)
    records.sort(key=lambda r: (r.issue_week, r.horizon, r.model_id))
    return PredictionLedger(
        records=tuple(records),
        weak_estimates=estimates,
        config_echo=config_to_dict(config),
        failures=tuple(failures),
    )


def config_to_dict(config: BacktestConfig) -> dict:
    return {
        "sources": [
            {
                "id": s.source_id,
                "kind": s.kind,
                "lag_weeks": s.lag_weeks,
                "training": s.training,
                "recalibrate": s.recalibrate,
            }
            for s in config.sources
        ],
        "cdc_lag_weeks": config.cdc_lag_weeks,
        "first_issue": str(config.first_issue),
        "last_issue": str(config.last_issue),
        "min_training_rows": config.min_training_rows,
        "ensemble_methods": list(config.ensemble_methods),
        "cv": {"folds": config.cv_folds},
        "seed": config.seed,
        "feature_lags": config.feature_lags,
        "evaluation": {
            "start": str(config.evaluation_start) if config.evaluation_start else None,
            "end": str(config.evaluation_end) if config.evaluation_end else None,
        },
    }


def config_from_dict(d: dict) -> BacktestConfig:
    sources = tuple(
        SourceSpec(
            source_id=s["id"],
            kind=s["kind"],
            lag_weeks=int(s.get("lag_weeks", 1)),
            training=s.get("training", "expanding"),
            recalibrate=bool(s.get("recalibrate", False)),
        )
        for s in d["sources"]
    )
    ev = d.get("evaluation") or {}
    return BacktestConfig(
        sources=sources,
        first_issue=from_label(d["first_issue"]),
        last_issue=from_label(d["last_issue"]),
        cdc_lag_weeks=int(d.get("cdc_lag_weeks", 2)),
        min_training_rows=int(d.get("min_training_rows", 31)),
        ensemble_methods=tuple(d.get("ensemble_methods", ALL_METHODS)),
        cv_folds=int((d.get("cv") or {}).get("folds", 5)),
        seed=int(d.get("seed", 42)),
        feature_lags=int(d.get("feature_lags", 0)),
        evaluation_start=from_label(ev["start"]) if ev.get("start") else None,
        evaluation_end=from_label(ev["end"]) if ev.get("end") else None,
    )
