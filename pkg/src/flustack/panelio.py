"""CSV ingestion and emission for panels, ledgers and reports.

Panel files are long-format ``source,epiweek,value,report_epiweek``
(UTF-8, LF).  A missing report week defaults to the source's configured
lag.  Search-query panels are a separate wide CSV because the long
schema carries one value per row.  Floats are written with ``repr`` so a
load of a write reproduces the in-memory panel exactly.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Mapping, Optional

import numpy as np

from .backtest import PredictionLedger, PredictionRecord
from .epiweek import EpiWeek, from_label
from .metrics import MetricsReport
from .vintages import VintagedObservation, VintagedSeries
from .weak import WeakEstimate

PANEL_HEADER = ["source", "epiweek", "value", "report_epiweek"]
PREDICTIONS_HEADER = [
    "issue_epiweek",
    "horizon",
    "model",
    "target_epiweek",
    "value",
    "n_training_rows",
]
WEAK_HEADER = ["issue_epiweek", "source", "target_epiweek", "value"]
ERRORS_HEADER = ["model", "horizon", "target_epiweek", "relative_error"]
METRICS_HEADER = [
    "model",
    "horizon",
    "corr",
    "rmse",
    "rmspe",
    "mape_max",
    "hit_rate",
    "n",
    "mean_ape_nonpaper",
]


class PanelError(ValueError):
    """A panel or query CSV violates the documented schema."""


def _parse_value(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise PanelError(f"{where}: bad value {text!r}") from exc
    if not np.isfinite(v) or v < 0:
        raise PanelError(f"{where}: value must be finite and >= 0, got {text}")
    return v


def load_panel_csv(
    path,
    default_lags: Optional[Mapping[str, int]] = None,
    units: Optional[Mapping[str, str]] = None,
) -> dict:
    """One VintagedSeries per distinct source in the file.

    Revisions appear as repeated (source, epiweek) rows with distinct
    report weeks; exact duplicates are a hard error.
    """
    default_lags = default_lags or {}
    units = units or {}
    rows_by_source: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PanelError(f"{path}: empty file") from None
        if header != PANEL_HEADER:
            raise PanelError(
                f"{path}: header must be {','.join(PANEL_HEADER)!r}, got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise PanelError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            source, week_label, value_text, report_label = row
            where = f"{path}:{lineno}"
            try:
                target = from_label(week_label)
            except ValueError as exc:
                raise PanelError(f"{where}: {exc}") from exc
            value = _parse_value(value_text, where)
            if report_label:
                try:
                    report = from_label(report_label)
                except ValueError as exc:
                    raise PanelError(f"{where}: {exc}") from exc
            else:
                report = target + int(default_lags.get(source, 1))
            rows_by_source.setdefault(source, []).append((target, report, value))
    panel = {}
    for source, rows in rows_by_source.items():
        obs = tuple(VintagedObservation(t, r, v) for t, r, v in rows)
        try:
            panel[source] = VintagedSeries(
                source, obs, unit=units.get(source, "percent_ili")
            )
        except ValueError as exc:
            raise PanelError(f"{path}: {exc}") from exc
    return panel


def write_panel_csv(panel: Mapping[str, VintagedSeries], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PANEL_HEADER)
        for source in sorted(panel):
            for o in panel[source].observations:
                if isinstance(o.value, np.ndarray):
                    raise ValueError(
                        f"source {source!r} holds vector values; write it as a query CSV"
                    )
                writer.writerow([source, str(o.target_week), repr(o.value), str(o.report_week)])


def load_query_csv(path, source_id: str = "gt", lag_weeks: int = 1) -> VintagedSeries:
    """Wide query-volume panel: ``epiweek,q001,...``; one vector per week."""
    obs = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PanelError(f"{path}: empty file") from None
        if not header or header[0] != "epiweek" or len(header) < 2:
            raise PanelError(f"{path}: header must be 'epiweek,q001,...'")
        width = len(header) - 1
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width + 1:
                raise PanelError(f"{path}:{lineno}: expected {width + 1} fields")
            where = f"{path}:{lineno}"
            try:
                target = from_label(row[0])
            except ValueError as exc:
                raise PanelError(f"{where}: {exc}") from exc
            vec = np.array([_parse_value(v, where) for v in row[1:]], dtype=float)
            obs.append(VintagedObservation(target, target + lag_weeks, vec))
    return VintagedSeries(source_id, tuple(obs), unit="raw_volume")


def write_query_csv(series: VintagedSeries, path) -> None:
    width = None
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for o in series.observations:
            vec = np.asarray(o.value)
            if width is None:
                width = vec.shape[0]
                writer.writerow(["epiweek"] + [f"q{j + 1:03d}" for j in range(width)])
            writer.writerow([str(o.target_week)] + [repr(float(v)) for v in vec])


def write_truth_csv(truth: Mapping[EpiWeek, float], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epiweek", "value"])
        for w in sorted(truth):
            writer.writerow([str(w), repr(truth[w])])


def write_ledger_csv(
    ledger: PredictionLedger,
    out_dir,
    report: Optional[MetricsReport] = None,
    rel_series=None,
) -> dict:
    """Emit predictions.csv, weak_estimates.csv and config.json; also
    metrics.csv / errors.csv when an evaluation report is supplied.
    Rows are canonically sorted so identical ledgers give identical bytes."""
    if not ledger.records and not ledger.weak_estimates:
        raise ValueError("refusing to write an empty ledger")
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    paths["predictions"] = os.path.join(out_dir, "predictions.csv")
    with open(paths["predictions"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        for r in sorted(ledger.records, key=lambda r: (r.issue_week, r.horizon, r.model_id)):
            writer.writerow(
                [
                    str(r.issue_week),
                    r.horizon,
                    r.model_id,
                    str(r.target_week),
                    repr(r.value),
                    r.n_training_rows,
                ]
            )

    paths["weak_estimates"] = os.path.join(out_dir, "weak_estimates.csv")
    with open(paths["weak_estimates"], "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(WEAK_HEADER)
        for e in sorted(ledger.weak_estimates, key=lambda e: (e.issue_week, e.source_id)):
            writer.writerow([str(e.issue_week), e.source_id, str(e.target_week), repr(e.value)])

    paths["config"] = os.path.join(out_dir, "config.json")
    with open(paths["config"], "w", encoding="utf-8") as fh:
        json.dump(ledger.config_echo, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if ledger.failures:
        paths["failures"] = os.path.join(out_dir, "failures.json")
        with open(paths["failures"], "w", encoding="utf-8") as fh:
            json.dump(list(ledger.failures), fh, indent=2, sort_keys=True)
            fh.write("\n")

    if report is not None:
        paths["metrics"] = os.path.join(out_dir, "metrics.csv")
        with open(paths["metrics"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(METRICS_HEADER)
            for row in sorted(report.rows, key=lambda r: (r.horizon, r.model)):
                writer.writerow(
                    [
                        row.model,
                        row.horizon,
                        repr(row.corr),
                        repr(row.rmse),
                        repr(row.rmspe),
                        repr(row.mape_max),
                        repr(row.hit_rate),
                        row.n,
                        repr(row.mean_ape),
                    ]
                )

    if rel_series is not None:
        paths["errors"] = os.path.join(out_dir, "errors.csv")
        with open(paths["errors"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(ERRORS_HEADER)
            for s in sorted(rel_series, key=lambda s: (s.horizon, s.model)):
                for w, rel in zip(s.weeks, s.rel_errors):
                    writer.writerow([s.model, s.horizon, str(w), repr(float(rel))])
    return paths


def read_predictions_csv(path) -> tuple:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != PREDICTIONS_HEADER:
            raise PanelError(f"{path}: unexpected predictions header")
        for row in reader:
            if not row:
                continue
            records.append(
                PredictionRecord(
                    issue_week=from_label(row[0]),
                    horizon=int(row[1]),
                    model_id=row[2],
                    target_week=from_label(row[3]),
                    value=float(row[4]),
                    n_training_rows=int(row[5]),
                )
            )
    return tuple(records)


def read_weak_csv(path) -> tuple:
    estimates = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != WEAK_HEADER:
            raise PanelError(f"{path}: unexpected weak-estimates header")
        for row in reader:
            if not row:
                continue
            estimates.append(
                WeakEstimate(
                    source_id=row[1],
                    issue_week=from_label(row[0]),
                    target_week=from_label(row[2]),
                    value=float(row[3]),
                )
            )
    return tuple(estimates)
