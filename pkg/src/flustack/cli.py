"""Command-line surface.

Subcommands:

  synth     write a synthetic panel (panel.csv, gt_queries.csv, truth.csv)
            plus a ready-to-run backtest config
  backtest  run the expanding-window experiment and write the ledger
  evaluate  rescore a written ledger over a week range
  nowcast   print one issue week's four-horizon predictions as JSON

Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import backtest as bt
from . import metrics as mt
from . import panelio, synth
from .epiweek import from_label


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flustack",
        description="Vintage-aware ensemble nowcasting and forecasting of weekly ILI activity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a deterministic synthetic panel")
    p.add_argument("--config", help="synthetic-panel config JSON (defaults are bundled)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("backtest", help="run the weekly expanding-window backtest")
    p.add_argument("--panel", required=True, help="panel CSV")
    p.add_argument("--config", required=True, help="backtest config JSON")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("evaluate", help="rescore a written ledger")
    p.add_argument("--ledger", required=True, help="directory written by 'backtest'")
    p.add_argument("--weeks", help="evaluation range, e.g. 2013-W40..2014-W20")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--panel", help="panel CSV override (defaults to the config echo)")

    p = sub.add_parser("nowcast", help="predict the four horizons for one issue week")
    p.add_argument("--panel", required=True, help="panel CSV")
    p.add_argument("--config", required=True, help="backtest config JSON")
    p.add_argument("--issue", required=True, help="issue week, e.g. 2014-W05")
    return parser


def _load_backtest_inputs(panel_path, config_path):
    with open(config_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    config = bt.config_from_dict(raw)
    lags = {s.source_id: s.lag_weeks for s in config.sources}
    lags["cdc"] = config.cdc_lag_weeks
    panel = panelio.load_panel_csv(panel_path, default_lags=lags)
    base = os.path.dirname(os.path.abspath(config_path))
    for entry in raw.get("sources", []):
        q = entry.get("queries_csv")
        if q:
            qpath = q if os.path.isabs(q) else os.path.join(base, q)
            spec = next(s for s in config.sources if s.source_id == entry["id"])
            panel[spec.source_id] = panelio.load_query_csv(
                qpath, source_id=spec.source_id, lag_weeks=spec.lag_weeks
            )
    return config, panel, raw


def _evaluation_range(config, weeks_arg):
    if weeks_arg:
        parts = weeks_arg.split("..")
        if len(parts) != 2:
            raise ValueError("--weeks must look like 2013-W40..2014-W20")
        start, end = from_label(parts[0]), from_label(parts[1])
        if start > end:
            raise ValueError(f"--weeks start {start} is after end {end}")
        return start, end
    start = config.evaluation_start or (config.first_issue - 1)
    end = config.evaluation_end or (config.last_issue + 2)
    return start, end


def _cmd_synth(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = synth.synth_config_from_dict(json.load(fh))
    else:
        cfg = synth.SynthConfig()
    panel, truth = synth.generate_panel(cfg)
    os.makedirs(args.out, exist_ok=True)
    scalar = {k: v for k, v in panel.items() if k != "gt"}
    panelio.write_panel_csv(scalar, os.path.join(args.out, "panel.csv"))
    if "gt" in panel:
        panelio.write_query_csv(panel["gt"], os.path.join(args.out, "gt_queries.csv"))
    panelio.write_truth_csv(truth, os.path.join(args.out, "truth.csv"))
    with open(os.path.join(args.out, "synth_config.json"), "w", encoding="utf-8") as fh:
        json.dump(synth.synth_config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")

    run_config = bt.config_to_dict(bt.default_config())
    if "gt" in panel:
        for entry in run_config["sources"]:
            if entry["id"] == "gt":
                entry["queries_csv"] = "gt_queries.csv"
    run_config["sources"] = [
        e for e in run_config["sources"] if e["id"] in panel or e["id"] == "cdc"
    ]
    with open(os.path.join(args.out, "config.json"), "w", encoding="utf-8") as fh:
        json.dump(run_config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote synthetic panel ({cfg.n_weeks} weeks, seed {cfg.seed}) to {args.out}")
    return 0


def _cmd_backtest(args) -> int:
    config, panel, raw = _load_backtest_inputs(args.panel, args.config)
    ledger = bt.run_backtest(config, panel)
    echo = dict(ledger.config_echo)
    echo["panel"] = os.path.abspath(args.panel)
    for entry, src in zip(echo["sources"], raw.get("sources", [])):
        if src.get("queries_csv"):
            q = src["queries_csv"]
            base = os.path.dirname(os.path.abspath(args.config))
            entry["queries_csv"] = q if os.path.isabs(q) else os.path.join(base, q)
    ledger = bt.PredictionLedger(
        records=ledger.records,
        weak_estimates=ledger.weak_estimates,
        config_echo=echo,
        failures=ledger.failures,
    )
    start, end = _evaluation_range(config, None)
    report, rel = mt.evaluate_ledger(ledger, panel["cdc"].final(), start, end)
    paths = panelio.write_ledger_csv(ledger, args.out, report=report, rel_series=rel)
    print(
        f"backtest complete: {len(ledger.records)} predictions, "
        f"{len(ledger.failures)} skipped cells -> {args.out}"
    )
    if ledger.failures:
        print(f"  (see {paths['failures']})")
    return 0


def _cmd_evaluate(args) -> int:
    config_path = os.path.join(args.ledger, "config.json")
    with open(config_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    config = bt.config_from_dict(raw)
    panel_path = args.panel or raw.get("panel")
    if not panel_path:
        raise ValueError("ledger config has no panel path; pass --panel")
    lags = {s.source_id: s.lag_weeks for s in config.sources}
    lags["cdc"] = config.cdc_lag_weeks
    panel = panelio.load_panel_csv(panel_path, default_lags=lags)
    records = panelio.read_predictions_csv(os.path.join(args.ledger, "predictions.csv"))
    weak_path = os.path.join(args.ledger, "weak_estimates.csv")
    weak = panelio.read_weak_csv(weak_path) if os.path.exists(weak_path) else ()
    ledger = bt.PredictionLedger(records=records, weak_estimates=weak, config_echo=raw)
    start, end = _evaluation_range(config, args.weeks)
    report, rel = mt.evaluate_ledger(ledger, panel["cdc"].final(), start, end)
    panelio.write_ledger_csv(ledger, args.out, report=report, rel_series=rel)
    print(f"evaluated {len(report.rows)} (model, horizon) cells over {start}..{end} -> {args.out}")
    return 0


def _cmd_nowcast(args) -> int:
    config, panel, _ = _load_backtest_inputs(args.panel, args.config)
    issue = from_label(args.issue)
    run_cfg = bt.BacktestConfig(
        sources=config.sources,
        first_issue=issue - 1,
        last_issue=issue,
        cdc_lag_weeks=config.cdc_lag_weeks,
        min_training_rows=config.min_training_rows,
        ensemble_methods=config.ensemble_methods,
        cv_folds=config.cv_folds,
        seed=config.seed,
    )
    estimates = bt.build_weak_ledger(run_cfg, panel)
    weak_by_issue = bt.estimates_by_issue(estimates)
    records, failures = bt.run_issue(run_cfg, panel, weak_by_issue, issue)
    if not records:
        reason = failures[0]["reason"] if failures else "no predictions produced"
        raise ValueError(reason)
    out = {"issue": str(issue), "horizons": {}}
    for hor in bt.HORIZONS:
        cell = {
            "label": hor.label,
            "target": str(hor.target_week(issue)),
            "models": {
                r.model_id: r.value for r in records if r.horizon == hor.h
            },
        }
        out["horizons"][str(hor.h)] = cell
    if failures:
        out["skipped"] = [
            {"horizon": f["horizon"], "model": f["model"], "reason": f["reason"]}
            for f in failures
        ]
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "backtest": _cmd_backtest,
    "evaluate": _cmd_evaluate,
    "nowcast": _cmd_nowcast,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
