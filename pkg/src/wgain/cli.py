"""Command-line interface.

Verbs:
  run     execute a benchmark experiment from a JSON config file
  stats   rank a scores CSV (datasets x methods) and run the Friedman /
          Iman-Davenport / Bonferroni-Dunn pipeline
  impute  fill the empty cells of a feature CSV with a saved model
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .data import read_feature_csv, write_feature_csv
from .exceptions import WgainError
from .experiment import load_config, run, stats_from_tables, write_report
from .imputers import load_imputer
from .masking import mask_from_nan
from .stats import save_score_table
from .stats.tables import ScoreTable


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgain",
        description="Missing-value imputation toolkit and benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a benchmark experiment from a config file")
    p_run.add_argument("config", help="JSON experiment config")
    p_run.add_argument("-o", "--output", default=None, help="override the config's output directory")

    p_stats = sub.add_parser("stats", help="rank a scores CSV and test method differences")
    p_stats.add_argument("table", help="CSV with datasets as rows and methods as columns")
    p_stats.add_argument(
        "--direction",
        choices=("higher", "lower"),
        default="higher",
        help="whether larger scores are better (accuracy) or worse (RMSE)",
    )
    p_stats.add_argument("--control", default=None, help="control method for Bonferroni-Dunn (default: best mean rank)")
    p_stats.add_argument("--alpha", type=float, default=0.10, help="family-wise significance level")
    p_stats.add_argument("-o", "--output", default=None, help="directory for rank/statistics CSVs")

    p_imp = sub.add_parser("impute", help="fill empty cells of a feature CSV with a saved model")
    p_imp.add_argument("input", help="feature CSV; empty cells mark missing values")
    p_imp.add_argument("--model", required=True, help="model file written by save_imputer")
    p_imp.add_argument("-o", "--output", required=True, help="completed CSV path")
    p_imp.add_argument("--seed", type=int, default=None, help="seed for stochastic fills")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    out_dir = args.output if args.output is not None else config.output_dir
    report = run(config)
    written = write_report(report, out_dir)
    print(f"wrote {len(written)} report file(s) to {out_dir}")
    if report.failures:
        print(f"warning: {len(report.failures)} cell failure(s); see failures.csv", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    result = stats_from_tables(args.table, args.direction, args.control, args.alpha)
    methods = result.ranks.methods
    print(f"methods: {', '.join(methods)}  (direction: {args.direction}-is-better)")
    print(f"datasets: {result.ranks.n_datasets}")
    print()
    print("ranks per dataset:")
    width = max(len(m) for m in methods)
    print("  " + " ".join(f"{m:>{max(width, 6)}}" for m in methods))
    for name, row in zip(result.ranks.datasets, result.ranks.ranks):
        print("  " + " ".join(f"{r:>{max(width, 6)}.2f}" for r in row) + f"  {name}")
    print()
    print("mean ranks: " + ", ".join(f"{m}={r:.2f}" for m, r in zip(methods, result.avg_ranks)))
    fr = result.friedman
    print(f"Friedman chi2 = {fr.chi2:.4f}, p = {fr.p_chi2:.4f}")
    print(f"Iman-Davenport F = {fr.f_stat:.4f}, p = {fr.p_f:.4f}")
    print(f"Bonferroni-Dunn vs {result.control} (alpha = {args.alpha}):")
    for cmp in result.dunn:
        flag = "significant" if cmp.significant else "not significant"
        print(f"  {cmp.method:>{width}}: mean rank {cmp.mean_rank:.2f}, z = {cmp.z:+.3f}, p = {cmp.p_raw:.4f} ({flag})")

    if args.output is not None:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        save_score_table(
            out / "ranks.csv",
            ScoreTable(datasets=result.ranks.datasets, methods=methods, values=result.ranks.ranks),
        )
        import csv

        with open(out / "statistics.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["statistic", "value", "p_value"])
            writer.writerow(["friedman_chi2", repr(fr.chi2), repr(fr.p_chi2)])
            writer.writerow(["iman_davenport_f", repr(fr.f_stat), repr(fr.p_f)])
        with open(out / "bonferroni_dunn.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "mean_rank", "z", "p_raw", "significant"])
            for cmp in result.dunn:
                writer.writerow([cmp.method, repr(cmp.mean_rank), repr(cmp.z), repr(cmp.p_raw), int(cmp.significant)])
        print(f"wrote rank and statistics CSVs to {out}")
    return 0


def _cmd_impute(args) -> int:
    imputer = load_imputer(args.model)
    names, values = read_feature_csv(args.input, allow_missing=True)
    mask = mask_from_nan(values)
    if (mask == 1.0).all():
        completed = values
        print("input has no missing cells; copied through unchanged", file=sys.stderr)
    else:
        completed = imputer.impute(values, mask, seed=args.seed)
    write_feature_csv(args.output, names, completed)
    n_filled = int((mask == 0.0).sum())
    print(f"filled {n_filled} missing cell(s) across {values.shape[0]} row(s) -> {args.output}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "stats":
            return _cmd_stats(args)
        return _cmd_impute(args)
    except WgainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
