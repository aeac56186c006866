"""Command-line front end: detection, thresholds, simulations, calibration.

Commands
--------
detect     CSV in, JSON report document out (optionally a text summary and a
           plot-data CSV with columns t,y,in_region).
threshold  Analytic and/or Monte-Carlo threshold for given T and alpha.
simulate   Aggregate coverage/genuineness rows for registered models.
calibrate  Re-estimate the extreme-value constant from Monte-Carlo quantiles.

Exit codes: 0 success (zero detections included — that is a valid scientific
outcome), 2 I/O or parse failure, 3 validation failure.  All randomness flows
from --seed; identical inputs and flags produce byte-identical JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from .engine import detect
from .errors import RNSPError, ValidationError
from .model import (
    DetectionConfig,
    DetectionReport,
    Interval,
    Series,
    SignificanceRegion,
    validate_series,
)
from .simlab import MODEL_NAMES, run_experiment
from .threshold import (
    DEFAULT_LAMBDA_CONSTANT,
    calibrate_lambda_constant,
    lambda_alpha,
    mc_norm_quantile,
)

SCHEMA_VERSION = "1"


class ParseError(RNSPError):
    """Malformed input file (reported with the offending line)."""


# ---------------------------------------------------------------------------
# input parsing


def parse_series_text(
    text: str, column: int = 1, header: bool = False
) -> list[float]:
    """Parse one-value-per-line or delimited text into a list of floats.

    Values may be comma-separated within a line; ``column`` selects a 1-based
    column, ``header`` skips the first non-empty line.  Raises
    :class:`ParseError` naming the first offending line.
    """
    values: list[float] = []
    skipped_header = not header
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if not skipped_header:
            skipped_header = True
            continue
        fields = [f.strip() for f in line.split(",")]
        if column > len(fields):
            raise ParseError(f"line {line_no}: no column {column} in {raw!r}")
        token = fields[column - 1]
        try:
            values.append(float(token))
        except ValueError:
            raise ParseError(f"line {line_no}: not a number: {token!r}") from None
    return values


def read_series_file(path: str, column: int = 1, header: bool = False):
    with open(path, "rb") as fh:
        data = fh.read()
    digest = "sha256:" + hashlib.sha256(data).hexdigest()
    values = parse_series_text(data.decode("utf-8"), column=column, header=header)
    return values, digest


# ---------------------------------------------------------------------------
# report document (schema_version 1)


def config_to_dict(config: DetectionConfig) -> dict:
    return {
        "alpha": config.alpha,
        "M": config.M,
        "sampling": config.sampling,
        "overlap": config.overlap,
        "max_len": config.max_len,
        "seed": config.seed,
        "threshold_override": config.threshold_override,
    }


def report_to_document(report: DetectionReport, input_digest: str | None = None) -> dict:
    """Serialise a detection report to the flat JSON document structure."""
    return {
        "schema_version": SCHEMA_VERSION,
        "input_digest": input_digest,
        "T": report.T,
        "alpha": report.config.alpha,
        "threshold": {"value": report.threshold, "method": report.threshold_method},
        "config": config_to_dict(report.config),
        "regions": [
            {
                "s": r.interval.s,
                "e": r.interval.e,
                "length": r.interval.length,
                "deviation": r.deviation,
                "best_level": r.best_level,
                "midpoint": r.midpoint,
            }
            for r in report.regions
        ],
    }


def document_to_report(doc: dict) -> DetectionReport:
    """Parse a schema-1 document back into a DetectionReport."""
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {doc.get('schema_version')!r}")
    cfg = doc["config"]
    config = DetectionConfig(
        alpha=cfg["alpha"],
        M=cfg["M"],
        sampling=cfg["sampling"],
        overlap=cfg["overlap"],
        max_len=cfg["max_len"],
        seed=cfg["seed"],
        threshold_override=cfg["threshold_override"],
    )
    regions = tuple(
        SignificanceRegion(
            interval=Interval(r["s"], r["e"]),
            deviation=r["deviation"],
            best_level=r["best_level"],
            midpoint=r["midpoint"],
        )
        for r in doc["regions"]
    )
    return DetectionReport(
        regions=regions,
        threshold=doc["threshold"]["value"],
        threshold_method=doc["threshold"]["method"],
        config=config,
        T=doc["T"],
    )


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def plot_data_csv(series: Series, report: DetectionReport) -> str:
    """CSV with columns t,y,in_region; y is written so it re-parses exactly."""
    in_region = [0] * series.T
    for region in report.regions:
        for t in range(region.interval.s, region.interval.e + 1):
            in_region[t - 1] = 1
    lines = ["t,y,in_region"]
    for t in range(1, series.T + 1):
        lines.append(f"{t},{series.values[t - 1]!r},{in_region[t - 1]}")
    return "\n".join(lines) + "\n"


def summary_table(report: DetectionReport) -> str:
    lines = [
        f"T={report.T}  alpha={report.config.alpha}  "
        f"threshold={report.threshold:.4f} ({report.threshold_method})",
        f"regions: {len(report.regions)}",
    ]
    if report.regions:
        lines.append(f"{'s':>6} {'e':>6} {'len':>5} {'midpoint':>8} "
                     f"{'deviation':>10} {'best_level':>11}")
        for r in report.regions:
            lines.append(
                f"{r.interval.s:>6} {r.interval.e:>6} {r.interval.length:>5} "
                f"{r.midpoint:>8} {r.deviation:>10.4f} {r.best_level:>11.5g}"
            )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_detect(args) -> int:
    values, digest = read_series_file(args.input, column=args.column, header=args.header)
    series = validate_series(values)
    config = DetectionConfig(
        alpha=args.alpha,
        M=args.M,
        sampling=args.sampling,
        overlap=args.overlap,
        max_len=args.max_len,
        seed=args.seed,
        threshold_override=args.threshold,
    )
    report = detect(series, config)
    _emit(dumps_document(report_to_document(report, digest)), args.out)
    if args.summary:
        sys.stdout.write(summary_table(report))
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8") as fh:
            fh.write(plot_data_csv(series, report))
    return 0


def cmd_threshold(args) -> int:
    if args.T < 1:
        raise ValidationError("T must be >= 1")
    doc: dict = {"T": args.T, "alpha": args.alpha, "analytic": None, "monte_carlo": None}
    if args.T >= 3:
        spec = lambda_alpha(args.T, args.alpha, args.lambda_constant)
        doc["analytic"] = {"value": spec.value, "method": spec.method}
    if args.mc is not None:
        spec = mc_norm_quantile(args.T, args.alpha, args.mc, seed=args.seed)
        doc["monte_carlo"] = {"value": spec.value, "method": spec.method,
                              "n_reps": args.mc, "seed": args.seed}
    if doc["analytic"] is None and doc["monte_carlo"] is None:
        raise ValidationError("T < 3 has no analytic threshold; pass --mc REPS")
    _emit(dumps_document(doc), args.out)
    return 0


def _experiment_rows_csv(rows) -> str:
    header = "model,n_paths,coverage_count,mean_prop_genuine,mean_n_genuine,mean_avg_genuine_len"
    lines = [header]
    for row in rows:
        d = row.to_dict()
        lines.append(",".join("" if d[k] is None else str(d[k]) for k in header.split(",")))
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    models = [m.strip() for m in args.model.split(",") if m.strip()]
    if not models:
        raise ValidationError("no model given")
    config = DetectionConfig(
        alpha=args.alpha,
        M=args.M,
        sampling=args.sampling,
        overlap=args.overlap,
        max_len=args.max_len,
    )
    rows = [run_experiment(m, args.paths, config, args.seed) for m in models]
    if args.format == "csv":
        _emit(_experiment_rows_csv(rows), args.out)
    else:
        _emit(dumps_document([r.to_dict() for r in rows]), args.out)
    return 0


def _parse_grid(text: str, cast, flag: str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValidationError(f"{flag} must list at least one value")
    try:
        return [cast(t) for t in items]
    except ValueError:
        raise ValidationError(f"{flag}: could not parse {text!r}") from None


def cmd_calibrate(args) -> int:
    t_grid = _parse_grid(args.T_grid, int, "--T-grid")
    alpha_grid = _parse_grid(args.alpha_grid, float, "--alpha-grid")
    if args.reps < 1000:
        sys.stderr.write(
            f"warning: {args.reps} replicates give wide diagnostics; "
            "use --reps >= 1000 for a stable estimate\n"
        )
    result = calibrate_lambda_constant(t_grid, alpha_grid, n_reps=args.reps, seed=args.seed)
    doc = {
        "lambda_hat": result.lambda_hat,
        "default_constant": DEFAULT_LAMBDA_CONSTANT,
        "n_reps": args.reps,
        "seed": args.seed,
        "cells": [
            {"T": c.T, "alpha": c.alpha, "quantile": c.quantile,
             "tau_hat": c.tau_hat, "lambda_hat": c.lambda_hat}
            for c in result.cells
        ],
    }
    _emit(dumps_document(doc), args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rnsp",
        description="Finite-sample intervals of significance for median change-points.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_detection_flags(p):
        p.add_argument("--alpha", type=float, default=0.1,
                       help="global significance level (default 0.1)")
        p.add_argument("--M", type=int, default=1000,
                       help="minimum number of candidate intervals per segment (default 1000)")
        p.add_argument("--sampling", choices=["random", "grid"], default="random")
        p.add_argument("--overlap", choices=["none", "midpoint"], default="none")
        p.add_argument("--max-len", dest="max_len", type=int, default=None,
                       help="ignore candidate intervals spanning more than this")

    p = sub.add_parser("detect", help="detect significance regions in a CSV series")
    p.add_argument("input", help="CSV/plain-text input (one value per line by default)")
    add_common_detection_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=None,
                   help="override the significance threshold")
    p.add_argument("--column", type=int, default=1, help="1-based CSV column (default 1)")
    p.add_argument("--header", action="store_true", help="skip the first line")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--summary", action="store_true", help="also print a plain-text table")
    p.add_argument("--plot-data", dest="plot_data", default=None,
                   help="write a t,y,in_region CSV here")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("threshold", help="compute significance thresholds")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--lambda-constant", dest="lambda_constant", type=float,
                   default=DEFAULT_LAMBDA_CONSTANT)
    p.add_argument("--mc", type=int, default=None, metavar="REPS",
                   help="also compute a Monte-Carlo threshold with REPS replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("simulate", help="run repeated-detection experiments")
    p.add_argument("--model", required=True,
                   help=f"model name or comma list; one of: {', '.join(MODEL_NAMES)}")
    p.add_argument("--paths", type=int, default=100)
    add_common_detection_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="re-estimate the threshold constant")
    p.add_argument("--T-grid", dest="T_grid", default="200,500,1000")
    p.add_argument("--alpha-grid", dest="alpha_grid", default="0.05,0.1")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
