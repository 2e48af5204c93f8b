"""Command-line interface: simulate, summarise, decompose, and render.

Exit codes: 0 success, 1 data/runtime error (message on stderr), 2 usage
error. Every output file is written to a temporary sibling and renamed
into place, so an interrupted run never leaves a truncated file behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import defaults
from .decompose import decompose, rle_series
from .matrix import ExpressionMatrix, attach_groups, load_matrix, log_transform, save_matrix
from .render import RenderSpec, render_boxplots, render_panel
from .simulate import SCENARIO_IDS, scenario, simulate
from .stats import (rle_summary, standard_boxplot_summary, summaries_from_json,
                    summaries_to_csv, summaries_to_json)

__all__ = ["main", "run"]


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _atomic_save_matrix(matrix: ExpressionMatrix, path) -> None:
    path = Path(path)
    delim = "\t" if path.suffix.lower() in (".tsv", ".tab", ".txt") else ","
    tmp = path.with_name(path.name + ".tmp")
    save_matrix(matrix, tmp, delimiter=delim)
    os.replace(tmp, path)


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", required=True, metavar="PATH",
                   help="delimited matrix file")
    p.add_argument("--delimiter", default=None,
                   help="field delimiter (default: inferred from extension)")
    p.add_argument("--orientation", choices=("samples", "features"),
                   default=defaults.ORIENTATION,
                   help="whether file rows are samples or features")
    p.add_argument("--no-header", dest="header", action="store_false",
                   help="file has no id row/column")
    p.add_argument("--drop-missing", action="store_true",
                   help="drop features containing missing cells instead of erroring")
    p.add_argument("--log", action="store_true",
                   help="log-transform values after loading")
    p.add_argument("--log-base", type=float, default=defaults.LOG_BASE)
    p.add_argument("--log-offset", type=float, default=defaults.LOG_OFFSET)
    p.add_argument("--groups", metavar="PATH", default=None,
                   help="two-column file mapping sample id to group label")
    p.add_argument("--default-group", default=None,
                   help="group label for samples missing from --groups")


def _add_summary_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--quantile-method", choices=("linear", "hinges"),
                   default=defaults.QUANTILE_METHOD)
    p.add_argument("--whisker-coef", type=float, default=defaults.WHISKER_COEF)


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--title", default="")
    p.add_argument("--width", type=float, default=640.0)
    p.add_argument("--height", type=float, default=400.0)
    p.add_argument("--ylim", nargs=2, type=float, metavar=("LO", "HI"), default=None)
    p.add_argument("--zero-line", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--outlier-glyph", choices=("circle", "diamond", "cross"),
                   default="circle")
    p.add_argument("--box-width", type=float, default=0.6,
                   help="box width as a fraction of the per-sample slot")
    p.add_argument("--color", action="append", default=[], metavar="GROUP=HEX",
                   help="explicit group colour (repeatable)")


def _load_input(args) -> ExpressionMatrix:
    matrix = load_matrix(args.input, delimiter=args.delimiter,
                         orientation=args.orientation, header=args.header,
                         drop_missing=args.drop_missing)
    if args.log:
        matrix = log_transform(matrix, args.log_base, args.log_offset)
    if args.groups:
        matrix = attach_groups(matrix, _read_group_map(args.groups),
                               default=args.default_group)
    return matrix


def _read_group_map(path) -> dict:
    import csv as _csv

    delim = "\t" if str(path).lower().endswith((".tsv", ".tab", ".txt")) else ","
    mapping = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(_csv.reader(fh, delimiter=delim), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'sample{delim}group'")
            mapping[row[0].strip()] = row[1].strip()
    if not mapping:
        raise ValueError(f"{path}: no group assignments found")
    return mapping


def _render_spec_from(args) -> RenderSpec:
    palette = {}
    for item in args.color:
        if "=" not in item:
            raise ValueError(f"--color expects GROUP=HEX, got {item!r}")
        group, _, color = item.partition("=")
        palette[group] = color
    return RenderSpec(
        title=args.title, width=args.width, height=args.height,
        group_palette=palette,
        y_limits=None if args.ylim is None else (args.ylim[0], args.ylim[1]),
        zero_line=args.zero_line, outlier_glyph=args.outlier_glyph,
        box_width_fraction=args.box_width,
    )


def _emit_summaries(summaries, json_path, csv_path) -> None:
    wrote = False
    if json_path:
        _atomic_write_text(json_path, summaries_to_json(summaries))
        wrote = True
    if csv_path:
        _atomic_write_text(csv_path, summaries_to_csv(summaries))
        wrote = True
    if not wrote:
        sys.stdout.write(summaries_to_json(summaries))


def _cmd_rle(args) -> int:
    matrix = _load_input(args)
    summaries = rle_summary(matrix, args.quantile_method, args.whisker_coef)
    _emit_summaries(summaries, args.json, args.csv)
    return 0


def _cmd_boxplot(args) -> int:
    matrix = _load_input(args)
    summaries = standard_boxplot_summary(matrix, args.quantile_method, args.whisker_coef)
    _emit_summaries(summaries, args.json, args.csv)
    return 0


def _cmd_simulate(args) -> int:
    dataset = simulate(scenario(args.scenario, args.seed))
    _atomic_save_matrix(dataset.matrix, args.out)
    if args.truth:
        _atomic_write_text(args.truth, json.dumps(dataset.truth_dict(), indent=2) + "\n")
    return 0


def _cmd_decompose(args) -> int:
    matrix = _load_input(args)
    decomp = decompose(matrix, rank_tol=args.rank_tol, center=args.center)
    if args.p > decomp.rank:
        raise ValueError(f"--p {args.p} exceeds the residual's rank {decomp.rank}")
    prefix = args.out_prefix
    _atomic_write_text(f"{prefix}_singular_values.json",
                       json.dumps(decomp.singular_values.tolist(), indent=2) + "\n")
    for p in range(args.p + 1):
        corrected = ExpressionMatrix(decomp.corrected(p), matrix.sample_ids,
                                     matrix.feature_ids, matrix.groups)
        _atomic_save_matrix(corrected, f"{prefix}_p{p}.csv")
        summaries = rle_summary(corrected, args.quantile_method, args.whisker_coef)
        _atomic_write_text(f"{prefix}_rle_p{p}.json", summaries_to_json(summaries))
    return 0


def _cmd_render(args) -> int:
    spec = _render_spec_from(args)
    series = []
    for path in args.stats:
        series.append((Path(path).stem, summaries_from_json(Path(path).read_text())))
    if args.labels:
        if len(args.labels) != len(series):
            raise ValueError(f"got {len(args.labels)} labels for {len(series)} stats files")
        series = [(lab, summ) for lab, (_, summ) in zip(args.labels, series)]
    if args.panel:
        svg = render_panel(series, spec)
    else:
        if len(series) != 1:
            raise ValueError("multiple --stats files require --panel")
        svg = render_boxplots(series[0][1], spec)
    _atomic_write_text(args.out, svg)
    return 0


def _cmd_pipeline(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = simulate(scenario(args.scenario, args.seed))
    matrix = dataset.matrix
    _atomic_save_matrix(matrix, out_dir / "matrix.csv")
    _atomic_write_text(out_dir / "truth.json",
                       json.dumps(dataset.truth_dict(), indent=2) + "\n")

    raw_summaries = rle_summary(matrix, args.quantile_method, args.whisker_coef)
    _atomic_write_text(out_dir / "summaries_raw.json", summaries_to_json(raw_summaries))

    decomp = decompose(matrix, rank_tol=args.rank_tol)
    if args.p > decomp.rank:
        raise ValueError(f"--p {args.p} exceeds the residual's rank {decomp.rank}")
    _atomic_write_text(out_dir / "singular_values.json",
                       json.dumps(decomp.singular_values.tolist(), indent=2) + "\n")

    series = []
    for p in range(args.p + 1):
        corrected = ExpressionMatrix(decomp.corrected(p), matrix.sample_ids,
                                     matrix.feature_ids, matrix.groups)
        summaries = rle_summary(corrected, args.quantile_method, args.whisker_coef)
        _atomic_write_text(out_dir / f"summaries_p{p}.json", summaries_to_json(summaries))
        series.append((f"p = {p}", summaries))

    spec = RenderSpec(title="", width=args.width, height=args.height,
                      y_limits=None, zero_line=True)
    _atomic_write_text(out_dir / "rle_raw.svg",
                       render_boxplots(raw_summaries,
                                       RenderSpec(title=f"scenario {args.scenario}",
                                                  width=args.width, height=args.height)))
    _atomic_write_text(out_dir / "panel.svg", render_panel(series, spec))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rlekit",
        description="RLE diagnostics for unwanted variation in sample-by-feature matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rle", help="per-sample RLE boxplot summaries")
    _add_input_flags(p)
    _add_summary_flags(p)
    p.add_argument("--json", metavar="PATH", default=None, help="write summaries as JSON")
    p.add_argument("--csv", metavar="PATH", default=None, help="write summaries as CSV")
    p.set_defaults(func=_cmd_rle)

    p = sub.add_parser("boxplot", help="per-sample standard boxplot summaries")
    _add_input_flags(p)
    _add_summary_flags(p)
    p.add_argument("--json", metavar="PATH", default=None)
    p.add_argument("--csv", metavar="PATH", default=None)
    p.set_defaults(func=_cmd_boxplot)

    p = sub.add_parser("simulate", help="generate a synthetic scenario dataset")
    p.add_argument("--scenario", type=int, choices=SCENARIO_IDS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="PATH", help="matrix output file")
    p.add_argument("--truth", metavar="PATH", default=None,
                   help="ground-truth JSON output file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("decompose",
                       help="remove additive effect, partition the residual by SVD")
    _add_input_flags(p)
    _add_summary_flags(p)
    p.add_argument("--p", type=int, required=True,
                   help="number of rank-1 components to remove")
    p.add_argument("--rank-tol", type=float, default=defaults.RANK_TOL)
    p.add_argument("--center", choices=("sample", "gene"), default="sample")
    p.add_argument("--out-prefix", required=True, metavar="PREFIX")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("render", help="render summaries as an SVG figure")
    p.add_argument("--stats", nargs="+", required=True, metavar="PATH",
                   help="summary JSON file(s)")
    p.add_argument("--labels", nargs="+", default=None,
                   help="panel sub-titles (default: file stems)")
    p.add_argument("--panel", action="store_true",
                   help="lay the inputs out as a small-multiples grid")
    p.add_argument("--out", required=True, metavar="PATH")
    _add_render_flags(p)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("pipeline",
                       help="simulate, summarise, decompose, and render in one run")
    p.add_argument("--scenario", type=int, choices=SCENARIO_IDS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=int, default=6)
    p.add_argument("--rank-tol", type=float, default=defaults.RANK_TOL)
    _add_summary_flags(p)
    p.add_argument("--width", type=float, default=420.0)
    p.add_argument("--height", type=float, default=300.0)
    default_dir = os.environ.get("RLEKIT_OUT_DIR")
    p.add_argument("--out-dir", default=default_dir, required=default_dir is None,
                   help="output directory (default: $RLEKIT_OUT_DIR)")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def run(argv=None) -> int:
    """Parse ``argv`` and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"rlekit {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
