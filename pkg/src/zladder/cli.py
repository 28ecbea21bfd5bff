"""Command-line front end: configuration, cache, dispatch, emission.

Reports are written one file per experiment (CSV or JSON, 17 significant
digits, LF line endings) plus a ``manifest.json`` echoing the
configuration, versions, spec hashes, wall times, and every failed gate.
Unless ``--no-figures`` is given, each report is also rendered to a PNG
alongside its delimited output.

Exit status: 0 when every hard-gated row passed, 1 when a hard gate
failed, 2 for argument errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__
from .cache import FileCache
from .config import DEFAULT_X_GRID, EXPERIMENTS, RunConfig, parse_band_overrides
from .experiments import RUNNERS, Workspace
from .quadrature import QuadSpec
from .zeta import ZEvalConfig

CACHE_ENV = "ZLADDER_CACHE_DIR"

CSV_HEADER = "experiment,label,lhs,rhs,error_scale,ratio,gate,pass"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _row_record(experiment, row):
    return {
        "experiment": experiment,
        "label": row.label,
        "lhs": row.lhs,
        "rhs": row.rhs,
        "error_scale": row.error_scale,
        "ratio": row.ratio,
        "gate": row.gate,
        "pass": row.passed,
    }


def report_csv_body(report) -> str:
    lines = [CSV_HEADER]
    for row in report.rows:
        ratio = _fmt(row.ratio) if row.ratio is not None else ""
        passed = "" if row.passed is None else str(row.passed).lower()
        lines.append(",".join([
            report.experiment_id, row.label, _fmt(row.lhs), _fmt(row.rhs),
            _fmt(row.error_scale), ratio, row.gate, passed,
        ]))
    return "\n".join(lines) + "\n"


def report_json_body(report) -> str:
    rows = [_row_record(report.experiment_id, r) for r in report.rows]
    return json.dumps({"experiment": report.experiment_id,
                       "params": report.params, "rows": rows},
                      indent=2, sort_keys=True) + "\n"


def build_parser():
    p = argparse.ArgumentParser(
        prog="zladder",
        description="Hardy-Z quadrature on disconnected Gram sets: compute "
                    "both sides of the heterogeneous formulae and emit "
                    "comparison reports.")
    p.add_argument("--experiment", action="append", default=None,
                   help=f"one of {', '.join(EXPERIMENTS)}; repeat or "
                        "comma-separate for several (default: selfcheck)")
    p.add_argument("--T", type=float, required=True,
                   help="base height T in [1e4, 1e9]")
    p.add_argument("--epsilon", type=float, default=0.05,
                   help="window exponent epsilon (default 0.05)")
    p.add_argument("--x", type=float, default=0.5 * math.pi,
                   help="window half-phase x in (0, pi/2]")
    p.add_argument("--y", type=float, default=0.5 * math.pi,
                   help="window half-phase y in (0, pi/2]")
    p.add_argument("--x-grid", type=str, default=None,
                   help="comma list of x values for grid rows")
    p.add_argument("--terms", type=int, default=1,
                   help="Riemann-Siegel correction terms 0..4 (default 1)")
    p.add_argument("--panels-per-osc", type=float, default=4.0,
                   help="quadrature panels per oscillation (default 4)")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="quadrature refinement tolerance (default 1e-6)")
    p.add_argument("--cache-dir", type=str,
                   default=os.environ.get(CACHE_ENV),
                   help=f"cache directory (default: ${CACHE_ENV})")
    p.add_argument("--out", type=str, default=".",
                   help="output directory for reports and the manifest")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=0,
                   help="cap on internal parallelism (evaluation is "
                        "vectorized single-process; recorded in manifest)")
    p.add_argument("--band-overrides", type=str, default="",
                   help="comma list key=lo:hi (or key=value) band overrides")
    p.add_argument("--no-figures", action="store_true",
                   help="skip rendering PNG figures next to the reports")
    return p


def config_from_args(args) -> RunConfig:
    experiments = []
    for item in args.experiment or ["selfcheck"]:
        experiments.extend(e.strip() for e in item.split(",") if e.strip())
    grid = DEFAULT_X_GRID
    if args.x_grid:
        grid = tuple(float(v) for v in args.x_grid.split(","))
    return RunConfig(
        T=args.T, epsilon=args.epsilon, x=args.x, y=args.y, x_grid=grid,
        quad=QuadSpec(panels_per_oscillation=args.panels_per_osc,
                      refine_tol=args.tol),
        z_cfg=ZEvalConfig(correction_order=args.terms),
        experiments=tuple(experiments),
        cache_dir=args.cache_dir, out_dir=args.out,
        output_format=args.format, workers=args.workers,
        figures=not args.no_figures,
        bands=parse_band_overrides(args.band_overrides),
    )


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache = FileCache(cfg.cache_dir) if cfg.cache_dir else None
    ws = Workspace(cfg, cache)

    manifest = {
        "version": __version__,
        "config": {
            "T": cfg.T, "epsilon": cfg.epsilon, "x": cfg.x, "y": cfg.y,
            "x_grid": list(cfg.x_grid), "experiments": list(cfg.experiments),
            "format": cfg.output_format, "workers": cfg.workers,
            "correction_order": cfg.z_cfg.correction_order,
            "quad": {"panels_per_oscillation": cfg.quad.panels_per_oscillation,
                     "nodes_per_panel": cfg.quad.nodes_per_panel,
                     "refine_tol": cfg.quad.refine_tol},
            "bands": {k: list(v) if isinstance(v, tuple) else v
                      for k, v in cfg.bands.items()},
        },
        "spec_hashes": {"quad": cfg.quad.spec_hash(), "omega": "omega-v1"},
        "reports": {},
        "failures": {},
        "hard_failures": {},
    }

    exit_code = 0
    for name in cfg.experiments:
        t0 = time.time()
        report = RUNNERS[name](cfg, ws)
        wall = time.time() - t0
        stem = out_dir / f"report_{name}"
        if cfg.output_format == "csv":
            path = stem.with_suffix(".csv")
            path.write_text(report_csv_body(report), encoding="utf-8")
        else:
            path = stem.with_suffix(".json")
            path.write_text(report_json_body(report), encoding="utf-8")
        entry = {"file": path.name, "wall_seconds": wall,
                 "rows": len(report.rows)}
        if cfg.figures:
            from .figures import render_report
            fig_path = render_report(report, stem.with_suffix(".png"))
            if fig_path is not None:
                entry["figure"] = Path(fig_path).name
        manifest["reports"][name] = entry
        manifest["failures"][name] = report.failures()
        manifest["hard_failures"][name] = report.hard_failures()
        if report.hard_failures():
            exit_code = 1
        for label in report.failures():
            print(f"[{name}] gate failed: {label}", file=sys.stderr)

    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
