"""Command-line front end.

Commands: ``project``, ``verify``, ``sample-study``, ``optimize``, ``bench``.
Exit codes are stable: 0 success, 1 validation error (bad arguments, files,
or configuration), 2 numerical failure (failed checks, residuals out of
tolerance, degenerate or diverging runs).

stdout carries data (a human summary line, or one JSON object when ``--json``
is set); stderr carries diagnostics.  All randomness flows from ``--seed``.
Commands that write delimited tables also render a PNG figure alongside
unless ``--no-figures`` is given; the CSV stays the canonical data interface.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import fileio
from .blocks import BlockLayout, magnitude_bounds
from .errors import (
    DegenerateInputError,
    DivergenceError,
    OracleFailureError,
    ValidationError,
    WgnoiseError,
)
from .feasible import cosine_similarity_study, project_to_feasible
from .harness import load_scenario, run_comparison
from .verify import SUITES, run_suite

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

# Relative per-block residual tolerance considered a successful projection.
RESIDUAL_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse defaults to exit code 2, which this tool reserves for
        # numerical failure; usage problems are validation errors.
        raise ValidationError(message)


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _parse_seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def cmd_project(args) -> int:
    latent = fileio.read_latent(args.input)
    n = latent.shape[0]
    if n % (2 * args.block_size) != 0:
        raise ValidationError(
            f"latent length {n} is not divisible by 2*block_size = {2 * args.block_size}"
        )
    layout = BlockLayout.for_dimension(n, args.block_size)
    report = project_to_feasible(latent, layout, seed=args.seed)
    fileio.write_latent(args.output, report.output)

    payload = {
        "schema_version": SCHEMA_VERSION,
        "block_size": args.block_size,
        "seed": args.seed,
        **report.summary_dict(),
    }
    if args.report_path:
        with open(args.report_path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, sort_keys=True, indent=2)
            handle.write("\n")

    tol = RESIDUAL_TOL * args.block_size
    ok = report.max_block_l1_residual < tol and report.max_block_l2_residual < tol
    if args.json:
        _emit_json(payload)
    else:
        cos = "undefined" if report.cosine_similarity is None else f"{report.cosine_similarity:.6f}"
        print(
            f"projected n={n} B={args.block_size}: cosine={cos} "
            f"distance={report.distance:.6g} max_residual="
            f"{max(report.max_block_l1_residual, report.max_block_l2_residual):.3g}"
        )
    if not ok:
        print("feasibility residuals exceed tolerance", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, seed=args.seed)
    passed = all(c.passed for c in checks)
    if args.json:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "suite": args.suite,
                "seed": args.seed,
                "passed": passed,
                "checks": [
                    {
                        "name": c.name,
                        "measured": c.measured,
                        "threshold": c.threshold,
                        "passed": c.passed,
                    }
                    for c in checks
                ],
            }
        )
    else:
        for c in checks:
            print(c.line())
        print(f"suite {args.suite}: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_NUMERICAL


def cmd_sample_study(args) -> int:
    layout = BlockLayout.for_dimension(args.n, args.block_size)
    result, cosines = cosine_similarity_study(
        args.samples, args.n, layout, seed=args.seed, workers=args.workers
    )
    out_csv = Path(args.out_csv)
    fileio.write_csv(out_csv, ("sample", "cosine"), enumerate(cosines.tolist()))
    summary = {
        "schema_version": SCHEMA_VERSION,
        "n": args.n,
        "block_size": args.block_size,
        **result.summary_dict(),
    }
    out_json = Path(args.out_json) if args.out_json else out_csv.with_suffix(".json")
    with open(out_json, "w", encoding="utf-8") as handle:
        json.dump(summary, handle, sort_keys=True, indent=2)
        handle.write("\n")
    if not args.no_figures:
        from .figures import render_study_figure

        render_study_figure(cosines, result, out_csv.with_suffix(".png"))
    if args.json:
        _emit_json(summary)
    else:
        print(
            f"{result.sample_count} samples, n={args.n} B={args.block_size}: "
            f"min={result.min_cos:.6f} p01={result.p01_cos:.6f} mean={result.mean_cos:.6f}"
        )
    return EXIT_OK


def _write_comparison_outputs(result, out_dir: Path, no_figures: bool) -> list[dict]:
    rows = []
    fileio.write_csv(
        out_dir / "comparison.csv",
        ("mode", "final_value", "max_magnitude", "max_residual", "cos_to_init"),
        (
            (r.mode, r.final_value, r.max_magnitude, r.max_residual, r.cos_to_init)
            for r in result.rows
        ),
    )
    for row in result.rows:
        rows.append(
            {
                "mode": row.mode,
                "final_value": row.final_value,
                "max_magnitude": row.max_magnitude,
                "max_residual": row.max_residual,
                "cos_to_init": row.cos_to_init,
            }
        )
        print(f"mode {row.mode}: wall time {row.wall_time_s:.3f}s", file=sys.stderr)
    for mode, trajectory in result.trajectories.items():
        trajectory.write_csv(out_dir / f"trajectory_{mode}.csv")
        if trajectory.final_latent is not None:
            fileio.write_latent(out_dir / f"final_{mode}.wgnl", trajectory.final_latent)
    if not no_figures and result.trajectories:
        from .figures import render_trajectory_figure

        layout = BlockLayout.for_dimension(result.config.n, result.config.block_size)
        render_trajectory_figure(
            result.trajectories,
            out_dir / "trajectories.png",
            cap=magnitude_bounds(layout).max ** 2,
        )
    return rows


def cmd_optimize(args) -> int:
    scenario = load_scenario(args.scenario)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        result = run_comparison(scenario)
    except DivergenceError as exc:
        partial = getattr(exc, "partial_result", None)
        if partial is not None:
            _write_comparison_outputs(partial, out_dir, args.no_figures)
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    rows = _write_comparison_outputs(result, out_dir, args.no_figures)
    if args.json:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "scenario": scenario.to_json_dict(),
                "out_dir": str(out_dir),
                "rows": rows,
            }
        )
    else:
        for row in result.rows:
            print(
                f"{row.mode}: final={row.final_value:.6g} max|y|={row.max_magnitude:.4f} "
                f"residual={row.max_residual:.3g} cos_to_init={row.cos_to_init:.4f}"
            )
    return EXIT_OK


def cmd_bench(args) -> int:
    n_list = [int(tok) for tok in args.n_list.split(",") if tok.strip()]
    report = bench_mod.run_bench(
        n_list, block_size=args.block_size, repeats=args.repeats, seed=args.seed
    )
    points = [
        {
            "n": p.n,
            "median_total_s": p.median_total_s,
            "median_fft_s": p.median_fft_s,
            "median_blocks_s": p.median_blocks_s,
            "fft_fraction": p.fft_fraction,
        }
        for p in report.points
    ]
    ratios = [[n, ratio] for n, ratio in report.doubling_ratios()]
    if args.out_csv:
        fileio.write_csv(
            args.out_csv,
            ("n", "median_total_s", "median_fft_s", "median_blocks_s", "fft_fraction"),
            (
                (p.n, p.median_total_s, p.median_fft_s, p.median_blocks_s, p.fft_fraction)
                for p in report.points
            ),
        )
        if not args.no_figures:
            from .figures import render_bench_figure

            render_bench_figure(report, Path(args.out_csv).with_suffix(".png"))
    if args.json:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "block_size": args.block_size,
                "repeats": args.repeats,
                "points": points,
                "doubling_ratios": ratios,
            }
        )
    else:
        for p in report.points:
            print(
                f"n={p.n}: total={p.median_total_s * 1e3:.3f}ms "
                f"fft={p.median_fft_s * 1e3:.3f}ms blocks={p.median_blocks_s * 1e3:.3f}ms "
                f"fft_fraction={p.fft_fraction:.2f}"
            )
        for n, ratio in ratios:
            print(f"time({2 * n})/time({n}) = {ratio:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wgnoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a latent file onto the feasible set")
    p.add_argument("input", help="input latent (WGNL binary)")
    p.add_argument("output", help="output latent (WGNL binary)")
    p.add_argument("--block-size", type=int, default=16)
    p.add_argument("--seed", type=_parse_seed, default=0)
    p.add_argument("--report-path", default=None, help="write a JSON projection report")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--seed", type=_parse_seed, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample-study", help="cosine-similarity study over Gaussian draws")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--n", type=int, default=65536)
    p.add_argument("--block-size", type=int, default=16)
    p.add_argument("--seed", type=_parse_seed, default=0)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sample_study)

    p = sub.add_parser("optimize", help="run a scenario comparison")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("bench", help="projection timing sweep")
    p.add_argument("--n-list", required=True, help="comma-separated latent lengths")
    p.add_argument("--block-size", type=int, default=16)
    p.add_argument("--repeats", type=int, default=9)
    p.add_argument("--seed", type=_parse_seed, default=0)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DegenerateInputError, OracleFailureError, DivergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except WgnoiseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
