"""Command line entry point: ``offsetcate {example1,sweep,correlated,collapsibility}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from . import plots


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" on every platform so repeated runs compare byte for byte
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _summary(name, n_rows, n_failed):
    print(f"{name}: {n_rows} rows, {n_failed} not converged", file=sys.stderr)


def cmd_example1(args, sweep):
    results = ex.run_example1(sweep.or_u)
    sol, grid = ex.example1_to_csv(results)
    _write(args.out / "example1_solutions.csv", sol)
    _write(args.out / "example1_loglik_grid.csv", grid)
    if args.svg:
        _write(args.out / "example1.svg", plots.example1_svg(results))
    failed = sum(not (r.full.converged and r.offset.converged) for r in results)
    _summary("example1", len(results), failed)
    return failed


def _sweep_common(name, rows, args, alphas=(None,)):
    _write(args.out / f"{name}.csv", ex.rows_to_csv(rows))
    if args.svg:
        for a in alphas:
            suffix = "" if a is None else f"_alpha{a:g}"
            _write(args.out / f"{name}{suffix}.svg", plots.sweep_svg(rows, alpha=a))
    failed = sum(not r.converged for r in rows)
    _summary(name, len(rows), failed)
    return failed


def cmd_sweep(args, sweep):
    return _sweep_common("sweep", ex.run_covariate_sweep(sweep, jobs=args.jobs), args)


def cmd_correlated(args, sweep):
    rows = ex.run_correlated_sweep(sweep, jobs=args.jobs)
    return _sweep_common("correlated", rows, args, alphas=sweep.alpha)


def cmd_collapsibility(args, sweep):
    _write(args.out / "collapsibility.csv", ex.collapsibility_to_csv(ex.run_collapsibility_table()))
    if args.svg:
        _write(args.out / "collapsibility.svg", plots.collapsibility_svg(sweep.beta_t, sweep.p_x))
    return 0


COMMANDS = {
    "example1": cmd_example1,
    "sweep": cmd_sweep,
    "correlated": cmd_correlated,
    "collapsibility": cmd_collapsibility,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offsetcate",
        description="Exact offset-model CATE experiments on binary causal models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--config", type=Path, help="key = value sweep configuration")
        p.add_argument("--format", choices=("csv", "csv+svg"), default="csv")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for grid cells")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        print("--jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        sweep = ex.load_config(args.config) if args.config else ex.SweepSpec()
    except (OSError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    args.svg = args.format == "csv+svg"
    failed = COMMANDS[args.command](args, sweep)
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
