"""Command line front-end: oscbound verify|meanvalue|extremal|sweep|compare."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigError, OscboundError
from .runner import compare_runs, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscbound",
        description="Numerical verification of the oscillation-vs-norm interpolation bound")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (("verify", "run the solve/norms/inequality pipeline"),
                       ("meanvalue", "check the mean value property"),
                       ("extremal", "search for the sharpest oscillation ratio"),
                       ("sweep", "verify across the configured h and p lists, concurrently")):
        sp = sub.add_parser(name, help=desc)
        sp.add_argument("--config", required=True, help="experiment configuration file")
        sp.add_argument("--out", help="output directory (overrides the config)")
        sp.add_argument("--workers", type=int, default=1, help="worker cap for sweeps")
        sp.add_argument("--seed", type=int, help="seed override")
    spc = sub.add_parser("compare", help="refinement summary across verify CSVs")
    spc.add_argument("csvs", nargs="+", help="inequality.csv paths differing only in h")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "compare":
        try:
            report = compare_runs(args.csvs)
        except OscboundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(report.summary())
        return 0
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        for diag in exc.diagnostics:
            print(diag, file=sys.stderr)
        return 2
    cfg.mode = args.command
    if args.seed is not None:
        cfg.seed = args.seed
    try:
        return run(cfg, workers=args.workers, out_dir=args.out)
    except OscboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
