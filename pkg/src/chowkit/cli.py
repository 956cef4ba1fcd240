"""Command-line entry point: ``verify``."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from chowkit.defs import DefsError, parse_defs
from chowkit.runner import run_checks


def shipped_defs() -> str:
    return resources.files("chowkit").joinpath("data/suite.defs").read_text(encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify",
                                description="Run intersection-theory checks and report the results.")
    p.add_argument("--defs", type=Path, help="defs file to run (default: the shipped suite)")
    p.add_argument("--check", help="comma-separated check ids to run")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--confluence-degree", type=int, metavar="N",
                   help="also test confluence of every ring up to degree N")
    p.add_argument("--jobs", type=int, default=1, help="number of worker threads")
    p.add_argument("--no-timings", action="store_true",
                   help="report 0 ms for every check so output is reproducible")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.defs.read_text(encoding="utf-8") if args.defs else shipped_defs()
    except OSError as exc:
        print(f"verify: cannot read defs file: {exc}", file=sys.stderr)
        return 2
    try:
        defs = parse_defs(text)
    except DefsError as exc:
        name = args.defs or "suite.defs"
        print(f"verify: {name}: {exc}", file=sys.stderr)
        return 2
    ids = None
    if args.check is not None:
        ids = [s.strip() for s in args.check.split(",") if s.strip()]
    if args.confluence_degree is not None and args.confluence_degree < 0:
        print("verify: --confluence-degree must be >= 0", file=sys.stderr)
        return 2
    try:
        report = run_checks(defs, ids=ids, jobs=max(1, args.jobs), timings=not args.no_timings,
                            confluence_degree=args.confluence_degree)
    except KeyError as exc:
        print(f"verify: {exc.args[0]}", file=sys.stderr)
        return 2
    out = report.dumps() if args.format == "json" else report.to_text()
    sys.stdout.write(out)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
