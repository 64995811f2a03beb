"""Command-line entry point: ``orbicheck <command> [scenario] [flags]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .exactpoly import PolySyntaxError
from .geometry import GeometryError
from .runner import COMMANDS, run_command
from .scenario import ScenarioError, fixture_names, load_fixture, load_scenario


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="orbicheck",
        description="Orbifold base divisors and C-pair morphism checks on scenario files.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("target", nargs="?",
                    help="scenario file (orbibase/check/check-forms) or fixture name (fixture)")
    ap.add_argument("--report", choices=("text", "json"), default="text")
    ap.add_argument("--N", type=int, default=None, dest="N",
                    help="symmetric power for check-forms (default: lcm of the multiplicities)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--chart", default=None, help="restrict decomposition tables to one source chart")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = None
        if args.command == "fixture":
            if not args.target:
                print(f"orbicheck: fixture name required ({', '.join(fixture_names())})", file=sys.stderr)
                return 2
            scenario = load_fixture(args.target)
        elif args.command != "fuzz":
            if not args.target:
                print(f"orbicheck: {args.command} needs a scenario file", file=sys.stderr)
                return 2
            scenario = load_scenario(Path(args.target))
        report = run_command(args.command, scenario, N=args.N, chart=args.chart,
                             seed=args.seed, count=args.count)
    except (ScenarioError, PolySyntaxError, GeometryError, ValueError, OSError) as exc:
        print(f"orbicheck: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.render(args.report))
    if args.report == "json":
        sys.stdout.write("\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
