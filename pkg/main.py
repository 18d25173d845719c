#!/usr/bin/env python3

from __future__ import annotations

import logging
import sys
from argparse import ArgumentParser, ArgumentTypeError, Namespace
from pathlib import Path

from lib.commands import (
    cmd_basin,
    cmd_construct,
    cmd_search,
    cmd_selftest,
    cmd_threshold,
    cmd_yield_table,
)
from lib.constants import (
    CALIBRATED_ORIENTATION,
    MAXIMALITY_BUDGET,
    ExitCode,
    Orientation,
    SearchMode,
)
from lib.errors import TriorthoError
from lib.search import DEFAULT_NODE_BUDGET, DEFAULT_RESTARTS, SearchConfig


def coordinate_list(text: str) -> list[int]:
    try:
        return [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise ArgumentTypeError(f"Expected comma-separated coordinates, got {text!r}")


def parse_args(argv: list[str] | None = None) -> Namespace:
    parser = ArgumentParser(description="Qutrit triorthogonal codes for magic state distillation")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug output")
    parser.add_argument("-o", "--out", help="Output directory", default="./out")
    parser.add_argument(
        "--orientation",
        type=Orientation,
        choices=list(Orientation),
        default=CALIBRATED_ORIENTATION,
        help="Which logical class feeds eps1' (default: calibrated)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="Build T_m, puncture it, write H and a summary")
    construct.add_argument("--m", type=int, required=True)
    construct.add_argument("--k", type=int, required=True)
    construct.add_argument("--punctures", type=coordinate_list, help="1-indexed, e.g. 1,4,7")

    yields = sub.add_parser("yield", help="Yield parameters of the [6m+2, 3m-2, 2]_3 codes")
    yields.add_argument("--m-max", type=int, required=True)

    threshold = sub.add_parser(
        "threshold", help="Depolarizing threshold of the [9m-1, 1, 2]_3 code"
    )
    threshold.add_argument("--m", type=int, required=True)
    threshold.add_argument("--m-max", type=int, help="Also sweep m = 1..m_max")
    threshold.add_argument(
        "--alternating", action="store_true", help="Flip the orientation on every second round"
    )

    basin = sub.add_parser("basin", help="Basin-of-attraction grid over the twirled simplex")
    basin.add_argument("--m", type=int, required=True)
    basin.add_argument("--resolution", type=int, required=True)
    basin.add_argument("--workers", type=int, default=1)

    search = sub.add_parser("search", help="Search triorthogonal spaces up to permutation")
    search.add_argument("--n", type=int, required=True)
    search.add_argument("--kappa-min", type=int, help="Default: floor(n/3)")
    search.add_argument(
        "--mode", type=SearchMode, choices=list(SearchMode), default=SearchMode.EXHAUSTIVE
    )
    search.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="Node expansions")
    search.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--maximality-budget", type=int, default=MAXIMALITY_BUDGET)
    search.add_argument("--workers", type=int, default=1)
    search.add_argument("--checkpoint", help="Checkpoint file written after every level")
    search.add_argument("--resume", action="store_true", help="Continue from --checkpoint")

    selftest = sub.add_parser("selftest", help="Run the built-in verification suites")
    selftest.add_argument(
        "--basis", type=Path, help="Extra basis file for the triorthogonality suite"
    )

    return parser.parse_args(argv)


def run(args: Namespace) -> ExitCode:
    match args.command:
        case "construct":
            cmd_construct(args.m, args.k, args.out, args.punctures)
        case "yield":
            cmd_yield_table(args.m_max, args.out)
        case "threshold":
            cmd_threshold(args.m, args.out, args.orientation, args.alternating, args.m_max)
        case "basin":
            cmd_basin(args.m, args.resolution, args.out, args.orientation, args.workers)
        case "search":
            kappa_min = args.kappa_min if args.kappa_min is not None else max(1, args.n // 3)
            config = SearchConfig(
                args.n,
                kappa_min,
                budget=args.budget,
                mode=args.mode,
                seed=args.seed,
                restarts=args.restarts,
                maximality_budget=args.maximality_budget,
                workers=args.workers,
            )
            cmd_search(config, args.out, args.checkpoint, args.resume)
        case "selftest":
            if not cmd_selftest(args.orientation, args.basis):
                return ExitCode.INVARIANT
    return ExitCode.OK


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        code = run(args)
    except TriorthoError as e:
        print(f"[ERROR] {e}")
        return int(e.exit_code)
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
