"""Top-level script environment for carverify.

``python3 -m carverify run`` runs the verification suites and prints a report;
``python3 -m carverify bench`` times the multiplication kernel.

Exit status is 0 if every check passed, 1 if some check failed and 2 for usage errors.

"""
import argparse
import logging
import sys
from typing import List, Optional

import marshmallow

import carverify.bench
import carverify.report
import carverify.schemas
import carverify.suites
from carverify import config

logger = logging.getLogger("carverify")

EXIT_USAGE = 2


def _suite_list(value: str) -> List[str]:
    return [name.strip() for name in value.split(",") if name.strip()]


common = argparse.ArgumentParser(add_help=False)
common.add_argument("-v", "--verbose", action="count", default=0, help="log INFO (-v) or DEBUG (-vv) to stderr")

parser = argparse.ArgumentParser(
    prog="car-verify", description="Verify the even-subalgebra isomorphism of CAR algebras."
)
subparsers = parser.add_subparsers(dest="command", required=True)

run_parser = subparsers.add_parser("run", parents=[common], help="run verification suites")
run_parser.add_argument("--dim-in", type=int, default=config.DEFAULT_DIM_IN)
run_parser.add_argument("--trials", type=int, default=config.DEFAULT_TRIALS)
run_parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
run_parser.add_argument("--tol", type=float, default=config.DEFAULT_TOL)
run_parser.add_argument("--format", choices=["json", "text"], default="json")
run_parser.add_argument("--suite", type=_suite_list, default=list(config.SUITE_NAMES), help="comma-separated")
run_parser.add_argument("--jobs", type=int, default=1)
run_parser.add_argument("--out", default=None)

bench_parser = subparsers.add_parser("bench", parents=[common], help="benchmark the multiplication kernel")
bench_parser.add_argument("--dim", type=int, required=True)
bench_parser.add_argument("--density", type=float, required=True)
bench_parser.add_argument("--reps", type=int, required=True)
bench_parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
bench_parser.add_argument("--kernel", choices=["sparse", "dense"], default=None)
bench_parser.add_argument("--format", choices=["json", "text"], default="json")
bench_parser.add_argument("--out", default=None)


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _run(args: argparse.Namespace) -> int:
    payload = {
        "dim_in": args.dim_in,
        "trials": args.trials,
        "seed": args.seed,
        "tol": args.tol,
        "format": args.format,
        "suites": args.suite,
        "jobs": args.jobs,
        "out": args.out,
    }
    try:
        cfg = carverify.schemas.SuiteConfig().load(payload)
    except marshmallow.ValidationError as exc:
        print(f"car-verify run: invalid configuration: {exc.messages}", file=sys.stderr)
        return EXIT_USAGE
    report = carverify.suites.run_suite(cfg)
    carverify.report.write_report(carverify.report.emit_report(report, cfg["format"]), cfg["out"])
    return carverify.report.exit_status(report)


def _bench(args: argparse.Namespace) -> int:
    try:
        report = carverify.bench.bench_multiply(args.dim, args.density, args.reps, args.seed, kernel=args.kernel)
    except ValueError as exc:
        print(f"car-verify bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    carverify.report.write_report(carverify.report.emit_report(report, args.format), args.out)
    return carverify.report.exit_status(report)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args.verbose)
    if args.command == "run":
        return _run(args)
    return _bench(args)


if __name__ == "__main__":
    sys.exit(main())
