"""Command line: ``stochdisc run | sweep | verify``.

Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ALGORITHMS, FORMATS, KINDS, OUT_DIR_ENV, ConfigError, ExperimentConfig, default_out_dir, parse_seeds
from .runner import HarnessIOError, run_experiment, sweep, write_sweep
from .verify import SUITES, verify

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("stochdisc")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--seeds", default="0", help='"3", "1,2,7", "1..5" or "20@100" (count@base)')
    p.add_argument("--algo", default="potential", choices=ALGORITHMS)
    p.add_argument("--C", type=float, default=1.0, help="height divisor")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="override 1/ln n")
    p.add_argument("--out", type=Path, default=None, help=f"output file (default under ${OUT_DIR_ENV})")
    p.add_argument("--format", default="csv", choices=FORMATS)
    p.add_argument("--height", type=int, default=4, help="tightness fixture height")
    p.add_argument("--arity", type=int, default=4, help="tightness fixture arity")
    p.add_argument("--samples", type=int, default=None, help="facts-check / path samples")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identical output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochdisc", description="Online discrepancy experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one row per seed")
    _common(run)
    run.add_argument("--n", type=int, required=True)

    sw = sub.add_parser("sweep", help="growth table over several n")
    _common(sw)
    sw.add_argument("--n-list", required=True, help="comma-separated, increasing")
    sw.add_argument("--algos", default=None, help="comma-separated algorithms to compare (default: --algo)")

    ver = sub.add_parser("verify", help="oracle and invariant suites")
    ver.add_argument("--suite", required=True, help=f"one of {', '.join(SUITES)}, or all")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--report", type=Path, default=None, help="write the JSON report here too")
    return parser


def _config(args, n: int) -> ExperimentConfig:
    return ExperimentConfig(
        kind=args.kind,
        n=n,
        seeds=parse_seeds(args.seeds),
        algorithm=args.algo,
        C=args.C,
        lam=args.lam,
        out=args.out,
        format=args.format,
        height=args.height,
        arity=args.arity,
        samples=args.samples,
        timing=args.timing,
        workers=args.workers,
    )


def _default_out(args, stem: str):
    if args.out is None:
        args.out = default_out_dir() / f"{stem}.{args.format}"


def _run(args) -> int:
    _default_out(args, f"{args.kind}-{args.algo}-n{args.n}")
    rows = run_experiment(_config(args, args.n))
    log.info("wrote %d rows to %s", len(rows), args.out)
    return EXIT_OK


def _sweep(args) -> int:
    try:
        ns = [int(s) for s in args.n_list.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad --n-list {args.n_list!r}") from None
    if not ns:
        raise ConfigError("--n-list is empty")
    _default_out(args, f"sweep-{args.kind}")
    algos = args.algos.split(",") if args.algos else [args.algo]
    for a in algos:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}")
    base = _config(args, ns[0])
    try:
        result = sweep(base, ns, algos)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        write_sweep(result, args.out, args.format)
    except OSError as exc:
        raise HarnessIOError(f"writing {args.out}: {exc}", result.rows) from exc
    for alg, slope in result.slopes.items():
        print(f"{alg}: slope={'n/a' if slope is None else f'{slope:.3f}'}")
    return EXIT_OK


def _verify(args) -> int:
    try:
        reports = verify(args.suite, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    doc = {"passed": all(r.passed for r in reports), "suites": [r.as_dict() for r in reports]}
    text = json.dumps(doc, indent=2)
    print(text)
    if args.report:
        try:
            args.report.write_text(text + "\n")
        except OSError as exc:
            raise HarnessIOError(f"writing {args.report}: {exc}", []) from exc
    return EXIT_OK if doc["passed"] else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"run": _run, "sweep": _sweep, "verify": _verify}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HarnessIOError as exc:
        print(f"I/O error: {exc} ({len(exc.rows)} rows completed)", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
