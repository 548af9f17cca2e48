"""Command-line entry point.

Examples:
    twinsep --limit 18409201 --checkpoint twin:1000 --checkpoint twin:100000 --out runs/desk
    twinsep --limit 1000000 --checkpoint n:100000 --checkpoint n:1000000 --out runs/limits
    twinsep --limit 1000 --external counts.csv --out runs/fig4
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .decay_fit import FitOptions, Weighting
from .errors import TwinsepError
from .pipeline import Convention, RunConfig, run
from .prime_sieve import DEFAULT_SEGMENT_SIZE
from .twin_scan import CheckpointSpec


def _natural(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}") from None
    if not val.is_integer() or val < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return int(val)


def _checkpoint(text: str) -> CheckpointSpec:
    kind, sep, value = text.partition(":")
    if not sep or kind not in ("twin", "n"):
        raise argparse.ArgumentTypeError(f"checkpoint must be twin:<k> or n:<N>, got {text!r}")
    n = _natural(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"checkpoint value must be positive: {text!r}")
    return CheckpointSpec("twins" if kind == "twin" else "limit", n)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="twinsep",
        description="Sieve primes, tabulate separations between twin primes, "
                    "fit the constrained decay law at checkpoints.",
    )
    p.add_argument("--limit", type=_natural, required=True, help="sieve upper bound N (inclusive)")
    p.add_argument("--checkpoint", type=_checkpoint, action="append", default=[],
                   metavar="twin:K|n:N",
                   help="freeze statistics after the K-th twin or at N; repeatable")
    p.add_argument("--segment-size", type=_natural, default=DEFAULT_SEGMENT_SIZE)
    p.add_argument("--workers", type=_natural, default=1, help="sieve worker processes")
    p.add_argument("--weighting", choices=[w.value for w in Weighting], default=Weighting.COUNTS.value,
                   help="bin weights in the fit; 'uniform' reproduces the published slopes")
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--max-iterations", type=_natural, default=200)
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--external", type=Path, help="published counts file (N,pi1,pi2) for m0")
    p.add_argument("--raw-counts", action="store_true", help="add raw and adjusted counts to summary.csv")
    p.add_argument("--verify-table1", action="store_true",
                   help="detect the count convention against the published table and report deltas")
    p.add_argument("--pi1-offset", type=int, default=Convention.pi1_offset,
                   help="reported pi1 = pi(N) - offset (default %(default)s)")
    p.add_argument("--pi2-offset", type=int, default=Convention.pi2_offset,
                   help="reported pi2 = twins from (5,7) + offset (default %(default)s)")
    p.add_argument("--timing", action="store_true", help="record wall time in metadata.json")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = RunConfig(
            limit=args.limit,
            checkpoints=args.checkpoint,
            output_dir=args.out,
            fit_options=FitOptions(Weighting(args.weighting), args.tolerance, args.max_iterations),
            emit_raw_counts=args.raw_counts,
            segment_size=args.segment_size,
            workers=args.workers,
            convention=Convention(args.pi1_offset, args.pi2_offset),
            verify_table1=args.verify_table1,
            external=args.external,
            record_timing=args.timing,
        )
        result = run(config)
    except (TwinsepError, ValueError, OSError) as exc:
        print(f"twinsep: error: {exc}", file=sys.stderr)
        return 2

    for row in result.rows:
        slope = f"{row.slope:.6f} +- {row.stat_error:.5f}" if row.slope is not None else row.status
        print(f"pi2={row.pi2} pi1={row.pi1} N={row.N}: m = {slope}")
    if result.model:
        print(f"C = {result.model.C:.4f} +- {result.model.C_err:.4f} ({result.model.points_used} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
