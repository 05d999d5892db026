"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure (a check exceeded its
tolerance, or an input violated an invertibility precondition), 2 usage or
input-format error.  ``MFSERIES_TOL`` sets the default ``--tol``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .algebra import AlgebraContext
from .errors import MFSError, NotInvertible
from .freeprob import cumulants_from_moments, moments_from_cumulants, random_cumulants, s_transform, t_transform
from .freeprod import product_moment_triple, verify_twisted
from .ncoracle import product_moments
from .seriesfile import SeriesFile, SeriesFileError, dump, load

MAX_DIM = 3
MAX_ORDER = 6
MAX_ORACLE_DEGREE = 4

TRANSFORMS = {
    # name: (expected input kind, output kind)
    "moments-to-cumulants": ("moments", "cumulants"),
    "cumulants-to-moments": ("cumulants", "moments"),
    "s-transform": ("moments", "s-transform"),
    "t-transform": ("moments", "generic"),
}


def _default_tol(fallback: float) -> float:
    raw = os.environ.get("MFSERIES_TOL")
    if raw is None:
        return fallback
    try:
        return float(raw)
    except ValueError:
        raise SystemExit(f"MFSERIES_TOL is not a number: {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfseries",
        description="Operator-valued S-transform engine over M_d(C).")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify-twisted", help="random campaign for the twisted product formula")
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--order", type=int, default=5)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--scale", type=float, default=0.3)
    v.add_argument("--tol", type=float, default=_default_tol(1e-8))
    v.add_argument("--json", action="store_true", help="one JSON report per line")
    v.add_argument("--timing", action="store_true", help="include wall time (breaks byte determinism)")

    t = sub.add_parser("transform", help="apply one transform to a series file")
    t.add_argument("which", choices=sorted(TRANSFORMS))
    t.add_argument("--in", dest="inp", required=True, metavar="FILE")
    t.add_argument("--out", required=True, metavar="FILE")

    o = sub.add_parser("oracle-compare", help="product moments vs. non-crossing partition sum")
    o.add_argument("--dim", type=int, default=1)
    o.add_argument("--order", type=int, default=4)
    o.add_argument("--max-oracle-degree", type=int, default=3)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--scale", type=float, default=0.3)
    o.add_argument("--tol", type=float, default=_default_tol(1e-10))
    o.add_argument("--json", action="store_true")
    return parser


def _check_dims(parser, args) -> None:
    if not 1 <= args.dim <= MAX_DIM:
        parser.error(f"--dim must be in 1..{MAX_DIM}")
    if not 1 <= args.order <= MAX_ORDER:
        parser.error(f"--order must be in 1..{MAX_ORDER}")
    if args.tol < 0:
        parser.error("--tol must be nonnegative")
    if args.scale <= 0:
        parser.error("--scale must be positive")


def _fmt(values) -> str:
    return " ".join(f"{v:.1e}" for v in values)


def cmd_verify_twisted(args) -> int:
    ctx = AlgebraContext(args.dim)
    failures = 0
    for trial in range(args.trials):
        seed = args.seed + trial
        rng = np.random.default_rng(seed)
        c_x = random_cumulants(ctx, args.order, rng, args.scale)
        c_y = random_cumulants(ctx, args.order, rng, args.scale)
        report = verify_twisted(c_x, c_y, args.tol, seed=seed)
        failures += not report.passed
        if args.json:
            line = json.dumps(report.to_dict(timing=args.timing), sort_keys=True)
        else:
            line = (f"trial {trial} seed {seed} d={args.dim} N={args.order} "
                    f"{'PASS' if report.passed else 'FAIL'} max={report.max_deviation():.2e}\n"
                    f"  theorem {_fmt(report.theorem)}\n"
                    f"  psi2    {_fmt(report.psi2)}\n"
                    f"  ipsi    {_fmt(report.ipsi)}\n"
                    f"  phichi  {_fmt(report.phichi)}\n"
                    f"  lemma   {_fmt(report.lemma)}")
            if args.timing:
                line += f"\n  time    {report.wall_time:.3f}s"
        print(line, flush=True)
    if not args.json:
        print(f"{args.trials - failures}/{args.trials} trials passed at tol {args.tol:g}")
    return 1 if failures else 0


def cmd_transform(args) -> int:
    expected, out_kind = TRANSFORMS[args.which]
    try:
        sf = load(args.inp)
    except (OSError, SeriesFileError) as exc:
        print(f"error: cannot read {args.inp}: {exc}", file=sys.stderr)
        return 2
    if sf.kind != expected:
        print(f"error: {args.which} expects a '{expected}' file, got '{sf.kind}'", file=sys.stderr)
        return 2
    try:
        if args.which == "moments-to-cumulants":
            result = cumulants_from_moments(sf.series)
        elif args.which == "cumulants-to-moments":
            result = moments_from_cumulants(sf.series)
        elif args.which == "s-transform":
            result = s_transform(sf.series)
        else:
            result = t_transform(sf.series)
    except NotInvertible as exc:
        print(f"error: E[x] not invertible ({exc})", file=sys.stderr)
        return 1
    except (MFSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    dump(SeriesFile.wrap(result, out_kind), args.out)
    return 0


def cmd_oracle_compare(args) -> int:
    ctx = AlgebraContext(args.dim)
    rng = np.random.default_rng(args.seed)
    c_x = random_cumulants(ctx, args.order, rng, args.scale)
    c_y = random_cumulants(ctx, args.order, rng, args.scale)
    triple = product_moment_triple(c_x, c_y)
    devs = []
    for n in range(args.max_oracle_degree + 1):
        brute = product_moments(c_x, c_y, n).coeffs
        devs.append(float(np.max(np.abs(brute - triple.phi.coeffs[n]))))
    passed = max(devs) <= args.tol
    if args.json:
        print(json.dumps({"seed": args.seed, "dim": args.dim, "order": args.order,
                          "tolerance": args.tol, "deviation": devs, "passed": passed},
                         sort_keys=True))
    else:
        for n, dev in enumerate(devs):
            print(f"degree {n}: {dev:.2e}")
        print("PASS" if passed else "FAIL")
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify-twisted":
        _check_dims(parser, args)
        if args.trials < 1:
            parser.error("--trials must be positive")
        return cmd_verify_twisted(args)
    if args.command == "oracle-compare":
        _check_dims(parser, args)
        if not 0 <= args.max_oracle_degree <= MAX_ORACLE_DEGREE:
            parser.error(f"--max-oracle-degree must be in 0..{MAX_ORACLE_DEGREE}")
        if args.max_oracle_degree > args.order:
            parser.error("--max-oracle-degree cannot exceed --order")
        return cmd_oracle_compare(args)
    return cmd_transform(args)


if __name__ == "__main__":
    sys.exit(main())
