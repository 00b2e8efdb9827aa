"""Command-line verification harness.

    sol04 [--format json|csv] [--seed N] COMMAND [options]

Prints a report on standard output; exit code 0 if every check passes, 1 if
any fails, 2 on usage or input errors.  ``SOL4_CONFIG`` may name a
``key = value`` file overriding :class:`RunConfig` defaults.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import acceptance as acc
from . import ambient
from . import catalog as cat
from . import reconstruct as rc
from .report import ANCHORS, Check, RunConfig, VerificationReport, load_config
from .solgroup import Point

# inputs typed with a few digits are renormalized if this close to the unit sphere
INPUT_NORM_TOL = 1e-5


class UsageError(Exception):
    pass


def _floats(text: str, n: int) -> np.ndarray:
    try:
        vals = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return np.array(vals)


def _family(text: str) -> str:
    tag = text.upper()
    if tag not in cat.FAMILIES:
        raise argparse.ArgumentTypeError(f"unknown family {text!r} (choose m1, m2, m3, m4)")
    return tag


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="sol04", parents=[common],
                                     description="Verify homogeneous hypersurfaces of Sol_0^4.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("verify-ambient", parents=[common], help="connection and curvature identities")

    p = sub.add_parser("verify-family", parents=[common], help="invariants of one family over the r-grid")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--r", type=float, action="append", help="radius (repeatable; default: r-grid)")

    p = sub.add_parser("reconstruct", parents=[common], help="rebuild a case and match it to a family")
    p.add_argument("--case", required=True, choices=rc.CASES)
    for name in ("a", "b", "c", "d"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--a-sign", type=int, choices=(-1, 1), default=-1, help="sign of a in case I_iii")

    p = sub.add_parser("tube", parents=[common], help="normal geodesics from the focal plane land on M1")
    p.add_argument("--r", type=float, action="append")
    p.add_argument("--n", type=int, default=10, help="random geodesics per radius")

    p = sub.add_parser("parallel", parents=[common], help="normal geodesics from M2(0) / M3(0)")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--r", type=float, action="append")

    p = sub.add_parser("orbit", parents=[common], help="subgroup orbits preserve the family")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--n", type=int, default=100)

    p = sub.add_parser("curvature", parents=[common], help="curvature of a plane at a point")
    p.add_argument("--point", type=lambda s: _floats(s, 4), default=np.zeros(4), help="x,y,z,t")
    p.add_argument("--x", type=lambda s: _floats(s, 4), required=True, help="frame coefficients of X")
    p.add_argument("--y", type=lambda s: _floats(s, 4), required=True, help="frame coefficients of Y")

    sub.add_parser("all", parents=[common], help="the full acceptance suite")
    return parser


def _unit(vals: dict, keys) -> dict:
    v = np.array([vals[k] for k in keys])
    s = float(v @ v)
    if abs(s - 1) > INPUT_NORM_TOL:
        raise UsageError(f"{'^2 + '.join(keys)}^2 = {s:.9g}, not 1")
    if abs(s - 1) > rc.CONSTRAINT_TOL:
        print(f"note: renormalized ({', '.join(keys)}) from norm^2 = {s:.9g}", file=sys.stderr)
    v = v / math.sqrt(s)
    return dict(zip(keys, v.tolist()))


def case_label(args) -> rc.CaseLabel:
    given = {k: getattr(args, k) for k in ("a", "b", "c", "d") if getattr(args, k) is not None}

    def need(*keys):
        missing = [k for k in keys if k not in given]
        if missing:
            raise UsageError(f"case {args.case} needs --{' --'.join(missing)}")

    if args.case == "I_i":
        need("d")
        d = given["d"]
        a0 = given.get("a", 0.0)
        b0 = given.get("b", math.sqrt(max(0.0, 1 - d * d - a0 * a0)))
        vals = _unit({"a0": a0, "b0": b0, "d": d}, ("a0", "b0", "d"))
        return rc.CaseLabel("I_i", vals)
    if args.case == "I_ii":
        need("a", "b", "d")
        return rc.CaseLabel("I_ii", _unit(given, ("a", "b", "d")))
    if args.case == "I_iii":
        need("d")
        return rc.CaseLabel("I_iii", {"d": given["d"], "a_sign": args.a_sign})
    if args.case == "II":
        need("c", "d")
        return rc.CaseLabel("II", _unit(given, ("c", "d")))
    return rc.CaseLabel("III")


def curvature_report(point, X, Y, cfg: RunConfig) -> VerificationReport:
    """Sectional curvature and R(X, Y)Y for frame coefficients X, Y (the frame is left invariant)."""
    Point.of(point)   # validates the point
    rep = VerificationReport("curvature")
    K = ambient.sectional_arrays(X, Y)
    RXYY = ambient.curvature_arrays(X, Y, Y)
    rep.add(Check("curvature/sectional", K, math.inf, ANCHORS["curvature"], passed=True))
    for i, v in enumerate(RXYY, 1):
        rep.add(Check(f"curvature/R(X,Y)Y_{i}", v, math.inf, ANCHORS["curvature"], passed=True))
    rep.add("curvature/formula_vs_table", np.max(np.abs(ambient.curvature_formula(X, Y, Y) - RXYY)),
            cfg.tol_ambient, ANCHORS["curvature"])
    rep.add("curvature/symmetry", K - ambient.sectional_arrays(Y, X), cfg.tol_ambient, ANCHORS["curvature"])
    return rep


def _radii(args, cfg, positive=False):
    rs = args.r if args.r else cfg.r_grid
    return [r for r in rs if r > 0] if positive else list(rs)


def execute(args, cfg: RunConfig) -> VerificationReport:
    cmd = args.command
    if cmd == "verify-ambient":
        return acc.ambient_report(cfg)
    if cmd == "verify-family":
        if args.family == "M4":
            rs = [0.0]
        else:
            rs = _radii(args, cfg, positive=args.family == "M1")
        rng = np.random.default_rng(cfg.seed)
        rep = VerificationReport(f"family {args.family}")
        for r in rs:
            rep.extend(acc.family_report(args.family, r, cfg, rng))
        return rep
    if cmd == "reconstruct":
        return acc.reconstruct_report(case_label(args), cfg)
    if cmd == "tube":
        return acc.tube_report(_radii(args, cfg, positive=True), args.n, cfg)
    if cmd == "parallel":
        if args.family not in ("M2", "M3"):
            raise UsageError("parallel families are m2 and m3")
        return acc.parallel_report(args.family, _radii(args, cfg, positive=True), cfg)
    if cmd == "orbit":
        r = 0.0 if args.family == "M4" else args.r
        return cat.homogeneity_report(args.family, args.n, r, cfg.seed, cfg.tol_implicit,
                                      cfg.tol_homogeneity_spectrum)
    if cmd == "curvature":
        return curvature_report(args.point, args.x, args.y, cfg)
    return acc.run_all(cfg)


def run(argv=None, out=None) -> int:
    """Run the command line; returns the exit code."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config().updated(format=getattr(args, "format", None), seed=getattr(args, "seed", None))
        report = execute(args, cfg)
    except (UsageError, ValueError, OSError) as exc:
        print(f"sol04: error: {exc}", file=sys.stderr)
        return 2
    out.write(report.to_json() + "\n" if cfg.format == "json" else report.to_csv())
    return 0 if report.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
