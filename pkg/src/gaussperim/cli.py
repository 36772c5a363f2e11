"""Command-line entry point.

Exit codes: 0 success, 1 a check or solve failed, 2 bad flags.
Machine output is one JSON object (or CSV) on stdout or ``--out``; logs go
to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import cone, curves, measure, softmax, spectrum, verify
from .measure import CylinderSpec

log = logging.getLogger("gaussperim")


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    # json uses repr for floats: shortest string that round-trips
    return json.dumps(obj, default=_jsonable, sort_keys=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def run_profile(args) -> int:
    if not 0 < args.c_min <= args.c_max < 1:
        raise UsageError("need 0 < c-min <= c-max < 1")
    if args.steps < 1 or args.max_k < 1:
        raise UsageError("steps and max-k must be positive")
    grid = np.linspace(args.c_min, args.c_max, args.steps)
    rows = measure.profile_table(grid, args.max_k, args.max_n)
    if args.json:
        _emit(dumps([r.__dict__ for r in rows]), args.out)
    else:
        _emit(csv_text(measure.PROFILE_HEADER, measure.profile_csv_rows(rows)), args.out)
    return 0


def run_stability(args) -> int:
    try:
        spec = CylinderSpec(args.k, args.n, args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    verdict = spectrum.classify(spec, args.tol)
    body = verdict.to_json()
    body["direct"] = spectrum.classify_direct(spec, args.tol).to_json()
    body["lift"] = spectrum.classify_cylinder_lift(spec, args.tol).to_json()
    _emit(dumps(body), args.out)
    return 0


def run_curve(args) -> int:
    if args.m < 2 or args.points < 8:
        raise UsageError("need m >= 2 and points >= 8")
    try:
        c = curves.shoot_closed_curve(args.m, rho_guess=args.rho, lam=args.lam,
                                      n_points=args.points)
    except curves.ShootingError as exc:
        log.error("%s", exc)
        sys.stdout.write(dumps({"error": exc.code, "message": str(exc)}))
        return 1
    summary = curves.curve_summary(c)
    u = curves.rotation_field(c)
    rows = [[measure.format_float(v) for v in row]
            for row in zip(c.s, c.points[:, 0], c.points[:, 1], c.kappa, u)]
    table = csv_text(("s", "x", "y", "kappa", "u_rotation"), rows)
    ok = summary["residual"] <= 1e-6
    if args.out is not None:
        _emit(table, args.out)
        sys.stdout.write(dumps(summary))
    elif args.json:
        sys.stdout.write(dumps(summary))
    else:
        sys.stdout.write(table)
    return 0 if ok else 1


def run_cone(args) -> int:
    if args.n < 7:
        raise UsageError("n must be >= 7")
    _emit(dumps(cone.instability_functional(args.n, args.kappa).to_json()), args.out)
    return 0


def run_softmax(args) -> int:
    if args.d < 2 or args.beta <= 0 or args.instances < 1:
        raise UsageError("need d >= 2, beta > 0, instances >= 1")
    rep = softmax.demo_report(args.d, args.beta, args.seed, args.instances)
    _emit(dumps(rep), args.out)
    return 0 if rep["pass"] else 1


def run_verify(args) -> int:
    reports = verify.run_suite(args.suite, seed=args.seed)
    if len(reports) == 1:
        body = reports[0].to_json()
    else:
        body = {"suite": "all",
                "cases": [dict(c.to_json(), id=f"{r.suite}.{c.id}")
                          for r in reports for c in r.cases],
                "overallPass": all(r.overall_pass for r in reports)}
    _emit(dumps(body), args.out)
    for r in reports:
        for case_id in r.failing():
            log.error("failed: %s.%s", r.suite, case_id)
    return 0 if body["overallPass"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussperim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--json", action="store_true", help="machine output where CSV is the default")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("profile", help="candidate sets of prescribed Gaussian volume (CSV)")
    sp.add_argument("--c-min", type=float, default=0.01)
    sp.add_argument("--c-max", type=float, default=0.5)
    sp.add_argument("--steps", type=int, default=50)
    sp.add_argument("--max-k", type=int, default=4)
    sp.add_argument("--max-n", type=int, default=None)
    common(sp)
    sp.set_defaults(func=run_profile)

    sp = sub.add_parser("stability", help="stability verdict for a model cylinder")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    common(sp)
    sp.set_defaults(func=run_stability)

    sp = sub.add_parser("curve", help="shoot an m-fold shrinker curve")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--points", type=int, default=512)
    sp.add_argument("--lam", type=float, default=None)
    sp.add_argument("--rho", type=float, default=None)
    common(sp)
    sp.set_defaults(func=run_curve)

    sp = sub.add_parser("cone", help="radial instability functional of a minimal cone")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    common(sp)
    sp.set_defaults(func=run_cone)

    sp = sub.add_parser("softmax-demo", help="smoothed max eigenvalue checks on random matrices")
    sp.add_argument("--d", type=int, default=5)
    sp.add_argument("--beta", type=float, default=4.0)
    sp.add_argument("--instances", type=int, default=20)
    common(sp, seed=True)
    sp.set_defaults(func=run_softmax)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    common(sp, seed=True)
    sp.set_defaults(func=run_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"gaussperim: error: {exc}\n")
        return 2
