"""Command-line entry point: ``lambdamean <subcommand> ...``.

Every subcommand exits 0 iff all of its checks pass.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import gauges
from .harness.checks import ineq
from .harness.examples import paper_examples
from .harness.suite import DEFAULT_GRID, SuiteOptions, run_corpus
from .linalg import InvalidMatrix, operator_norm, spectral_radius
from .matrix_io import load_matrix, matrix_to_json
from .shifts import RULES, WeightSequence, convergence_experiment
from .transforms import KINDS as TRANSFORM_KINDS
from .transforms import TransformParams, apply, duggal

log = logging.getLogger("lambdamean")


def _lambda_list(values) -> list[float]:
    out = []
    for v in values:
        out.extend(float(x) for x in str(v).split(",") if x.strip())
    if not out or any(not 0.0 <= x <= 1.0 for x in out):
        raise argparse.ArgumentTypeError("lambda values must lie in [0, 1]")
    return out


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _open_csv(out: str | None):
    return open(out, "w", newline="") if out else sys.stdout


def cmd_transform(args) -> int:
    t = load_matrix(args.matrix)
    params = TransformParams(lam=args.lam, t=args.t, iterations=args.iterations)
    _emit_json(matrix_to_json(apply(t, args.kind, params)), args.out)
    return 0


def cmd_gauges(args) -> int:
    t = load_matrix(args.matrix)
    nt = operator_norm(t)
    scale = max(nt, 1e-14)
    tol = args.tol * scale
    w = gauges.numerical_radius_bracket(t, tol)
    wd = gauges.numerical_radius_bracket(duggal(t), tol)
    r = spectral_radius(t)
    checks = [ineq("radius.lower", max(r, 0.5 * nt), w.hi, scale, args.ineq_tol),
              ineq("radius.upper", w.lo, nt, scale, args.ineq_tol)]
    report = {
        "norm": nt,
        "spectralRadius": r,
        "numericalRadius": {"lo": w.lo, "hi": w.hi, "evaluations": w.evaluations},
        "duggalNumericalRadius": {"lo": wd.lo, "hi": wd.hi, "evaluations": wd.evaluations},
        "checks": [c.to_json() for c in checks],
        "passed": all(c.passed for c in checks),
    }
    _emit_json(report, args.out)
    return 0 if report["passed"] else 1


def cmd_verify(args) -> int:
    opts = SuiteOptions(gauge_tol=args.gauge_tol)
    report = run_corpus(args.corpus, args.seed, args.lambda_grid, opts=opts,
                        workers=args.workers, timing=args.timing)
    _emit_json(report.to_json(), args.out)
    log.info("%d pairs, %d failures", report.pairs, len(report.failures))
    return 0 if report.passed else 1


def cmd_paper_examples(args) -> int:
    report = paper_examples(timing=args.timing)
    _emit_json(report.to_json(), args.out)
    for c in report.failures:
        log.warning("FAIL %s %s", c.name, c.context)
    return 0 if report.passed else 1


def cmd_range(args) -> int:
    t = load_matrix(args.matrix)
    pts = gauges.range_boundary(t, args.points)
    fh = _open_csv(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "re", "im", "support"])
        for p in pts:
            w.writerow([repr(p.theta), repr(p.value.real), repr(p.value.imag), repr(p.support)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_shift_lab(args) -> int:
    seq = WeightSequence(rule=args.rule, weights=tuple(args.weights or ()),
                         scale=args.scale, ratio=args.ratio)
    rep = convergence_experiment(seq, args.lam, args.max_iter, window=args.window, tol=args.tol)
    fh = _open_csv(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mIter", "windowError"])
        for m, err in rep.errors:
            w.writerow([m, repr(err)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    log.info("limit %.6g, final window error %.3e, converged=%s, monotone=%s",
             rep.limit, rep.final_error, rep.converged, rep.monotone)
    return 0 if rep.monotone else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lambdamean", description="lambda-mean transform toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="apply a transform to a matrix file")
    p.add_argument("matrix")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--kind", choices=TRANSFORM_KINDS, default="lambda-mean")
    p.add_argument("--t", type=float, default=0.0, help="exponent for the generalized mean")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("gauges", help="norm, spectral radius and certified numerical radius")
    p.add_argument("matrix")
    p.add_argument("--tol", type=float, default=1e-9, help="radius tolerance relative to the norm")
    p.add_argument("--ineq-tol", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gauges)

    p = sub.add_parser("verify", help="randomized inequality and equivalence suite")
    p.add_argument("--corpus", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--lambda-grid", nargs="+", default=[",".join(map(str, DEFAULT_GRID))])
    p.add_argument("--gauge-tol", type=float, default=SuiteOptions.gauge_tol)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("paper-examples", help="rerun the worked examples")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_paper_examples)

    p = sub.add_parser("range", help="numerical range boundary as CSV")
    p.add_argument("matrix")
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--out")
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("shift-lab", help="window error of iterated weight averaging")
    p.add_argument("--rule", choices=RULES, default="harmonic")
    p.add_argument("--weights", type=float, nargs="*", help="explicit weights for --rule custom")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--ratio", type=float, default=0.5)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_shift_lab)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "lambda_grid", None) is not None:
        try:
            args.lambda_grid = _lambda_list(args.lambda_grid)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except (InvalidMatrix, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
