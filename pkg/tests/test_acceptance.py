"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``[PASS]``/``[FAIL]`` line. Run standalone with
``python tests/test_acceptance.py`` to get just those lines.
"""
from __future__ import annotations

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from lambdamean import gauges
from lambdamean.classify import (
    lambda_mean_cs_criterion,
    lambda_mean_hyponormal_criterion,
    shift_cs_criterion,
    shift_is_hyponormal,
)
from lambdamean.harness import corpus_specs, run_corpus, verify_suite
from lambdamean.linalg import fractional_power
from lambdamean.shifts import WeightSequence, build_shift, convergence_experiment
from lambdamean.transforms import duggal, lambda_mean, mean

CORPUS_SEED = 20261016
CORPUS_OPERATORS = 2000           # x 5 lambdas = 10,000 pairs
LAMBDA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)

INEQUALITY_CHECKS = (
    "radius.lower", "radius.upper",
    "duggal.translate", "duggal.radius", "duggal.range-inclusion",
    "norm.heinz-lower", "norm.triangle-upper", "norm.spectral-lower", "norm.contraction",
    "norm.mixed-schwarz", "norm.mixed-schwarz-chain", "norm.quartic", "norm.quartic-chain",
    "radius.aluthge-lower", "radius.convex-upper", "radius.spectral-lower", "radius.contraction",
    "radius.midpoint-integral", "radius.hammer-bullen",
    "radius.mean-integral-lower", "radius.mean-integral-upper", "radius.mean-integral-chain",
    "radius.cross-term", "radius.cross-term-chain", "range.inclusion", "covariance.radius",
)
EQUIVALENCE_CHECKS = (
    "equiv.quasinormal-fixed", "equiv.quasinormal-duggal", "equiv.zero-norm", "equiv.zero-radius",
    "equiv.norm-witness", "equiv.mean-norm", "equiv.two-max", "equiv.mean-lambda",
)

_results: dict[int, tuple[bool, str]] = {}


def report(number: int, title: str, ok: bool, detail: str, capsys=None) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
    _results[number] = (ok, line)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def _norm(a) -> float:
    return float(np.linalg.norm(a, 2))


def _multiset_distance(a, b) -> float:
    return min(max(abs(x - y) for x, y in zip(a, p)) for p in itertools.permutations(b))


T_EXAMPLE = np.array([[0, 1], [0, 1]], dtype=complex)


# -- 1 ----------------------------------------------------------------------

def criterion_1():
    start = time.perf_counter()
    t = T_EXAMPLE
    td = duggal(t)
    abs_ = fractional_power(t.conj().T @ t, 0.5)
    abs_d = fractional_power(td.conj().T @ td, 0.5)
    abs_s = fractional_power(t @ t.conj().T, 0.5)
    abs_ds = fractional_power(td @ td.conj().T, 0.5)
    got = [_norm(mean(t)), 0.25 * (_norm(abs_ + abs_d) + _norm(abs_s + abs_ds)),
           0.5 * (_norm(t) + _norm(td)), _norm(t)]
    want = [1.1180, 1.1218, 1.2071, 1.4142]
    elapsed = time.perf_counter() - start
    errs = [abs(g - w) for g, w in zip(got, want)]
    ordered = all(a < b for a, b in zip(got, got[1:]))
    ok = max(errs) <= 5e-4 and ordered and elapsed < 1.0
    return ok, f"values {[round(float(g), 5) for g in got]}, max err {max(errs):.1e}, strict={ordered}, {elapsed:.3f}s"


def test_criterion_1_mean_norm_example(capsys):
    report(1, "mean-norm example values and ordering", *criterion_1(), capsys=capsys)


# -- 2 ----------------------------------------------------------------------

def _radii(tol):
    t = T_EXAMPLE
    td = duggal(t)
    w_t = gauges.numerical_radius(t, tol)
    w_td = gauges.numerical_radius(td, tol)
    w_hat = gauges.numerical_radius(mean(t), tol)
    return w_t, w_td, w_hat


def criterion_2():
    start = time.perf_counter()
    tol = 1e-5
    w_t, w_td, w_hat = _radii(tol)
    integ = gauges.radius_integral(T_EXAMPLE, tol)
    got = [w_hat.mid, integ.mid, 0.25 * (w_t.mid + w_td.mid + 2 * w_hat.mid),
           0.5 * (w_t.mid + w_td.mid), w_t.mid]
    want = [1.0590, 1.0739, 1.0812, 1.1035, 1.2071]
    elapsed = time.perf_counter() - start
    errs = [abs(g - w) for g, w in zip(got, want)]
    ordered = all(a < b for a, b in zip(got, got[1:]))
    ok = max(errs) <= 1e-3 and ordered and elapsed < 10.0
    return ok, f"values {[round(float(g), 5) for g in got]}, max err {max(errs):.1e}, strict={ordered}, {elapsed:.3f}s"


def test_criterion_2_radius_example(capsys):
    report(2, "radius sandwich example values and ordering", *criterion_2(), capsys=capsys)


# -- 3 ----------------------------------------------------------------------

def criterion_3():
    sup = gauges.cross_term_sup(T_EXAMPLE, 1e-6)
    w_t, w_td, w_hat = _radii(1e-6)
    wt, wtd = w_t.mid, w_td.mid
    middle = 0.25 * (wt + wtd + math.sqrt((wt - wtd) ** 2 + 4 * sup.mid))
    sup_err = abs(sup.mid - math.sqrt(5) / 2)
    mid_err = abs(middle - 1.0829)
    between = w_hat.mid < middle < 0.5 * (wt + wtd)
    ok = sup_err <= 1e-4 and mid_err <= 1e-3 and between
    return ok, f"sup {sup.mid:.6f} (err {sup_err:.1e}), middle {middle:.5f} (err {mid_err:.1e}), between={between}"


def test_criterion_3_cross_term_example(capsys):
    report(3, "cross-term supremum and middle bound", *criterion_3(), capsys=capsys)


# -- 4 ----------------------------------------------------------------------

def criterion_4():
    t = np.zeros((4, 4), dtype=complex)
    t[0, 2], t[1, 3] = 1.0, 2.0
    worst = 0.0
    for lam in (0.1, 0.25, 0.5, 0.9):
        root = math.sqrt(lam - lam * lam)
        got = np.linalg.eigvals(lambda_mean(t, lam))
        worst = max(worst, _multiset_distance(got, [root, -root, 2 * root, -2 * root]))
    td_norm = _norm(duggal(t))
    ok = worst <= 1e-8
    return ok, f"worst multiset distance {worst:.3g} (canonical duggal transform has norm {td_norm:.1g})"


def test_criterion_4_spectrum_example(capsys):
    report(4, "lambda-mean spectrum example", *criterion_4(), capsys=capsys)


# -- 5 ----------------------------------------------------------------------

def criterion_5():
    beta = np.ones(16)
    beta[1] = 0.5
    transformed = lambda_mean_hyponormal_criterion(beta, 1 / 3)
    original = shift_is_hyponormal(beta)
    ok = transformed and not original
    return ok, f"transform hyponormal={transformed}, shift hyponormal={original}"


def test_criterion_5_hyponormal_converse(capsys):
    report(5, "hyponormality of the transform without the shift", *criterion_5(), capsys=capsys)


# -- 6 ----------------------------------------------------------------------

def _cs_of_transform(weights, lam):
    t = build_shift(WeightSequence.of(weights, "upper"), len(weights) + 1)
    return shift_cs_criterion(np.abs(np.diag(lambda_mean(t, lam), 1)))


def criterion_6():
    rows = []
    ok = True
    for lam in (0.2, 0.5, 0.8):
        a = (1.0, 2.0, 2.0, 1.0)
        s = (1 / lam, 1.0, 1.0)
        got = (shift_cs_criterion(a), _cs_of_transform(a, lam), lambda_mean_cs_criterion(a, lam),
               shift_cs_criterion(s), _cs_of_transform(s, lam), lambda_mean_cs_criterion(s, lam))
        want = (True, False, False, False, True, True)
        ok &= got == want
        rows.append(f"lam={lam}: {'ok' if got == want else got}")
    return ok, ", ".join(rows)


def test_criterion_6_complex_symmetry_examples(capsys):
    report(6, "complex symmetry examples", *criterion_6(), capsys=capsys)


# -- 7 / 8 / 9: one shared corpus run -----------------------------------------

@pytest.fixture(scope="module")
def corpus_report():
    start = time.perf_counter()
    rep = run_corpus(CORPUS_OPERATORS, CORPUS_SEED, LAMBDA_GRID)
    return rep, time.perf_counter() - start


def _stats(rep, names):
    by_name = {c["name"]: c for c in rep.checks}
    missing = [n for n in names if n not in by_name]
    count = sum(by_name[n]["count"] for n in names if n in by_name)
    fails = sum(by_name[n]["failures"] for n in names if n in by_name)
    worst = min((by_name[n]["worstMargin"] for n in names if n in by_name), default=math.nan)
    return missing, count, fails, worst


def criterion_7(rep, elapsed):
    missing, count, fails, worst = _stats(rep, INEQUALITY_CHECKS)
    dims_ok = all(s.dim <= 8 for s in corpus_specs(CORPUS_OPERATORS, CORPUS_SEED))
    ok = rep.pairs >= 10_000 and not missing and fails == 0 and dims_ok and elapsed < 600
    return ok, (f"{rep.pairs} pairs, {count} inequality checks, {fails} violations, "
                f"worst margin {worst:.2e}, missing={missing}, {elapsed:.0f}s")


def test_criterion_7_inequality_suite(corpus_report, capsys):
    report(7, "randomized inequality chains", *criterion_7(*corpus_report), capsys=capsys)


def _constructed_two_max():
    # positive operators at lambda = 1/2 satisfy both sides of the equality criterion
    rep = verify_suite(corpus_specs(60, 11, kinds=("positive",)), (0.5,), keep_all=True)
    checks = rep.find("equiv.two-max") + rep.find("equiv.norm-witness")
    return all(c.lhs == 1.0 and c.rhs == 1.0 for c in checks), len(checks)


def criterion_8(rep):
    missing, count, fails, _ = _stats(rep, EQUIVALENCE_CHECKS)
    specs = corpus_specs(CORPUS_OPERATORS, CORPUS_SEED)
    constructed = sum(s.kind in ("quasinormal", "positive") for s in specs)
    both_true, n_constructed = _constructed_two_max()
    ok = (rep.corpus_size >= 1000 and constructed >= 200 and not missing and fails == 0
          and both_true)
    return ok, (f"{rep.corpus_size} operators ({constructed} quasinormal/positive), {count} agreements, "
                f"{fails} disagreements, constructed equality instances all true={both_true} "
                f"({n_constructed})")


def test_criterion_8_equivalence_suite(corpus_report, capsys):
    report(8, "boolean equivalences", *criterion_8(corpus_report[0]), capsys=capsys)


def criterion_9(rep):
    by_name = {c["name"]: c for c in rep.checks}
    binom = by_name["shift.binomial"]
    rank1 = by_name["rank-one.radius"]
    conv = convergence_experiment(WeightSequence("harmonic"), 0.5, 60)
    parts = {
        "binomial": binom["failures"] == 0 and binom["count"] > 0,
        "rank-one": rank1["failures"] == 0 and rank1["count"] > 0,
        "harmonic-convergence": conv.final_error < 1e-6,
    }
    detail = (f"binomial {binom['count']} checks/{binom['failures']} fail, "
              f"rank-one {rank1['count']} checks/{rank1['failures']} fail, "
              f"harmonic window error at mIter=60: {conv.final_error:.4f} (target < 1e-6); "
              f"parts {parts}")
    return all(parts.values()), detail


def test_criterion_9_closed_forms(corpus_report, capsys):
    report(9, "closed-form cross-checks", *criterion_9(corpus_report[0]), capsys=capsys)


# -- 10 ---------------------------------------------------------------------

def criterion_10(tmp_dir):
    outs = []
    for k in range(2):
        path = f"{tmp_dir}/run{k}.json"
        subprocess.run([sys.executable, "-m", "lambdamean.cli", "verify", "--seed", "42",
                        "--out", path], check=False, capture_output=True)
        with open(path, "rb") as fh:
            outs.append(fh.read())
    same = outs[0] == outs[1]
    n = json.loads(outs[0])["pairs"]
    return same, f"two runs of verify --seed 42 ({n} pairs) byte-identical={same}"


def test_criterion_10_determinism(tmp_path, capsys):
    report(10, "deterministic reports", *criterion_10(tmp_path), capsys=capsys)


if __name__ == "__main__":
    import tempfile

    start = time.perf_counter()
    rep = run_corpus(CORPUS_OPERATORS, CORPUS_SEED, LAMBDA_GRID)
    elapsed = time.perf_counter() - start
    runs = [
        (1, "mean-norm example values and ordering", criterion_1),
        (2, "radius sandwich example values and ordering", criterion_2),
        (3, "cross-term supremum and middle bound", criterion_3),
        (4, "lambda-mean spectrum example", criterion_4),
        (5, "hyponormality of the transform without the shift", criterion_5),
        (6, "complex symmetry examples", criterion_6),
        (7, "randomized inequality chains", lambda: criterion_7(rep, elapsed)),
        (8, "boolean equivalences", lambda: criterion_8(rep)),
        (9, "closed-form cross-checks", lambda: criterion_9(rep)),
    ]
    with tempfile.TemporaryDirectory() as d:
        runs.append((10, "deterministic reports", lambda: criterion_10(d)))
        failed = 0
        for number, title, fn in runs:
            try:
                report(number, title, *fn())
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
