"""Worked examples with published four-decimal values, rerun as checks.

Every check here has a fixed expected value or a fixed strict ordering;
the report shape is the same as the randomized suite's.
"""
from __future__ import annotations

import itertools
import math
import time

import numpy as np

from .. import gauges
from ..classify import (
    lambda_mean_cs_criterion,
    lambda_mean_hyponormal_criterion,
    lambda_mean_hyponormal_direct,
    shift_cs_criterion,
    shift_is_hyponormal,
    upper_lambda_mean_weights,
)
from ..linalg import fractional_power, polar_decompose
from ..shifts import RankOnePair, WeightSequence, build_shift, rank_one_iterate_radius
from ..transforms import aluthge, duggal, lambda_mean, mean
from .checks import Aggregator, VerifyReport, agree, close, ineq

FOUR_DECIMALS = 5e-4       # values quoted to four decimals
RADIUS_DECIMALS = 1e-3     # radius values; tolerance stated for the gauge route
CROSS_TOL = 1e-4
SPECTRUM_TOL = 1e-8
EXACT_TOL = 1e-12
EXAMPLE_GAUGE_TOL = 1e-5
ORDER_TOL = -1e-12         # strict ordering: the gap must be positive, not merely >= 0

SPECTRUM_LAMBDAS = (0.1, 0.25, 0.5, 0.9)
CS_LAMBDAS = (0.2, 0.5, 0.8)

EXAMPLE_ANCHORS = {
    "example.polar-factors": "mean-norm-bound-example",
    "example.duggal": "mean-norm-bound-example",
    "example.mean-norm": "mean-norm-bound-example",
    "example.mixed-norm": "mean-norm-bound-example",
    "example.triangle-norm": "mean-norm-bound-example",
    "example.norm": "mean-norm-bound-example",
    "example.abs-sum-norm": "mean-norm-bound-example",
    "example.abs-adjoint-sum-norm": "mean-norm-bound-example",
    "example.norm-ordering": "mean-norm-bound-example",
    "example.radius-closed-form": "radius-integral-example",
    "example.radius-mean": "radius-integral-example",
    "example.radius-integral": "radius-integral-example",
    "example.radius-integrand": "radius-integral-example",
    "example.radius-quarter": "radius-integral-example",
    "example.radius-half": "radius-integral-example",
    "example.radius": "radius-integral-example",
    "example.radius-ordering": "radius-integral-example",
    "example.cross-sup": "cross-term-example",
    "example.cross-middle": "cross-term-example",
    "example.cross-ordering": "cross-term-example",
    "example.spectrum-canonical": "lambda-mean-spectrum-example",
    "example.spectrum-displayed": "lambda-mean-spectrum-example",
    "example.spectrum-completion": "lambda-mean-spectrum-example",
    "example.duggal-vanishes": "lambda-mean-spectrum-example",
    "example.jordan-aluthge": "jordan-zero-duggal",
    "example.jordan-duggal": "jordan-zero-duggal",
    "example.jordan-gap": "jordan-zero-duggal",
    "example.hyponormal-converse": "shift-hyponormal-converse-fails",
    "example.cs-weights": "complex-symmetry-not-preserved",
    "example.cs-flags": "complex-symmetry-not-preserved",
    "example.rank-one-limit": "rank-one-iterate-radius",
}


def _norm(a) -> float:
    return float(np.linalg.norm(a, 2))


def multiset_distance(a, b) -> float:
    """Smallest max-distance over pairings of two equal-size lists of complex numbers."""
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        return math.inf
    if len(a) > 8:
        raise ValueError("brute-force matching is limited to 8 values")
    return min(max(abs(x - y) for x, y in zip(a, perm)) for perm in itertools.permutations(b))


class _Builder:
    def __init__(self):
        self.checks = []

    def close(self, name, value, expected, tol, **ctx):
        self.checks.append(close(name, value, expected, tol, EXAMPLE_ANCHORS[name], **ctx))

    def agree(self, name, a, b, **ctx):
        self.checks.append(agree(name, a, b, EXAMPLE_ANCHORS[name], **ctx))

    def strictly_increasing(self, name, values, **ctx):
        for k, (lo, hi) in enumerate(zip(values, values[1:])):
            self.checks.append(ineq(name, lo, hi, 1.0, ORDER_TOL, EXAMPLE_ANCHORS[name],
                                    step=k, **ctx))


def _two_by_two():
    return np.array([[0, 1], [0, 1]], dtype=complex)


def mean_norm_example(b: _Builder) -> None:
    t = _two_by_two()
    pp = polar_decompose(t)
    r2 = math.sqrt(2.0)
    u_ref = r2 / 2 * np.array([[0, 1], [0, 1]])
    p_ref = r2 * np.diag([0.0, 1.0])
    b.close("example.polar-factors", _norm(pp.u - u_ref) + _norm(pp.p - p_ref), 0.0, EXACT_TOL)
    td = duggal(t, pp)
    b.close("example.duggal", _norm(td - np.diag([0.0, 1.0])), 0.0, EXACT_TOL)

    abs_sum = _norm(pp.p + fractional_power(td.conj().T @ td, 0.5))
    abs_adj = _norm(fractional_power(t @ t.conj().T, 0.5) + fractional_power(td @ td.conj().T, 0.5))
    vals = {
        "example.mean-norm": (_norm(mean(t, pp)), 1.1180),
        "example.mixed-norm": (0.25 * (abs_sum + abs_adj), 1.1218),
        "example.triangle-norm": (0.5 * (_norm(t) + _norm(td)), 1.2071),
        "example.norm": (_norm(t), 1.4142),
        "example.abs-sum-norm": (abs_sum, 2.4142),
        "example.abs-adjoint-sum-norm": (abs_adj, 2.0731),
    }
    for name, (got, want) in vals.items():
        b.close(name, got, want, FOUR_DECIMALS)
    chain = [vals[k][0] for k in ("example.mean-norm", "example.mixed-norm",
                                  "example.triangle-norm", "example.norm")]
    b.strictly_increasing("example.norm-ordering", chain)


def radius_example(b: _Builder, gauge_tol: float = EXAMPLE_GAUGE_TOL) -> dict:
    t = _two_by_two()
    td = duggal(t)
    w_t = gauges.numerical_radius(t, gauge_tol)
    w_td = gauges.numerical_radius(td, gauge_tol)
    w_mean = gauges.numerical_radius(mean(t), gauge_tol)
    integ = gauges.radius_integral(t, gauge_tol)

    exact_t = (1 + math.sqrt(2)) / 2
    exact_mean = (2 + math.sqrt(5)) / 4
    b.close("example.radius-closed-form", w_t.mid, exact_t, w_t.width + gauge_tol, operand="T")
    b.close("example.radius-closed-form", w_td.mid, 1.0, w_td.width + gauge_tol, operand="duggal")
    b.close("example.radius-closed-form", w_mean.mid, exact_mean, w_mean.width + gauge_tol, operand="mean")
    # closed-form antiderivative of (1 + sqrt(1 + s^2)) / 2 on [0, 1]
    exact_int = 0.5 + 0.25 * (math.sqrt(2) + math.asinh(1.0))
    b.close("example.radius-integral", integ.mid, exact_int, integ.width + gauge_tol, source="closed-form")
    for s in (0.0, 0.3, 0.7, 1.0):
        w = gauges.numerical_radius(lambda_mean(t, s), gauge_tol)
        b.close("example.radius-integrand", w.mid, 0.5 * (1 + math.sqrt(1 + s * s)),
                w.width + gauge_tol, s=s)

    quarter = 0.25 * (w_t.mid + w_td.mid + 2 * w_mean.mid)
    half = 0.5 * (w_t.mid + w_td.mid)
    b.close("example.radius-mean", w_mean.mid, 1.0590, RADIUS_DECIMALS)
    b.close("example.radius-integral", integ.mid, 1.0739, RADIUS_DECIMALS, source="published")
    b.close("example.radius-quarter", quarter, 1.0812, RADIUS_DECIMALS)
    b.close("example.radius-half", half, 1.1035, RADIUS_DECIMALS)
    b.close("example.radius", w_t.mid, 1.2071, RADIUS_DECIMALS)
    b.strictly_increasing("example.radius-ordering", [w_mean.mid, integ.mid, quarter, half, w_t.mid])
    return {"w_t": w_t, "w_td": w_td, "w_mean": w_mean}


def cross_term_example(b: _Builder, radii: dict, gauge_tol: float = EXAMPLE_GAUGE_TOL) -> None:
    t = _two_by_two()
    sup = gauges.cross_term_sup(t, CROSS_TOL / 10)
    b.close("example.cross-sup", sup.mid, math.sqrt(5) / 2, CROSS_TOL)
    wt, wtd = radii["w_t"].mid, radii["w_td"].mid
    middle = 0.25 * (wt + wtd + math.sqrt((wt - wtd) ** 2 + 4 * sup.mid))
    b.close("example.cross-middle", middle, 1.0829, RADIUS_DECIMALS)
    b.strictly_increasing("example.cross-ordering",
                          [radii["w_mean"].mid, middle, 0.5 * (wt + wtd), wt])


def spectrum_example(b: _Builder) -> None:
    t = np.zeros((4, 4), dtype=complex)
    t[0, 2], t[1, 3] = 1.0, 2.0
    td = duggal(t)
    b.close("example.duggal-vanishes", _norm(td), 0.0, EXACT_TOL)
    # the displayed transform comes from completing U to the unitary e1->e3, e2->e4
    v = np.zeros((4, 4))
    v[0, 2] = v[1, 3] = v[2, 0] = v[3, 1] = 1.0
    td_completed = polar_decompose(t).p @ v
    for lam in SPECTRUM_LAMBDAS:
        root = math.sqrt(lam - lam * lam)
        want = [root, -root, 2 * root, -2 * root]
        got = np.linalg.eigvals(lambda_mean(t, lam))
        b.close("example.spectrum-canonical", multiset_distance(got, want), 0.0, SPECTRUM_TOL, lam=lam)
        shown = np.array([[0, 0, lam, 0], [0, 0, 0, 2 * lam],
                          [1 - lam, 0, 0, 0], [0, 2 * (1 - lam), 0, 0]], dtype=complex)
        b.close("example.spectrum-displayed", multiset_distance(np.linalg.eigvals(shown), want),
                0.0, SPECTRUM_TOL, lam=lam)
        completed = lam * t + (1 - lam) * td_completed
        b.close("example.spectrum-completion", multiset_distance(np.linalg.eigvals(completed), want),
                0.0, SPECTRUM_TOL, lam=lam)


def jordan_example(b: _Builder) -> None:
    t = np.array([[0, 1], [0, 0]], dtype=complex)
    b.close("example.jordan-aluthge", _norm(aluthge(t)), 0.0, EXACT_TOL)
    b.close("example.jordan-duggal", _norm(lambda_mean(t, 0.0)), 0.0, EXACT_TOL)
    b.close("example.jordan-gap", _norm(t), 1.0, EXACT_TOL)


def hyponormal_example(b: _Builder, window: int = 12) -> None:
    lam = 1.0 / 3.0
    beta = np.ones(window)
    beta[1] = 0.5
    b.agree("example.hyponormal-converse", lambda_mean_hyponormal_criterion(beta, lam), True,
            claim="transform hyponormal")
    b.agree("example.hyponormal-converse", lambda_mean_hyponormal_direct(beta, lam), True,
            claim="transform hyponormal, direct")
    b.agree("example.hyponormal-converse", shift_is_hyponormal(beta), False,
            claim="shift not hyponormal")


def complex_symmetry_example(b: _Builder) -> None:
    for lam in CS_LAMBDAS:
        cases = (
            ((1.0, 2.0, 2.0, 1.0), (lam, lam + 1, 2.0, 2 - lam), True, False),
            ((1 / lam, 1.0, 1.0), (1.0, lam + 1 / lam - 1, 1.0), False, True),
        )
        for weights, moved_ref, cs_before, cs_after in cases:
            t = build_shift(WeightSequence.of(weights, "upper"), len(weights) + 1)
            moved = np.abs(np.diag(lambda_mean(t, lam), 1))
            ctx = {"lam": lam, "weights": list(weights)}
            b.close("example.cs-weights", float(np.max(np.abs(moved - moved_ref))), 0.0, EXACT_TOL, **ctx)
            b.close("example.cs-weights",
                    float(np.max(np.abs(upper_lambda_mean_weights(weights, lam) - moved_ref))),
                    0.0, EXACT_TOL, route="closed-form", **ctx)
            b.agree("example.cs-flags", shift_cs_criterion(weights), cs_before, stage="before", **ctx)
            b.agree("example.cs-flags", shift_cs_criterion(moved), cs_after, stage="after", **ctx)
            b.agree("example.cs-flags", lambda_mean_cs_criterion(weights, lam), cs_after,
                    stage="criterion", **ctx)


def rank_one_limit_example(b: _Builder) -> None:
    pair = RankOnePair(np.array([1.0, 2.0j, -1.0]), np.array([0.5, 1.0, 1.0j]))
    limit = abs(np.vdot(pair.y, pair.x))
    for lam in (0.25, 0.5, 0.75):
        b.close("example.rank-one-limit", rank_one_iterate_radius(pair, lam, 200), limit,
                EXACT_TOL, lam=lam)


def paper_examples(gauge_tol: float = EXAMPLE_GAUGE_TOL, timing: bool = False) -> VerifyReport:
    """Rerun every worked example; failures are reported, never raised."""
    start = time.perf_counter()
    b = _Builder()
    mean_norm_example(b)
    radii = radius_example(b, gauge_tol)
    cross_term_example(b, radii, gauge_tol)
    spectrum_example(b)
    jordan_example(b)
    hyponormal_example(b)
    complex_symmetry_example(b)
    rank_one_limit_example(b)
    agg = Aggregator(keep_all=True)
    agg.add(b.checks)
    tols = {"fourDecimals": FOUR_DECIMALS, "radius": RADIUS_DECIMALS, "cross": CROSS_TOL,
            "spectrum": SPECTRUM_TOL, "exact": EXACT_TOL, "gauge": gauge_tol, "order": ORDER_TOL}
    elapsed = time.perf_counter() - start
    return VerifyReport(agg, 0, None, sorted(set(SPECTRUM_LAMBDAS + CS_LAMBDAS)), tols,
                        len(b.checks), {"seconds": elapsed} if timing else None)
