"""Randomized verification of the inequality chains and equivalences.

Work is split per operator: quantities that do not depend on lambda (norms,
radii of T, T^D and the Aluthge transform, the cross-term supremum, ...) are
computed once, then every lambda in the grid reuses them.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import gauges
from ..classify import classify
from ..linalg import ABS_FLOOR, fractional_power, polar_decompose
from ..shifts import (
    RankOnePair,
    flip,
    iterated_weights,
    lambda_mean_weights,
    rank_one_iterate,
    rank_one_iterate_radius,
)
from ..classify import (
    lambda_mean_cs_criterion,
    lambda_mean_hyponormal_criterion,
    lambda_mean_hyponormal_direct,
    shift_cs_criterion,
    shift_is_hyponormal,
    upper_lambda_mean_weights,
)
from ..transforms import aluthge, iterate_lambda_mean, lambda_mean, q_lambda
from .checks import INEQ_TOL, Aggregator, VerifyReport, agree, implies, ineq
from .generate import OperatorSpec, corpus_specs, generate, random_unitary

DEFAULT_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SuiteOptions:
    gauge_tol: float = 1e-6        # relative to ||T||, numerical radii
    integral_tol: float = 1e-4     # relative to ||T||, radius integrals
    eq_tol: float = 1e-7           # shared predicate tolerance for equivalences
    ineq_tol: float = INEQ_TOL
    gammas: int = 16
    grid_angles: int = 64

    def to_json(self) -> dict:
        return {"gauge": self.gauge_tol, "integral": self.integral_tol,
                "equivalence": self.eq_tol, "inequality": self.ineq_tol,
                "gammas": self.gammas, "rangeAngles": self.grid_angles}


def _norm(a) -> float:
    return float(np.linalg.norm(a, 2))


def _radius(a, tol):
    return gauges.numerical_radius_bracket(a, tol)


def _spectral_radius(t, kind) -> float:
    # nilpotent kinds are certified T^n = 0, and eigenvalues of a defective
    # matrix carry O(eps^(1/n)) noise that would masquerade as spectrum
    if kind in ("nilpotent", "truncatedShift"):
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(t))))


def _support_gap(a, b, thetas) -> tuple[float, float, float]:
    """``min_theta h_b - h_a`` and the two supports at the minimizing angle."""
    ha = gauges.support_values(a, thetas)
    hb = gauges.support_values(b, thetas)
    k = int(np.argmin(hb - ha))
    return float(hb[k] - ha[k]), float(ha[k]), float(hb[k])


def _cross_mid(lam, wa, wb, sup):
    """Middle term of the cross-term bound; nondecreasing in each argument."""
    a, b = lam * wa, (1.0 - lam) * wb
    return 0.5 * (a + b) + 0.5 * math.sqrt((a - b) ** 2 + 4.0 * (lam - lam * lam) * sup)


def verify_operator(index: int, spec: OperatorSpec, lam_grid, opts: SuiteOptions) -> list:
    t = generate(spec)
    n = t.shape[0]
    kind = spec.kind
    ctx = {"item": index, "kind": kind, "dim": n, "seed": spec.seed}
    out = []
    add = out.append

    pp = polar_decompose(t)
    td = pp.p @ pp.u
    al = aluthge(t, pp)
    nt = _norm(t)
    s1 = max(nt, ABS_FLOOR)
    s2, s4 = s1 ** 2, s1 ** 4
    ntd, nal = _norm(td), _norm(al)
    r = _spectral_radius(t, kind)
    gtol = opts.gauge_tol * s1
    w_t, w_td, w_al = _radius(t, gtol), _radius(td, gtol), _radius(al, gtol)
    thetas = np.linspace(0.0, 2 * np.pi, opts.grid_angles, endpoint=False)
    rep = classify(t, opts.eq_tol)
    tol = opts.ineq_tol

    # -- lambda-free checks --------------------------------------------------
    add(ineq("radius.lower", max(r, 0.5 * nt), w_t.hi, s1, tol, **ctx))
    add(ineq("radius.upper", w_t.lo, nt, s1, tol, **ctx))
    add(ineq("duggal.radius", w_td.lo, w_t.hi, s1, tol, **ctx))

    rng = np.random.default_rng([spec.seed, 1])
    gam = np.concatenate(([0.0], 2 * nt * np.sqrt(rng.random(opts.gammas))
                          * np.exp(2j * np.pi * rng.random(opts.gammas))))
    eye = np.eye(n)
    worst = None
    for g in gam:
        lhs, rhs = _norm(td - g * eye), _norm(t - g * eye)
        m = (rhs - lhs) / (s1 + abs(g))
        if worst is None or m < worst[0]:
            worst = (m, lhs, rhs, g)
    add(ineq("duggal.translate", worst[1], worst[2], s1 + abs(worst[3]), tol, **ctx))

    gap, ha, hb = _support_gap(td, t, thetas)
    add(ineq("duggal.range-inclusion", ha, hb, s1, tol, **ctx))

    f = rep.flags
    add(implies("classes.monotone", f["normal"], f["quasinormal"] and f["hyponormal"], **ctx))

    mean = 0.5 * (t + td)
    n_mean = _norm(mean)
    tstar_td = t.conj().T @ td
    w_a = _radius(tstar_td, opts.eq_tol * s2 / 8)
    eq1 = opts.eq_tol * s1
    eq2 = opts.eq_tol * s2
    add(agree("equiv.mean-norm", abs(n_mean - nt) <= eq1, w_a.hi >= nt * nt - eq2, **ctx))

    w_mean = _radius(mean, gtol)
    itol = opts.integral_tol * s1
    integ = gauges.radius_integral(t, itol) if nt > 0 else gauges.GaugeBracket(0, 0)
    quarter = 0.25 * (w_t.lo + w_td.lo + 2 * w_mean.lo), 0.25 * (w_t.hi + w_td.hi + 2 * w_mean.hi)
    add(ineq("radius.mean-integral-lower", w_mean.lo, integ.hi, s1, tol, **ctx))
    add(ineq("radius.mean-integral-upper", integ.lo, quarter[1], s1, tol, **ctx))
    add(ineq("radius.mean-integral-chain", quarter[0], w_t.hi, s1, tol, **ctx))

    cross = gauges.cross_term_bracket(t, opts.gauge_tol * s2, td=td) if nt > 0 else gauges.GaugeBracket(0, 0)

    abs_t = pp.p
    abs_ts = fractional_power(t @ t.conj().T, 0.5)
    abs_td = fractional_power(td.conj().T @ td, 0.5)
    abs_tds = fractional_power(td @ td.conj().T, 0.5)

    v = random_unitary(np.random.default_rng([spec.seed, 2]), n)
    vtv = v @ t @ v.conj().T
    x = y = None
    if kind == "rankOne":
        left, sing, right = np.linalg.svd(t)
        x, y = sing[0] * left[:, 0], right[0].conj()
    weights = np.diag(t, -1).real if kind == "truncatedShift" else None

    # -- per-lambda checks ---------------------------------------------------
    for j, lam in enumerate(lam_grid):
        lam = float(lam)
        c = dict(ctx, lam=lam)
        root = 2.0 * math.sqrt(max(lam - lam * lam, 0.0))
        mu = lam - lam * lam
        m = lambda_mean(t, lam, pp)
        nm = _norm(m)
        w_m = _radius(m, gtol)
        tri = lam * nt + (1 - lam) * ntd

        add(ineq("norm.heinz-lower", root * nal, nm, s1, tol, **c))
        add(ineq("norm.triangle-upper", nm, tri, s1, tol, **c))
        add(ineq("norm.spectral-lower", root * r, nm, s1, tol, **c))
        add(ineq("norm.contraction", nm, nt, s1, tol, **c))
        mixed = 0.5 * (_norm(lam * abs_t + (1 - lam) * abs_td) + _norm(lam * abs_ts + (1 - lam) * abs_tds))
        add(ineq("norm.mixed-schwarz", nm, mixed, s1, tol, **c))
        add(ineq("norm.mixed-schwarz-chain", mixed, tri, s1, tol, **c))

        q = q_lambda(t, lam, pp)
        nq = _norm(q)
        w_b = _radius(q @ tstar_td + tstar_td @ q, opts.gauge_tol * s1 ** 4)
        quart_hi = nq ** 2 + 4 * mu ** 2 * w_a.hi ** 2 + 2 * mu * w_b.hi
        quart_lo = nq ** 2 + 4 * mu ** 2 * w_a.lo ** 2 + 2 * mu * w_b.lo
        add(ineq("norm.quartic", nm ** 4, quart_hi, s4, tol, **c))
        add(ineq("norm.quartic-chain", quart_lo, tri ** 4, s4, tol, **c))

        add(ineq("radius.aluthge-lower", root * w_al.lo, w_m.hi, s1, tol, **c))
        add(ineq("radius.convex-upper", w_m.lo, lam * w_t.hi + (1 - lam) * w_td.hi, s1, tol, **c))
        add(ineq("radius.spectral-lower", root * r, w_m.hi, s1, tol, **c))
        add(ineq("radius.contraction", w_m.lo, w_t.hi, s1, tol, **c))

        wint = gauges.weighted_radius_integral(t, lam, itol, td=td) if nt > 0 else gauges.GaugeBracket(0, 0)
        add(ineq("radius.midpoint-integral", w_m.lo, 2 * wint.hi, s1, tol, **c))
        hb_hi = 0.5 * (lam * w_t.hi + (1 - lam) * w_td.hi + w_m.hi)
        add(ineq("radius.hammer-bullen", 2 * wint.lo, hb_hi, s1, tol, **c))

        mid_hi = _cross_mid(lam, w_t.hi, w_td.hi, cross.hi)
        mid_lo = _cross_mid(lam, w_t.lo, w_td.lo, cross.lo)
        add(ineq("radius.cross-term", w_m.lo, mid_hi, s1, tol, **c))
        add(ineq("radius.cross-term-chain", mid_lo, lam * w_t.hi + (1 - lam) * w_td.hi, s1, tol, **c))

        gap, ha, hb = _support_gap(m, t, thetas)
        add(ineq("range.inclusion", ha, hb, s1, tol, **c))

        n_iter = 1 + (index + j) % 4
        a_it = iterate_lambda_mean(t, lam, n_iter)
        b_it = iterate_lambda_mean(vtv, lam, n_iter)
        wa, wb = _radius(a_it, gtol), _radius(b_it, gtol)
        overlap = min(wa.hi - wb.lo, wb.hi - wa.lo)
        add(ineq("covariance.radius", 0.0, overlap, s1, tol, iterations=n_iter, **c))

        if lam < 1.0:
            fixed = _norm(m - t) <= opts.eq_tol * (1 - lam) * s1
            add(agree("equiv.quasinormal-fixed", f["quasinormal"], fixed, **c))
        if lam > 0.0:
            fixed = _norm(m - td) <= opts.eq_tol * lam * s1
            add(agree("equiv.quasinormal-duggal", f["quasinormal"], fixed, **c))
            add(agree("equiv.zero-norm", nt <= ABS_FLOOR, nm <= ABS_FLOOR, **c))
            add(agree("equiv.zero-radius", w_t.hi <= ABS_FLOOR, w_m.hi <= ABS_FLOOR, **c))
        if 0.0 < lam < 1.0:
            _, attained = gauges.equality_witness(t, lam, td)
            add(agree("equiv.norm-witness", abs(nm - nt) <= eq1, attained, **c))
            big = max(lam * nt, (1 - lam) * ntd)
            add(agree("equiv.two-max",
                      abs(nm - 2 * big) <= eq1,
                      w_a.hi * mu >= big * big - eq2 * mu, **c))
            add(agree("equiv.mean-lambda",
                      n_mean >= 0.5 * (nt + ntd) - eq1,
                      nm >= tri - eq1, **c))

        if kind == "rankOne" and 0.0 < lam < 1.0:
            _rank_one_checks(add, x, y, lam, s1, gtol, c)
        if weights is not None:
            _shift_checks(add, t, weights, lam, m, c)
        if kind in ("truncatedShift", "normal", "quasinormal", "positive") and 0.0 < lam < 1.0:
            r_lo = 0.0 if kind == "truncatedShift" else nt   # normal => r = ||T||
            r_m = float(np.max(np.abs(np.linalg.eigvals(m))))
            add(ineq("shift.scaled-spectrum", root * r_lo, r_m, s1, tol, **c))
    return out


def _rank_one_checks(add, x, y, lam, s1, gtol, c):
    pair = RankOnePair(x, y)
    t = pair.matrix()
    worst_mat, worst_rad = 0.0, None
    cur = t
    for k in range(11):
        if k:
            cur = lambda_mean(cur, lam)
        closed = rank_one_iterate(pair, lam, k).matrix()
        worst_mat = max(worst_mat, _norm(cur - closed))
        cf = rank_one_iterate_radius(pair, lam, k)
        br = _radius(closed, gtol)
        slack = min(cf - br.lo, br.hi - cf)
        if worst_rad is None or slack < worst_rad[0]:
            worst_rad = (slack, cf, br.mid)
    add(ineq("rank-one.iterate", worst_mat, 0.0, s1, 1e-10, **c))
    add(ineq("rank-one.radius", 0.0, worst_rad[0], s1, INEQ_TOL, formula=worst_rad[1], **c))


def _shift_checks(add, t, w, lam, m, c):
    n = t.shape[0]
    scale = max(float(np.max(w)), ABS_FLOOR)
    err = float(np.max(np.abs(np.diag(m, -1) - lambda_mean_weights(w, lam, truncated=True))))
    add(ineq("shift.weights", err, 0.0, scale, 1e-12, **c))

    up = flip(t)
    err_up = float(np.max(np.abs(np.abs(np.diag(lambda_mean(up, lam), 1))
                                 - upper_lambda_mean_weights(w[::-1], lam))))
    add(ineq("shift.upper-weights", err_up, 0.0, scale, 1e-12, **c))

    worst = 0.0
    for k in range(1, min(6, n - 2) + 1):
        it = np.diag(iterate_lambda_mean(t, lam, k), -1).real
        for idx in range(n - 1 - k):
            worst = max(worst, abs(it[idx] - iterated_weights(w, lam, k, idx)))
    add(ineq("shift.binomial", worst, 0.0, scale, 1e-10, **c))

    if len(w) >= 3:
        crit = lambda_mean_hyponormal_criterion(w, lam)
        add(agree("shift.hyponormal-criterion", crit, lambda_mean_hyponormal_direct(w, lam), **c))
        add(implies("shift.hyponormal-preserved", shift_is_hyponormal(w), crit, **c))
    if 0.0 < lam < 1.0 and len(w) >= 2:
        add(agree("shift.complex-symmetry", lambda_mean_cs_criterion(w, lam),
                  shift_cs_criterion(upper_lambda_mean_weights(w, lam)), **c))


def _worker(args):
    index, spec, grid, opts = args
    return verify_operator(index, spec, grid, opts)


def verify_suite(corpus, lam_grid=DEFAULT_GRID, opts: SuiteOptions | None = None,
                 seed: int | None = None, workers: int = 1, keep_all: bool = False,
                 timing: bool = False) -> VerifyReport:
    """Run every check on every (operator, lambda) pair of ``corpus``.

    Failures are data: nothing here raises on a violated inequality.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus must be nonempty")
    opts = opts or SuiteOptions()
    grid = [float(x) for x in lam_grid]
    agg = Aggregator(keep_all)
    start = time.perf_counter()
    jobs = [(i, spec, grid, opts) for i, spec in enumerate(corpus)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            for res in pool.map(_worker, jobs, chunksize=16):
                agg.add(res)
    else:
        for job in jobs:
            agg.add(_worker(job))
    elapsed = time.perf_counter() - start
    return VerifyReport(agg, len(corpus), seed, grid, opts.to_json(), len(corpus) * len(grid),
                        {"seconds": elapsed} if timing else None)


def run_corpus(size: int, seed: int, lam_grid=DEFAULT_GRID, **kw) -> VerifyReport:
    return verify_suite(corpus_specs(size, seed), lam_grid, seed=seed, **kw)
