"""Check records, the anchor registry and report aggregation.

A check compares a left side with a right side and stores a signed margin;
it passes iff ``margin >= -tol``. Three flavours share that rule:

* inequality ``lhs <= rhs``: ``margin = (rhs_hi - lhs_lo) / scale``, where
  ``_hi``/``_lo`` are the certified ends of the gauge brackets involved, so
  a negative margin is a proven violation and never a sampling artifact;
* value match: ``margin = -|lhs - rhs|``;
* boolean agreement: ``margin = +1`` if the two predicates agree, else ``-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

INEQ_TOL = 1e-8

# check name -> anchor id of the result it exercises
ANCHORS = {
    "radius.lower": "numerical-radius-norm-equivalence",
    "radius.upper": "numerical-radius-norm-equivalence",
    "duggal.translate": "duggal-translate-contraction",
    "duggal.range-inclusion": "duggal-range-inclusion",
    "duggal.radius": "duggal-range-inclusion",
    "norm.heinz-lower": "lambda-mean-norm-heinz-bounds",
    "norm.triangle-upper": "lambda-mean-norm-heinz-bounds",
    "norm.spectral-lower": "lambda-mean-norm-spectral-bounds",
    "norm.contraction": "lambda-mean-norm-spectral-bounds",
    "norm.mixed-schwarz": "lambda-mean-norm-mixed-schwarz",
    "norm.mixed-schwarz-chain": "lambda-mean-norm-mixed-schwarz",
    "norm.quartic": "lambda-mean-norm-quartic",
    "norm.quartic-chain": "lambda-mean-norm-quartic-chain",
    "radius.aluthge-lower": "lambda-mean-radius-bounds",
    "radius.convex-upper": "lambda-mean-radius-bounds",
    "radius.spectral-lower": "lambda-mean-radius-spectral-bounds",
    "radius.contraction": "lambda-mean-radius-spectral-bounds",
    "radius.midpoint-integral": "lambda-mean-radius-integral",
    "radius.hammer-bullen": "lambda-mean-radius-integral",
    "radius.mean-integral-lower": "mean-radius-integral",
    "radius.mean-integral-upper": "mean-radius-integral",
    "radius.mean-integral-chain": "mean-radius-integral",
    "radius.cross-term": "lambda-mean-radius-cross-term",
    "radius.cross-term-chain": "lambda-mean-radius-cross-term",
    "range.inclusion": "lambda-mean-range-inclusion",
    "covariance.radius": "iterated-radius-unitary-covariance",
    "classes.monotone": "class-chain",
    "equiv.quasinormal-fixed": "quasinormal-iff-fixed-point",
    "equiv.quasinormal-duggal": "quasinormal-iff-duggal-fixed-point",
    "equiv.zero-norm": "zero-norm-iff",
    "equiv.zero-radius": "zero-radius-iff",
    "equiv.norm-witness": "norm-equality-witness",
    "equiv.mean-norm": "mean-norm-equality-radius",
    "equiv.two-max": "two-max-equality-radius",
    "equiv.mean-lambda": "triangle-equality-scaling",
    "rank-one.iterate": "rank-one-iterate-radius",
    "rank-one.radius": "rank-one-iterate-radius",
    "shift.weights": "shift-lambda-mean-weights",
    "shift.upper-weights": "upper-shift-lambda-mean-weights",
    "shift.binomial": "shift-iterated-weights",
    "shift.hyponormal-criterion": "shift-lambda-mean-hyponormal",
    "shift.hyponormal-preserved": "shift-hyponormal-preserved",
    "shift.complex-symmetry": "shift-lambda-mean-complex-symmetry",
    "shift.scaled-spectrum": "shift-scaled-spectral-radius",
}


def _num(x) -> float | None:
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class Check:
    name: str
    anchor: str
    lhs: float
    rhs: float
    margin: float
    tol: float
    passed: bool
    context: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "theoremAnchor": self.anchor, "lhs": _num(self.lhs),
               "rhs": _num(self.rhs), "margin": _num(self.margin), "tol": self.tol,
               "pass": self.passed}
        out.update(self.context)
        return out


def _make(name, lhs, rhs, margin, tol, ctx, anchor=None) -> Check:
    if anchor is None:
        anchor = ANCHORS[name]
    return Check(name, anchor, float(lhs), float(rhs), float(margin), tol,
                 bool(margin >= -tol), dict(ctx))


def ineq(name, lhs, rhs, scale, tol=INEQ_TOL, anchor=None, **ctx) -> Check:
    """``lhs <= rhs``; pass the certified lower end of ``lhs`` and upper end of ``rhs``."""
    return _make(name, lhs, rhs, (rhs - lhs) / max(scale, 1e-300), tol, ctx, anchor)


def close(name, value, expected, tol, anchor=None, **ctx) -> Check:
    return _make(name, value, expected, -abs(value - expected), tol, ctx, anchor)


def agree(name, a: bool, b: bool, anchor=None, **ctx) -> Check:
    return _make(name, float(a), float(b), 1.0 if bool(a) == bool(b) else -1.0, 0.0, ctx, anchor)


def implies(name, a: bool, b: bool, anchor=None, **ctx) -> Check:
    return _make(name, float(a), float(b), -1.0 if (a and not b) else 1.0, 0.0, ctx, anchor)


@dataclass
class _Stat:
    name: str
    anchor: str
    count: int = 0
    failures: int = 0
    worst: Check | None = None

    def add(self, c: Check) -> None:
        self.count += 1
        self.failures += 0 if c.passed else 1
        if self.worst is None or c.margin + c.tol < self.worst.margin + self.worst.tol:
            self.worst = c

    def to_json(self) -> dict:
        w = self.worst
        return {"name": self.name, "theoremAnchor": self.anchor, "count": self.count,
                "failures": self.failures, "pass": self.failures == 0,
                "worstMargin": _num(w.margin), "tol": w.tol, "lhs": _num(w.lhs),
                "rhs": _num(w.rhs), "worstContext": w.context}


class Aggregator:
    """Per-name statistics plus every failing check in full."""

    def __init__(self, keep_all: bool = False):
        self.stats: dict[str, _Stat] = {}
        self.failed: list[Check] = []
        self.all: list[Check] | None = [] if keep_all else None

    def add(self, checks) -> None:
        for c in checks:
            st = self.stats.get(c.name)
            if st is None:
                st = self.stats[c.name] = _Stat(c.name, c.anchor)
            st.add(c)
            if not c.passed:
                self.failed.append(c)
            if self.all is not None:
                self.all.append(c)

    @property
    def passed(self) -> bool:
        return not self.failed

    def summary(self) -> list[dict]:
        return [self.stats[k].to_json() for k in sorted(self.stats)]


@dataclass
class VerifyReport:
    agg: Aggregator
    corpus_size: int
    seed: int | None
    lam_grid: list
    tolerances: dict
    pairs: int = 0
    timing: dict | None = None

    @property
    def passed(self) -> bool:
        return self.agg.passed

    @property
    def failures(self) -> list[Check]:
        return self.agg.failed

    @property
    def checks(self) -> list[dict]:
        return self.agg.summary()

    def check_names(self) -> set:
        return set(self.agg.stats)

    def find(self, name: str) -> list[Check]:
        if self.agg.all is None:
            raise RuntimeError("report was built without keep_all")
        return [c for c in self.agg.all if c.name == name]

    def to_json(self) -> dict:
        out = {
            "corpusSize": self.corpus_size,
            "pairs": self.pairs,
            "seed": self.seed,
            "lambdaGrid": [float(x) for x in self.lam_grid],
            "tolerances": self.tolerances,
            "passed": self.passed,
            "checks": self.checks,
            "failures": [c.to_json() for c in self.failures],
        }
        if self.timing is not None:
            out["timing"] = self.timing
        return out
