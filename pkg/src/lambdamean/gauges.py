"""Certified numerical-radius and norm gauges.

The workhorse is the support function ``h(theta) = lambda_max(Re(e^{i theta} T))``
of the numerical range W(T). Its maximum over the circle is the numerical
radius. Brackets are certified from samples of ``h`` in two ways and the
smaller upper bound wins on each cell ``[a, b]``:

* Lipschitz: ``|h(a) - h(b)| <= ||T|| |a - b|``.
* Supporting lines: W(T) lies in the wedge cut out by the supporting lines at
  ``a`` and ``b``, so ``h`` on the cell is bounded by the wedge vertex.

The second bound closes quadratically in the cell width, the first keeps the
estimate sane on wide cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import (
    ABS_FLOOR,
    EPS,
    as_matrix,
    get_backend,
    hermitian_eig,
    operator_norm,
)
from .transforms import duggal

# anchor ids of the verified properties this module owns
INVARIANTS = (
    "numerical-radius-norm-equivalence",
    "duggal-range-inclusion",
    "lambda-mean-norm-heinz-bounds",
    "lambda-mean-norm-spectral-bounds",
    "lambda-mean-norm-mixed-schwarz",
    "lambda-mean-norm-quartic",
    "lambda-mean-norm-quartic-chain",
    "lambda-mean-radius-bounds",
    "lambda-mean-radius-spectral-bounds",
    "lambda-mean-radius-integral",
    "mean-radius-integral",
    "lambda-mean-radius-cross-term",
    "lambda-mean-range-inclusion",
    "zero-radius-iff",
    "norm-equality-witness",
    "mean-norm-equality-radius",
    "two-max-equality-radius",
    "triangle-equality-scaling",
    "mean-norm-bound-example",
    "radius-integral-example",
    "cross-term-example",
)

DEFAULT_BUDGET = 4096
TWO_PI = 2.0 * math.pi


class BudgetExceeded(RuntimeError):
    """Evaluation cap reached before the requested tolerance.

    ``bracket`` holds the best certified enclosure found so far.
    """

    def __init__(self, msg, bracket: "GaugeBracket"):
        super().__init__(msg)
        self.bracket = bracket


@dataclass(frozen=True)
class GaugeBracket:
    lo: float
    hi: float
    evaluations: int = 0
    method: str = "grid-refine"

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class RangePoint:
    theta: float
    value: complex
    support: float


def _re_parts(t: np.ndarray):
    return 0.5 * (t + t.conj().T), 0.5j * (t.conj().T - t)


def _rotated(t: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Stack of ``Re(e^{i theta} T) = cos(theta) Re T - sin(theta) Im T``."""
    h, k = _re_parts(t)
    c = np.cos(thetas)[:, None, None]
    s = np.sin(thetas)[:, None, None]
    return c * h - s * k


def _top_eigvals(mats: np.ndarray) -> np.ndarray:
    if get_backend() == "native":
        return np.array([hermitian_eig(m).values[-1] for m in mats])
    return np.linalg.eigvalsh(mats)[:, -1]


def support_values(t, thetas) -> np.ndarray:
    t = as_matrix(t)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    return _top_eigvals(_rotated(t, thetas))


def support_function(t, theta: float) -> float:
    """``lambda_max(Re(e^{i theta} T))``; ``||Re(e^{i theta} T)||`` is the larger of theta and theta + pi."""
    return float(support_values(t, [theta])[0])


def _cell_bounds(a, b, ha, hb, lip, dh):
    ub_lip = 0.5 * (ha + hb) + 0.5 * lip * (b - a)
    det = np.sin(a - b)
    x = (hb * np.sin(a) - ha * np.sin(b)) / det
    y = (hb * np.cos(a) - ha * np.cos(b)) / det
    radius = np.hypot(x, y)
    peak = np.mod(-np.arctan2(y, x) - a, TWO_PI)
    ub_poly = np.where(peak <= b - a, radius, np.maximum(ha, hb))
    # With the peak direction inside the cell, an error d in either support
    # value moves |v| by at most d, so the vertex needs only 2 * dh of slack.
    ub_poly = ub_poly + 2.0 * dh
    return np.minimum(ub_lip, ub_poly) + dh


def numerical_radius(t, tol: float = 1e-9, budget: int = DEFAULT_BUDGET,
                     grid: int = 16) -> GaugeBracket:
    """Certified enclosure of the numerical radius.

    ``lo`` is the best sampled support value and ``hi`` the largest per-cell
    upper bound, each widened by an eigenvalue rounding allowance, so the
    width never goes below about ``64 n eps ||T||`` even if ``tol`` asks
    for less.
    """
    t = as_matrix(t)
    lip = operator_norm(t)
    if lip == 0.0:
        return GaugeBracket(0.0, 0.0, 0, "closed-form")
    n = t.shape[0]
    dh = 8.0 * n * EPS * lip
    tol = max(tol, 64.0 * n * EPS * lip)
    thetas = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    values = support_values(t, thetas)
    evals = grid
    while True:
        b = np.append(thetas[1:], thetas[0] + TWO_PI)
        hb = np.append(values[1:], values[0])
        ub = _cell_bounds(thetas, b, values, hb, lip, dh)
        lo = max(float(values.max()) - dh, 0.0)
        hi = max(float(ub.max()), lo)
        if hi - lo <= tol:
            return GaugeBracket(lo, hi, evals, "grid-refine")
        split = np.flatnonzero(ub > lo + 0.5 * tol)
        if evals + split.size > budget:
            raise BudgetExceeded(f"numerical radius needs more than {budget} evaluations",
                                 GaugeBracket(lo, hi, evals, "grid-refine"))
        mids = 0.5 * (thetas[split] + b[split])
        new = support_values(t, mids)
        evals += split.size
        thetas = np.insert(thetas, split + 1, mids)
        values = np.insert(values, split + 1, new)


def numerical_radius_bracket(t, tol: float = 1e-9, budget: int = DEFAULT_BUDGET) -> GaugeBracket:
    """Like :func:`numerical_radius` but returns the partial bracket instead of raising."""
    try:
        return numerical_radius(t, tol, budget)
    except BudgetExceeded as exc:
        return exc.bracket


def range_boundary(t, m: int) -> list[RangePoint]:
    """``m`` boundary points of W(T) from top eigenvectors on an even angle grid."""
    if m < 3:
        raise ValueError("need at least 3 boundary points")
    t = as_matrix(t)
    thetas = np.linspace(0.0, TWO_PI, m, endpoint=False)
    points = []
    for theta, mat in zip(thetas, _rotated(t, thetas)):
        eig = hermitian_eig(mat)
        x = eig.vectors[:, -1]
        points.append(RangePoint(float(theta), complex(np.vdot(x, t @ x)), float(eig.values[-1])))
    return points


def range_inclusion(a, b, grid: int | np.ndarray = 64, tol: float | None = None) -> bool:
    """Whether closure W(a) is contained in closure W(b), tested on support values.

    Closed convex sets are ordered by inclusion exactly when their support
    functions are, so this is exact up to the angular sampling.
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError("operators must share a dimension")
    thetas = (np.linspace(0.0, TWO_PI, grid, endpoint=False)
              if np.isscalar(grid) else np.asarray(grid, dtype=float))
    if tol is None:
        tol = 1e-10 * max(operator_norm(a), operator_norm(b), ABS_FLOOR)
    return bool(np.all(support_values(a, thetas) <= support_values(b, thetas) + tol))


def inclusion_margin(a, b, grid: int = 64) -> float:
    """``min_theta h_b(theta) - h_a(theta)``; nonnegative when W(a) sits inside W(b)."""
    thetas = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    return float(np.min(support_values(b, thetas) - support_values(a, thetas)))


# -- integrals of convex gauges ----------------------------------------------

def convex_integral(f: Callable[[float], GaugeBracket], tol: float,
                    max_nodes: int = 1025) -> GaugeBracket:
    """Bracket ``int_0^1 f`` for a convex ``f`` known only through brackets.

    On every cell the midpoint value is a lower bound for the mean
    (Hermite-Hadamard) and ``(trapezoid + midpoint) / 2`` is an upper bound
    (Hammer-Bullen). Cells are bisected, widest first, until the summed
    width is at most ``tol``.
    """
    cache: dict[float, GaugeBracket] = {}

    def value(s: float) -> GaugeBracket:
        if s not in cache:
            cache[s] = f(s)
        return cache[s]

    def bounds(a: float, b: float) -> tuple[float, float]:
        m = 0.5 * (a + b)
        fa, fm, fb = value(a), value(m), value(b)
        w = b - a
        return w * fm.lo, 0.5 * w * (0.5 * (fa.hi + fb.hi) + fm.hi)

    cells = {(0.0, 1.0): bounds(0.0, 1.0)}
    while True:
        lo = sum(c[0] for c in cells.values())
        hi = sum(c[1] for c in cells.values())
        evals = sum(v.evaluations for v in cache.values())
        if hi - lo <= tol:
            return GaugeBracket(min(lo, hi), hi, evals, "quadrature")
        if len(cache) >= max_nodes:
            raise BudgetExceeded("convex quadrature exhausted its node budget",
                                 GaugeBracket(min(lo, hi), hi, evals, "quadrature"))
        ranked = sorted(cells.items(), key=lambda kv: kv[1][0] - kv[1][1])
        target = 0.5 * (hi - lo)
        acc = 0.0
        for (a, b), (clo, chi) in ranked:
            if acc >= target:
                break
            acc += chi - clo
            del cells[(a, b)]
            m = 0.5 * (a + b)
            cells[(a, m)] = bounds(a, m)
            cells[(m, b)] = bounds(m, b)


def radius_integral(t, tol: float = 1e-4, inner_tol: float | None = None) -> GaugeBracket:
    """Bracket ``int_0^1 omega(s T + (1 - s) T^D) ds``."""
    t = as_matrix(t)
    td = duggal(t)
    inner = inner_tol if inner_tol is not None else tol / 8.0
    return convex_integral(lambda s: numerical_radius_bracket(s * t + (1.0 - s) * td, inner), tol)


def weighted_radius_integral(t, lam: float, tol: float = 1e-4,
                             td: np.ndarray | None = None,
                             inner_tol: float | None = None) -> GaugeBracket:
    """Bracket ``int_0^1 omega(lam s T + (1 - lam)(1 - s) T^D) ds``."""
    t = as_matrix(t)
    td = duggal(t) if td is None else td
    inner = inner_tol if inner_tol is not None else tol / 8.0
    a, b = lam * t, (1.0 - lam) * td
    return convex_integral(lambda s: numerical_radius_bracket(s * a + (1.0 - s) * b, inner), tol)


# -- cross term ---------------------------------------------------------------

def _cross_coeffs(t: np.ndarray, td: np.ndarray) -> np.ndarray:
    """``C0, C1, C2`` with ``Re(e^{i theta} T) Re(e^{i theta} T^D) = C0 + C1 cos 2theta + C2 sin 2theta``."""
    h1, k1 = _re_parts(t)
    h2, k2 = _re_parts(td)
    return np.stack([0.5 * (h1 @ h2 + k1 @ k2),
                     0.5 * (h1 @ h2 - k1 @ k2),
                     -0.5 * (h1 @ k2 + k1 @ h2)])


def _cross_norms(coeffs: np.ndarray, c: np.ndarray, s: np.ndarray) -> np.ndarray:
    mats = coeffs[0] + c[:, None, None] * coeffs[1] + s[:, None, None] * coeffs[2]
    return np.linalg.norm(mats, ord=2, axis=(1, 2))


def cross_term_sup(t, tol: float = 1e-6, budget: int = DEFAULT_BUDGET,
                   td: np.ndarray | None = None, grid: int = 32) -> GaugeBracket:
    """Bracket ``sup_theta ||Re(e^{i theta} T) Re(e^{i theta} T^D)||``.

    The map is pi-periodic. Each cell ``[a, b]`` is bounded by the smaller of
    the Lipschitz estimate (constant ``2 ||T|| ||T^D||``) and a tangent
    bound: ``(1, cos 2theta, sin 2theta)`` stays in the cone spanned by its
    values at ``a``, ``b`` and the crossing of the circle tangents there, and
    a norm is convex, so the cell maximum is at most the largest of the three
    corresponding norms.
    """
    t = as_matrix(t)
    td = duggal(t) if td is None else as_matrix(td)
    lip = 2.0 * operator_norm(t) * operator_norm(td)
    if lip == 0.0:
        return GaugeBracket(0.0, 0.0, 0, "closed-form")
    coeffs = _cross_coeffs(t, td)
    n = t.shape[0]
    dg = 8.0 * n * EPS * lip
    tol = max(tol, 4.0 * dg)

    def values_at(th):
        return _cross_norms(coeffs, np.cos(2 * th), np.sin(2 * th))

    def cell_ub(a, b, ga, gb):
        m = 0.5 * (a + b)
        stretch = 1.0 / np.cos(b - a)
        corner = _cross_norms(coeffs, stretch * np.cos(2 * m), stretch * np.sin(2 * m))
        tangent = np.maximum(np.maximum(ga, gb), corner)
        return np.minimum(0.5 * (ga + gb) + 0.5 * lip * (b - a), tangent) + dg

    thetas = np.linspace(0.0, math.pi, grid, endpoint=False)
    values = values_at(thetas)
    ends = np.append(thetas[1:], math.pi)
    ub = cell_ub(thetas, ends, values, np.append(values[1:], values[0]))
    evals = 2 * grid
    while True:
        lo = max(float(values.max()) - dg, 0.0)
        hi = max(float(ub.max()), lo)
        if hi - lo <= tol:
            return GaugeBracket(lo, hi, evals, "grid-refine")
        split = np.flatnonzero(ub > lo + 0.5 * tol)
        if evals + 3 * split.size > budget:
            raise BudgetExceeded(f"cross-term supremum needs more than {budget} evaluations",
                                 GaugeBracket(lo, hi, evals, "grid-refine"))
        a = thetas[split]
        b = np.append(thetas[1:], math.pi)[split]
        ga = values[split]
        gb = np.append(values[1:], values[0])[split]
        mids = 0.5 * (a + b)
        gm = values_at(mids)
        left = cell_ub(a, mids, ga, gm)
        right = cell_ub(mids, b, gm, gb)
        evals += 3 * split.size
        thetas = np.insert(thetas, split + 1, mids)
        values = np.insert(values, split + 1, gm)
        ub[split] = left
        ub = np.insert(ub, split + 1, right)


def cross_term_bracket(t, tol: float = 1e-6, budget: int = DEFAULT_BUDGET,
                       td: np.ndarray | None = None) -> GaugeBracket:
    """Like :func:`cross_term_sup` but returns the partial bracket instead of raising."""
    try:
        return cross_term_sup(t, tol, budget, td=td)
    except BudgetExceeded as exc:
        return exc.bracket


# -- closed forms and equality tests -----------------------------------------

def inner(x, y) -> complex:
    """``<x, y>``, linear in ``x`` and conjugate-linear in ``y``."""
    return complex(np.vdot(np.asarray(y), np.asarray(x)))


def rank_one(x, y) -> np.ndarray:
    """Matrix of ``z -> <z, y> x``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return np.outer(x, y.conj())


def rank_one_radius(x, y) -> float:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise ValueError("vectors must share a dimension")
    return 0.5 * (abs(inner(x, y)) + float(np.linalg.norm(x) * np.linalg.norm(y)))


EQ_REL_TOL = 1e-7


def equality_witness(t, lam: float, td: np.ndarray | None = None) -> tuple[float, bool]:
    """Maximum of ``Re <Tx, T^D x>`` over unit ``x`` and whether it reaches ``||T||^2``.

    In finite dimension the maximizing sequence can be replaced by a top
    eigenvector of the Hermitian part of ``(T^D)^* T``. The flag uses the
    shared predicate tolerance ``EQ_REL_TOL * ||T||^2``.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    t = as_matrix(t)
    td = duggal(t) if td is None else as_matrix(td)
    g = td.conj().T @ t
    value = float(hermitian_eig(0.5 * (g + g.conj().T)).values[-1])
    nt2 = operator_norm(t) ** 2
    return value, abs(value - nt2) <= EQ_REL_TOL * max(nt2, ABS_FLOOR)
