"""Weighted-shift laboratory.

Internally every shift uses the lower convention ``W e_n = a_n e_{n+1}``,
so weights sit on the subdiagonal. A superdiagonal ("upper") shift with
weights ``b_1 .. b_{m-1}`` is carried to the lower convention by the flip
``J T J`` (``J`` reverses the basis), which reverses the weight order.
Unlike the transpose, this flip is a unitary similarity and therefore
commutes with every polar-based transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, spectral_radius
from .transforms import lambda_mean

# anchor ids of the verified properties this module owns
INVARIANTS = (
    "shift-lambda-mean-weights",
    "upper-shift-lambda-mean-weights",
    "shift-iterated-weights",
    "rank-one-iterate-radius",
    "shift-scaled-spectral-radius",
)

RULES = ("harmonic", "geometric", "constant", "saturating", "custom")


class IndexOutOfWindow(IndexError):
    """A finite weight list does not cover the requested indices."""


@dataclass(frozen=True)
class WeightSequence:
    """Positive shift weights, either a finite list or a named rule.

    Rules (``k >= 0``):

    ``harmonic``     ``scale / (k + 1)``, decreasing to 0
    ``geometric``    ``scale * ratio**k``, decreasing to 0 for ratio < 1
    ``constant``     ``scale``
    ``saturating``   ``scale * (1 - 2**-(k + 1))``, increasing to ``scale``
    ``custom``       the explicit ``weights`` list
    """

    rule: str = "custom"
    weights: tuple = ()
    scale: float = 1.0
    ratio: float = 0.5
    convention: str = "lower"

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown weight rule {self.rule!r}")
        if self.convention not in ("lower", "upper"):
            raise ValueError("convention must be 'lower' or 'upper'")
        if self.rule == "custom":
            w = tuple(float(x) for x in self.weights)
            if any(not x > 0 for x in w):
                raise ValueError("weights must be positive")
            object.__setattr__(self, "weights", w)
        elif self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.rule == "geometric" and not 0.0 < self.ratio <= 1.0:
            raise ValueError("geometric ratio must lie in (0, 1] to stay bounded")

    @classmethod
    def of(cls, weights, convention: str = "lower") -> "WeightSequence":
        return cls(rule="custom", weights=tuple(weights), convention=convention)

    @property
    def finite(self) -> bool:
        return self.rule == "custom"

    def __len__(self):
        if not self.finite:
            raise TypeError("rule-based sequences are infinite")
        return len(self.weights)

    def values(self, start: int, stop: int) -> np.ndarray:
        """Weights ``a_start .. a_{stop-1}``."""
        if start < 0 or stop < start:
            raise IndexOutOfWindow(f"bad index range [{start}, {stop})")
        k = np.arange(start, stop, dtype=float)
        if self.rule == "custom":
            if stop > len(self.weights):
                raise IndexOutOfWindow(f"need index {stop - 1}, have {len(self.weights)} weights")
            return np.array(self.weights[start:stop], dtype=float)
        if self.rule == "harmonic":
            return self.scale / (k + 1.0)
        if self.rule == "geometric":
            return self.scale * self.ratio ** k
        if self.rule == "constant":
            return np.full(k.shape, self.scale)
        return self.scale * (1.0 - 2.0 ** -(k + 1.0))

    def __getitem__(self, k: int) -> float:
        return float(self.values(k, k + 1)[0])

    def monotonicity(self) -> str:
        """One of ``decreasing``, ``increasing``, ``constant`` or ``none``."""
        if self.rule == "harmonic" or (self.rule == "geometric" and self.ratio < 1):
            return "decreasing"
        if self.rule == "saturating":
            return "increasing"
        if self.rule in ("constant", "geometric"):
            return "constant"
        d = np.diff(self.weights)
        if np.all(d == 0):
            return "constant"
        if np.all(d <= 0):
            return "decreasing"
        if np.all(d >= 0):
            return "increasing"
        return "none"

    def limit(self) -> float:
        """inf of a decreasing sequence, sup of an increasing one."""
        kind = self.monotonicity()
        if self.rule in ("harmonic", "geometric") and kind == "decreasing":
            return 0.0
        if self.rule in ("saturating", "constant", "geometric"):
            return self.scale
        if kind == "decreasing":
            return min(self.weights)
        if kind in ("increasing", "constant"):
            return max(self.weights)
        raise ValueError("limit is only defined for monotone sequences")


def _as_seq(alpha) -> WeightSequence:
    return alpha if isinstance(alpha, WeightSequence) else WeightSequence.of(alpha)


def build_shift(alpha, m: int) -> np.ndarray:
    """``m x m`` truncated shift. Lower: ``W[n+1, n] = a_n``; upper: ``W[n, n+1] = a_{n+1}`` (1-based weights)."""
    if m < 1:
        raise ValueError("dimension must be positive")
    seq = _as_seq(alpha)
    w = seq.values(0, m - 1)
    offset = -1 if seq.convention == "lower" else 1
    return np.diag(w.astype(complex), offset) if m > 1 else np.zeros((1, 1), complex)


def flip(t) -> np.ndarray:
    """``J t J`` with ``J`` the reversal permutation; maps upper shifts to lower ones."""
    t = as_matrix(t)
    return t[::-1, ::-1].copy()


def to_lower(alpha: WeightSequence) -> WeightSequence:
    if alpha.convention == "lower":
        return alpha
    if not alpha.finite:
        raise ValueError("only finite upper sequences can be flipped")
    return WeightSequence.of(alpha.weights[::-1], "lower")


def lambda_mean_weights(alpha, lam: float, truncated: bool = True, m: int | None = None) -> np.ndarray:
    """Weights of ``M_lam`` of the lower shift: ``lam a_n + (1 - lam) a_{n+1}``.

    With ``truncated`` the ``m x m`` section is meant (``m`` defaults to
    ``len(alpha) + 1``) and ``a_{m-1}`` is taken as 0, because the canonical
    polar factor of a truncated shift annihilates the last basis vector.
    Otherwise the infinite rule is applied to indices ``0 .. m-2``, which
    reads one weight past the window.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    seq = _as_seq(alpha)
    if m is None:
        if not seq.finite:
            raise ValueError("rule-based sequences need an explicit m")
        m = len(seq) + 1
    if truncated:
        a = seq.values(0, m - 1)
        nxt = np.append(a[1:], 0.0)
    else:
        full = seq.values(0, m)
        a, nxt = full[:-1], full[1:]
    return lam * a + (1.0 - lam) * nxt


def iterated_weights(alpha, lam: float, m_iter: int, n: int) -> float:
    """Weight at index ``n`` after ``m_iter`` infinite-rule iterations.

    Equals ``sum_i C(m_iter, i) lam**(m_iter - i) (1 - lam)**i a_{n+i}``.
    Binomial probabilities are formed in log space so large ``m_iter`` do
    not overflow.
    """
    if m_iter < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    seq = _as_seq(alpha)
    a = seq.values(n, n + m_iter + 1)
    return float(np.dot(_binomial_pmf(m_iter, lam), a))


def _binomial_pmf(m: int, lam: float) -> np.ndarray:
    """``C(m, i) lam**(m-i) (1-lam)**i`` for ``i = 0..m``."""
    if lam == 1.0 or lam == 0.0:
        out = np.zeros(m + 1)
        out[0 if lam == 1.0 else m] = 1.0
        return out
    i = np.arange(m + 1)
    logc = np.array([math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1) for k in i])
    return np.exp(logc + (m - i) * math.log(lam) + i * math.log1p(-lam))


def iterate_rule(alpha, lam: float, m_iter: int, window: int) -> np.ndarray:
    """Same quantity as :func:`iterated_weights` on ``0 .. window-1``, by repeated averaging.

    Independent of the binomial sum: it applies ``b_n <- lam b_n + (1 - lam) b_{n+1}``
    ``m_iter`` times to a long enough prefix.
    """
    b = _as_seq(alpha).values(0, window + m_iter)
    for _ in range(m_iter):
        b = lam * b[:-1] + (1.0 - lam) * b[1:]
    return b[:window]


@dataclass(frozen=True)
class ConvergenceReport:
    limit: float
    errors: list  # (m_iter, window error) pairs
    tol: float

    @property
    def final_error(self) -> float:
        return self.errors[-1][1]

    @property
    def converged(self) -> bool:
        return self.final_error < self.tol

    @property
    def monotone(self) -> bool:
        errs = [e for _, e in self.errors]
        return all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def convergence_experiment(alpha, lam: float, m_max: int, window: int = 8,
                           tol: float = 1e-6) -> ConvergenceReport:
    """Window error ``max_{n < window} |weight_n after m iterations - limit|`` for ``m = 0..m_max``.

    The limit is the infimum of a decreasing sequence or the supremum of an
    increasing one. Works on weight rules only, never on truncated matrices.
    """
    if not 0.0 <= lam < 1.0:
        raise ValueError("lambda must lie in [0, 1)")
    seq = _as_seq(alpha)
    limit = seq.limit()
    a = seq.values(0, window + m_max)
    errors = []
    for m in range(m_max + 1):
        pmf = _binomial_pmf(m, lam)
        vals = np.array([pmf @ a[n:n + m + 1] for n in range(window)])
        errors.append((m, float(np.max(np.abs(vals - limit)))))
    return ConvergenceReport(limit=limit, errors=errors, tol=tol)


# -- rank one ------------------------------------------------------------------

@dataclass(frozen=True)
class RankOnePair:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        y = np.asarray(self.y, dtype=complex)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be vectors of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def matrix(self) -> np.ndarray:
        return np.outer(self.x, self.y.conj())


def rank_one_iterate(pair: RankOnePair, lam: float, n: int) -> RankOnePair:
    """Closed form of the ``n``-th iterated ``lam``-mean of ``x (x) y``; only ``x`` moves."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    ny2 = float(np.vdot(pair.y, pair.y).real)
    if ny2 == 0.0:
        raise ValueError("y must be nonzero")
    c = np.vdot(pair.y, pair.x) / ny2
    ln = lam ** n
    return RankOnePair(ln * pair.x + (1.0 - ln) * c * pair.y, pair.y)


def rank_one_iterate_radius(pair: RankOnePair, lam: float, n: int) -> float:
    """Numerical radius of the ``n``-th iterate, in closed form."""
    ip = abs(np.vdot(pair.y, pair.x))
    nx2 = float(np.vdot(pair.x, pair.x).real)
    ny2 = float(np.vdot(pair.y, pair.y).real)
    l2n = lam ** (2 * n)
    return 0.5 * (ip + math.sqrt(l2n * nx2 * ny2 + (1.0 - l2n) * ip * ip))


def scaled_spectrum_check(t, lam: float, tol: float = 1e-10) -> bool:
    """``2 sqrt(lam - lam^2) r(T) <= r(M_lam(T)) + tol * ||T||``.

    Only the spectral-radius form is checked; for finite matrices the disk
    inclusion it comes from has no analogue.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    t = as_matrix(t)
    lhs = 2.0 * math.sqrt(lam - lam * lam) * spectral_radius(t)
    rhs = spectral_radius(lambda_mean(t, lam))
    return lhs <= rhs + tol * max(float(np.linalg.norm(t, 2)), 1e-14)
