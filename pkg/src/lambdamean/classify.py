"""Tolerance-based operator class predicates.

Each flag is backed by a scaled residual and is true exactly when that
residual is at most ``tol``. After thresholding, the chain
normal => quasinormal => hyponormal is enforced by OR-ing the weaker flags
with the stronger ones, so borderline inputs can never break monotonicity.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .linalg import ABS_FLOOR, as_matrix

# anchor ids of the verified properties this module owns
INVARIANTS = (
    "class-chain",
    "shift-lambda-mean-hyponormal",
    "shift-hyponormal-preserved",
    "shift-lambda-mean-complex-symmetry",
    "shift-hyponormal-converse-fails",
    "complex-symmetry-not-preserved",
)

DEFAULT_TOL = 1e-9
FLAG_NAMES = ("normal", "quasinormal", "hyponormal", "partialIsometry", "isometry", "unitary")


@dataclass(frozen=True)
class ClassReport:
    flags: dict
    residuals: dict
    tol: float

    def __getattr__(self, name):
        flags = self.__dict__.get("flags", {})
        if name in flags:
            return flags[name]
        raise AttributeError(name)

    def to_json(self) -> dict:
        return asdict(self)


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def residuals(t) -> dict:
    """Scaled residuals; each is invariant under ``t -> c t`` except the isometry family."""
    t = as_matrix(t)
    n = t.shape[0]
    eye = np.eye(n)
    nt = max(_norm(t), ABS_FLOOR)
    tt = t.conj().T @ t
    ttc = t @ t.conj().T
    gap = tt - ttc
    hypo = max(0.0, -float(np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0]))
    return {
        "normal": _norm(gap) / nt ** 2,
        "quasinormal": _norm(t @ tt - tt @ t) / nt ** 3,
        "hyponormal": hypo / nt ** 2,
        # a partial isometry has norm 0 or 1, so this one is absolute
        "partialIsometry": _norm(ttc @ t - t) / max(nt ** 3, nt, 1.0),
        "isometry": _norm(tt - eye),
        "unitary": max(_norm(tt - eye), _norm(ttc - eye)),
    }


def classify(t, tol: float = DEFAULT_TOL) -> ClassReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    res = residuals(t)
    raw = {name: res[name] <= tol for name in FLAG_NAMES}
    flags = dict(raw)
    flags["normal"] = raw["normal"] or raw["unitary"]
    flags["quasinormal"] = raw["quasinormal"] or flags["normal"]
    flags["hyponormal"] = raw["hyponormal"] or flags["quasinormal"]
    flags["isometry"] = raw["isometry"] or raw["unitary"]
    flags["partialIsometry"] = raw["partialIsometry"] or flags["isometry"]
    return ClassReport(flags=flags, residuals=res, tol=tol)


# -- weighted-shift criteria -------------------------------------------------

def _weights(alpha) -> np.ndarray:
    w = np.asarray(getattr(alpha, "weights", alpha), dtype=complex)
    if w.ndim != 1:
        raise ValueError("weights must be a 1-D sequence")
    return w


def _wtol(w: np.ndarray, tol: float) -> float:
    return tol * max(float(np.max(np.abs(w))) if w.size else 0.0, ABS_FLOOR)


def shift_is_hyponormal(alpha, tol: float = DEFAULT_TOL) -> bool:
    """A weighted shift is hyponormal iff its weights never decrease."""
    w = np.abs(_weights(alpha))
    if np.any(w <= 0):
        raise ValueError("shift weights must be positive")
    return bool(np.all(np.diff(w) >= -_wtol(w, tol)))


def shift_cs_criterion(alpha, tol: float = DEFAULT_TOL) -> bool:
    """Complex symmetry of a truncated shift with nonzero weights: moduli form a palindrome."""
    w = np.abs(_weights(alpha))
    if w.size == 0 or np.any(w == 0):
        raise ValueError("weights must be nonzero")
    return bool(np.all(np.abs(w - w[::-1]) <= _wtol(w, tol)))


def upper_lambda_mean_weights(alpha, lam: float) -> np.ndarray:
    """Moduli of the weights of ``M_lam`` for an upper truncated shift.

    For ``T = sum_k a_k e_k (x) e_{k+1}`` (superdiagonal ``a_1 .. a_{m-1}``)
    the new weights are ``lam |a_k| + (1 - lam) |a_{k-1}|`` with ``a_0 = 0``.
    """
    w = np.abs(_weights(alpha))
    prev = np.concatenate(([0.0], w[:-1]))
    return lam * w + (1.0 - lam) * prev


def lambda_mean_cs_criterion(alpha, lam: float, tol: float = DEFAULT_TOL) -> bool:
    """Direct criterion for complex symmetry of ``M_lam`` of an upper truncated shift.

    ``alpha`` holds ``a_1 .. a_{m-1}`` (1-based), ``m >= 3``. The first
    condition pairs the two end weights; the others pair ``n`` with ``m - n``.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    a = np.abs(_weights(alpha))
    m = a.size + 1
    if m < 3:
        raise ValueError("need at least two weights")
    if a[0] == 0:
        raise ValueError("first weight must be nonzero")
    if np.any(lam * a[1:] + (1.0 - lam) * a[:-1] == 0):
        raise ValueError("interior transformed weights must be nonzero")

    def at(k):  # 1-based access
        return a[k - 1]

    eps = _wtol(a, tol)
    if abs(lam * (at(1) - at(m - 1)) - (1.0 - lam) * at(m - 2)) > eps:
        return False
    for n in range(2, m - 1):
        lhs = lam * (at(n) - at(m - n))
        rhs = (1.0 - lam) * (at(m - n - 1) - at(n - 1))
        if abs(lhs - rhs) > eps:
            return False
    return True


def lambda_mean_hyponormal_criterion(alpha, lam: float, tol: float = DEFAULT_TOL) -> bool:
    """Pointwise test ``lam (a_n - a_{n+1}) <= (1 - lam)(a_{n+2} - a_{n+1})`` over the window.

    ``alpha`` is a finite prefix ``a_0 .. a_k`` of a lower-shift weight
    sequence; indices ``n = 0 .. k - 2`` are covered.
    """
    a = np.abs(_weights(alpha))
    if a.size < 3:
        raise ValueError("need at least three weights")
    lhs = lam * (a[:-2] - a[1:-1])
    rhs = (1.0 - lam) * (a[2:] - a[1:-1])
    return bool(np.all(lhs <= rhs + _wtol(a, tol)))


def lambda_mean_hyponormal_direct(alpha, lam: float, tol: float = DEFAULT_TOL) -> bool:
    """Hyponormality of the transformed window ``lam a_n + (1 - lam) a_{n+1}``."""
    a = np.abs(_weights(alpha))
    if a.size < 3:
        raise ValueError("need at least three weights")
    moved = lam * a[:-1] + (1.0 - lam) * a[1:]
    return bool(np.all(np.diff(moved) >= -_wtol(a, tol)))
