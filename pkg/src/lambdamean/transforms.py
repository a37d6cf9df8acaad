"""Operator transforms built from the canonical polar decomposition ``T = U|T|``.

Every function accepts an optional precomputed :class:`~lambdamean.linalg.PolarParts`
so callers that need several transforms of one operator decompose it once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    EPS,
    PolarParts,
    as_matrix,
    default_rank_tol,
    fractional_power,
    hermitian_part,
    polar_decompose,
    svd,
)

# anchor ids of the verified properties this module owns
INVARIANTS = (
    "quasinormal-iff-fixed-point",
    "quasinormal-iff-duggal-fixed-point",
    "zero-norm-iff",
    "iterated-radius-unitary-covariance",
    "duggal-translate-contraction",
    "jordan-zero-duggal",
    "lambda-mean-spectrum-example",
)


@dataclass(frozen=True)
class TransformParams:
    lam: float = 0.5
    t: float = 0.0
    iterations: int = 1

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if not 0.0 <= self.t <= 0.5:
            raise ValueError(f"t must lie in [0, 1/2], got {self.t}")
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")


def _check_lambda(lam: float) -> None:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")


def _parts(t, polar: PolarParts | None) -> tuple[np.ndarray, PolarParts]:
    t = as_matrix(t)
    return t, polar if polar is not None else polar_decompose(t)


def duggal(t, polar: PolarParts | None = None) -> np.ndarray:
    """Duggal transform ``|T| U``."""
    _, pp = _parts(t, polar)
    return pp.p @ pp.u


def aluthge(t, polar: PolarParts | None = None) -> np.ndarray:
    """Aluthge transform ``|T|^{1/2} U |T|^{1/2}``."""
    _, pp = _parts(t, polar)
    root = fractional_power(pp.p, 0.5)
    return root @ pp.u @ root


def lambda_mean(t, lam: float, polar: PolarParts | None = None) -> np.ndarray:
    """``lam * T + (1 - lam) * T^D``.

    The endpoints return ``T`` and ``T^D`` without any arithmetic on the other
    term, so ``lambda_mean(t, 1)`` is bitwise ``t``.
    """
    _check_lambda(lam)
    t, pp = _parts(t, polar)
    if lam == 1.0:
        return t.copy()
    td = pp.p @ pp.u
    if lam == 0.0:
        return td
    return lam * t + (1.0 - lam) * td


def mean(t, polar: PolarParts | None = None) -> np.ndarray:
    return lambda_mean(t, 0.5, polar)


def generalized_mean(t, tparam: float, polar: PolarParts | None = None) -> np.ndarray:
    """``(|T|^s U |T|^{1-s} + |T|^{1-s} U |T|^s) / 2`` for ``s`` in [0, 1/2].

    ``|T|^0`` is the range projection of ``|T|``, so at ``s = 0`` this equals
    the mean transform only when ``T`` is invertible.
    """
    if not 0.0 <= tparam <= 0.5:
        raise ValueError(f"t must lie in [0, 1/2], got {tparam}")
    _, pp = _parts(t, polar)
    a = fractional_power(pp.p, tparam)
    b = fractional_power(pp.p, 1.0 - tparam)
    return 0.5 * (a @ pp.u @ b + b @ pp.u @ a)


# Rounding noise carried by an iterate is tracked to first order: a step on a
# matrix with smallest kept singular value ``s_r`` can amplify an input error
# by about ``2 + 2 ||T|| / s_r`` (the polar factor moves by ``2 ||dT|| / s_r``).
# Rank thresholds sit this many noise levels above the estimate.
ITERATE_RANK_SLACK = 4.0
# The estimate is a worst case and can overtake genuine singular values on
# badly conditioned inputs, so the threshold is capped relative to ||T||.
ITERATE_RANK_CAP = float(np.sqrt(EPS))


def iterate_lambda_mean(t, lam: float, n: int) -> np.ndarray:
    """Apply :func:`lambda_mean` ``n`` times, re-decomposing after each step.

    Each step uses the rank threshold ``ITERATE_RANK_SLACK * noise`` (never
    below the default threshold, never above ``ITERATE_RANK_CAP * ||T||``), where ``noise`` is the running first-order
    error estimate above. Without it, rounding noise from earlier steps is
    promoted to spurious rank and the canonical polar factor jumps.
    """
    _check_lambda(lam)
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    out = as_matrix(t)
    dim = out.shape[0]
    noise = dim * EPS * float(np.linalg.norm(out, 2))
    for _ in range(n):
        sing = svd(out)[1]
        if sing[0] == 0.0:
            break
        tol = max(min(ITERATE_RANK_SLACK * noise, ITERATE_RANK_CAP * sing[0]), default_rank_tol(sing))
        pp = polar_decompose(out, tol)
        out = lambda_mean(out, lam, pp)
        if pp.rank:
            noise = noise * (2.0 + 2.0 * sing[0] / sing[pp.rank - 1]) + dim * EPS * sing[0]
    return out


def q_lambda(t, lam: float, polar: PolarParts | None = None) -> np.ndarray:
    """``lam^2 |T|^2 + (1 - lam)^2 |T^D|^2``, a positive semidefinite matrix."""
    _check_lambda(lam)
    t, pp = _parts(t, polar)
    td = pp.p @ pp.u
    out = lam ** 2 * (t.conj().T @ t) + (1.0 - lam) ** 2 * (td.conj().T @ td)
    return hermitian_part(out)


KINDS = ("duggal", "aluthge", "mean", "lambda-mean", "generalized")


def apply(t, kind: str, params: TransformParams) -> np.ndarray:
    """Dispatch used by the ``transform`` CLI command."""
    if kind == "duggal":
        return duggal(t)
    if kind == "aluthge":
        return aluthge(t)
    if kind == "mean":
        return mean(t)
    if kind == "lambda-mean":
        return iterate_lambda_mean(t, params.lam, params.iterations)
    if kind == "generalized":
        return generalized_mean(t, params.t)
    raise ValueError(f"unknown transform kind {kind!r}")
