"""Seeded random operators of known class."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..classify import classify
from ..linalg import EPS

KINDS = ("ginibre", "normal", "quasinormal", "partialIsometry",
         "rankOne", "truncatedShift", "nilpotent", "positive")
CERT_TOL = 1e-10


class KindUnsatisfied(RuntimeError):
    """A generated matrix failed certification for its declared kind."""


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    dim: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if not 2 <= self.dim <= 32:
            raise ValueError("dim must lie in 2..32")

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "seed": self.seed, "params": self.params}


def _ginibre(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


def random_unitary(rng, n) -> np.ndarray:
    """Haar unitary via QR with the phase correction on R's diagonal."""
    q, r = np.linalg.qr(_ginibre(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def _unit_phases(rng, k):
    return np.exp(2j * np.pi * rng.random(k))


def _build(spec: OperatorSpec, rng) -> np.ndarray:
    n = spec.dim
    kind = spec.kind
    if kind == "ginibre":
        return _ginibre(rng, n)
    if kind == "normal":
        q = random_unitary(rng, n)
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return (q * z) @ q.conj().T
    if kind == "quasinormal":
        # U P with U a partial isometry commuting with P: both diagonal in a
        # common unitary basis, U vanishing where P does. Some spectral
        # values of P repeat so U can mix inside the shared eigenspace.
        q = random_unitary(rng, n)
        rank = int(rng.integers(1, n + 1))
        p = np.zeros(n)
        p[:rank] = rng.uniform(0.2, 2.0, rank)
        if rank >= 2:
            p[1] = p[0]
        u = np.zeros((n, n), dtype=complex)
        u[np.arange(rank), np.arange(rank)] = _unit_phases(rng, rank)
        if rank >= 2:
            u[:2, :2] = random_unitary(rng, 2)
        return q @ u @ np.diag(p) @ q.conj().T
    if kind == "partialIsometry":
        rank = int(rng.integers(1, n))
        w = random_unitary(rng, n)
        x = random_unitary(rng, n)
        return w[:, :rank] @ x[:, :rank].conj().T
    if kind == "rankOne":
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return np.outer(x, y.conj()) / n
    if kind == "truncatedShift":
        w = rng.uniform(0.1, 2.0, n - 1)
        style = int(rng.integers(0, 3))
        if style == 1:
            w = np.sort(w)
        elif style == 2:
            w = 0.5 * (w + w[::-1])
        return np.diag(w.astype(complex), -1)
    if kind == "nilpotent":
        q = random_unitary(rng, n)
        core = np.triu(_ginibre(rng, n), 1)
        return q @ core @ q.conj().T
    # positive, sometimes singular
    a = _ginibre(rng, n)
    if rng.random() < 0.3:
        a[:, -1] = 0.0
    return a @ a.conj().T


def _certify(spec: OperatorSpec, t: np.ndarray) -> None:
    kind = spec.kind
    n = spec.dim
    scale = max(float(np.linalg.norm(t, 2)), 1e-300)
    if kind in ("normal", "quasinormal", "partialIsometry"):
        rep = classify(t, CERT_TOL)
        if not rep.flags[kind]:
            raise KindUnsatisfied(f"{kind} residual {rep.residuals[kind]:.2e}")
    elif kind == "rankOne":
        s = np.linalg.svd(t, compute_uv=False)
        if int(np.sum(s > n * EPS * s[0])) != 1:
            raise KindUnsatisfied("rank is not one")
    elif kind == "truncatedShift":
        w = np.diag(t, -1)
        if np.any(w.real <= 0) or np.linalg.norm(t - np.diag(w, -1)) != 0.0:
            raise KindUnsatisfied("not a positive-weight lower shift")
    elif kind == "nilpotent":
        if np.linalg.norm(np.linalg.matrix_power(t / scale, n), 2) > CERT_TOL:
            raise KindUnsatisfied("T^n is not zero")
    elif kind == "positive":
        if np.linalg.norm(t - t.conj().T, 2) > CERT_TOL * scale:
            raise KindUnsatisfied("not Hermitian")
        if np.linalg.eigvalsh(0.5 * (t + t.conj().T))[0] < -CERT_TOL * scale:
            raise KindUnsatisfied("not positive semidefinite")
    if not np.all(np.isfinite(t)):
        raise KindUnsatisfied("non-finite entries")


def generate(spec: OperatorSpec) -> np.ndarray:
    """Matrix for ``spec``; deterministic in ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    t = _build(spec, rng)
    _certify(spec, t)
    return t


def corpus_specs(size: int, seed: int, dims: tuple = (2, 8),
                 kinds: tuple = KINDS) -> list[OperatorSpec]:
    """``size`` specs cycling through ``kinds``, with child seeds spawned from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(size)
    dim_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(size + 1)[-1])
    lo, hi = dims
    out = []
    for i, child in enumerate(children):
        child_seed = int(child.generate_state(2, dtype=np.uint32).view(np.uint64)[0])
        out.append(OperatorSpec(kinds[i % len(kinds)], int(dim_rng.integers(lo, hi + 1)), child_seed))
    return out
