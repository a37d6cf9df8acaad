"""Dense complex linear algebra for small operators.

Two interchangeable backends sit behind the public functions:

``"lapack"``
    numpy's LAPACK bindings (default, used by the verification harness).
``"native"``
    cyclic Jacobi for Hermitian eigenproblems, one-sided Jacobi for the SVD and
    Hessenberg reduction followed by Wilkinson-shifted QR for general spectra,
    all written here.

Select one with :func:`use_backend`. Every tolerance is relative to the norm
of the input, with an absolute floor of :data:`ABS_FLOOR` for zero inputs.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps
ABS_FLOOR = 1e-14

_backend: contextvars.ContextVar[str] = contextvars.ContextVar("backend", default="lapack")
BACKENDS = ("lapack", "native")


class LinalgError(Exception):
    """Base class for errors raised by this module."""


class InvalidMatrix(LinalgError, ValueError):
    """Input is not a finite square matrix."""


class NotHermitian(LinalgError):
    pass


class NotPSD(LinalgError):
    pass


class NoConvergence(LinalgError):
    """An iterative solver ran out of iterations.

    ``diagnostics`` holds the iteration count and the last off-diagonal
    measure; ``bracket`` is set by :func:`eigenvalues` to the Gelfand
    enclosure of the spectral radius.
    """

    def __init__(self, msg, diagnostics=None, bracket=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}
        self.bracket = bracket


@contextlib.contextmanager
def use_backend(name: str):
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}, expected one of {BACKENDS}")
    token = _backend.set(name)
    try:
        yield
    finally:
        _backend.reset(token)


def get_backend() -> str:
    return _backend.get()


@dataclass(frozen=True)
class HermitianEig:
    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class PolarParts:
    """Canonical polar factors ``t = u @ p``; ``u`` vanishes exactly on null(t)."""

    u: np.ndarray
    p: np.ndarray
    rank_tol: float
    rank: int


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    residual: float


def as_matrix(a) -> np.ndarray:
    """Validate and copy ``a`` into a complex128 square array."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix has non-finite entries")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def scale_of(a: np.ndarray) -> float:
    """Frobenius norm floored at :data:`ABS_FLOOR`, used to make tolerances relative."""
    return max(float(np.linalg.norm(a)), ABS_FLOOR)


# -- Jacobi machinery ---------------------------------------------------------

def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    """Unitary 2x2 ``w`` with ``w^H [[app, apq], [conj(apq), aqq]] w`` diagonal."""
    r = abs(apq)
    phase = apq / r
    tau = (aqq - app) / (2.0 * r)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # diag(1, conj(phase)) makes the off-diagonal entry real, then a real rotation.
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)


def _jacobi_eigh(a: np.ndarray, max_sweeps: int = 60) -> HermitianEig:
    a = hermitian_part(a)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = scale_of(a)
    off = 0.0
    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= EPS * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 0.1 * EPS * scale:
                    continue
                w = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ w
                a[idx, :] = w.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ w
    else:
        raise NoConvergence("Jacobi eigensolver did not converge",
                            {"sweeps": max_sweeps, "off": float(off)})
    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    return HermitianEig(values[order], v[:, order])


def _complete_basis(cols: np.ndarray, n: int) -> np.ndarray:
    """Extend orthonormal columns to an n x n unitary by Gram-Schmidt on e_k."""
    basis = [cols[:, k] for k in range(cols.shape[1])]
    for k in range(n):
        if len(basis) == n:
            break
        e = np.zeros(n, dtype=complex)
        e[k] = 1.0
        for _ in range(2):
            for b in basis:
                e = e - np.vdot(b, e) * b
        nrm = np.linalg.norm(e)
        if nrm > 1e-8:
            basis.append(e / nrm)
    return np.column_stack(basis) if basis else np.zeros((n, 0), dtype=complex)


def _jacobi_svd(t: np.ndarray, max_sweeps: int = 60):
    """One-sided (Hestenes) Jacobi: rotate columns until mutually orthogonal."""
    a = t.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    worst = 0.0
    for sweep in range(max_sweeps):
        worst = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = np.vdot(a[:, i], a[:, i]).real
                beta = np.vdot(a[:, j], a[:, j]).real
                gamma = np.vdot(a[:, i], a[:, j])
                g = abs(gamma)
                if g == 0.0 or g <= EPS * np.sqrt(alpha * beta):
                    continue
                worst = max(worst, g / np.sqrt(alpha * beta))
                w = _jacobi_rotation(alpha, beta, gamma)
                idx = [i, j]
                a[:, idx] = a[:, idx] @ w
                v[:, idx] = v[:, idx] @ w
        if worst <= EPS:
            break
    else:
        raise NoConvergence("one-sided Jacobi SVD did not converge",
                            {"sweeps": max_sweeps, "off": float(worst)})
    sing = np.linalg.norm(a, axis=0)
    order = np.argsort(-sing, kind="stable")
    sing, a, v = sing[order], a[:, order], v[:, order]
    tiny = n * EPS * max(sing[0], ABS_FLOOR) if n else 0.0
    keep = int(np.sum(sing > tiny))
    left = _complete_basis(a[:, :keep] / sing[:keep], n)
    return left, sing, v


def _hessenberg(a: np.ndarray) -> np.ndarray:
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        x[0] += phase * alpha
        x /= np.linalg.norm(x)
        h[k + 1:, :] -= 2.0 * np.outer(x, x.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ x, x.conj())
        h[k + 2:, k] = 0.0
    return h


def _givens(x: complex, y: complex) -> np.ndarray:
    r = np.hypot(abs(x), abs(y))
    if r == 0.0:
        return np.eye(2, dtype=complex)
    return np.array([[np.conj(x), np.conj(y)], [-y, x]], dtype=complex) / r


def _qr_eigvals(a: np.ndarray, max_iter_per_eig: int = 60) -> np.ndarray:
    """Eigenvalues of a general complex matrix by shifted QR on its Hessenberg form."""
    n = a.shape[0]
    h = _hessenberg(a)
    out = np.empty(n, dtype=complex)
    scale = scale_of(a)
    hi = n - 1
    its = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            out[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = scale
            if abs(h[lo, lo - 1]) <= EPS * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if its > max_iter_per_eig:
            raise NoConvergence("shifted QR did not converge",
                                {"iterations": total, "active": hi + 1,
                                 "subdiag": float(abs(h[hi, hi - 1]))})
        if its % 11 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * np.exp(1j * its)
        else:
            p, q, r, s = h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi]
            mid = 0.5 * (p + s)
            disc = np.sqrt(0.25 * (p - s) ** 2 + q * r)
            mu = mid + disc if abs(mid + disc - s) <= abs(mid - disc - s) else mid - disc
        blk = h[lo:hi + 1, lo:hi + 1] - mu * np.eye(hi - lo + 1)
        rots = []
        for k in range(hi - lo):
            g = _givens(blk[k, k], blk[k + 1, k])
            blk[k:k + 2, k:] = g @ blk[k:k + 2, k:]
            blk[k + 1, k] = 0.0
            rots.append(g)
        for k, g in enumerate(rots):
            top = min(k + 2, hi - lo) + 1
            blk[:top, k:k + 2] = blk[:top, k:k + 2] @ g.conj().T
        h[lo:hi + 1, lo:hi + 1] = blk + mu * np.eye(hi - lo + 1)
    return out


# -- public operations --------------------------------------------------------

def hermitian_eig(a, tol: float = 1e-10) -> HermitianEig:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.

    Raises :class:`NotHermitian` when ``||a - a^*|| > tol * ||a||``. With the
    native backend the reconstruction residual ``||AV - V diag(values)||`` is
    at most ``4 * n * eps * ||A||_F`` in practice.
    """
    a = as_matrix(a)
    scale = scale_of(a)
    if np.linalg.norm(a - a.conj().T) > tol * scale:
        raise NotHermitian(f"||a - a^*|| exceeds {tol:g} * ||a||")
    if get_backend() == "native":
        return _jacobi_eigh(a)
    w, v = np.linalg.eigh(hermitian_part(a))
    return HermitianEig(w, v)


def svd(t):
    """Return ``(left, singulars, right)`` with ``t = left @ diag(singulars) @ right^H``.

    Singular values are sorted in descending order; both factors are unitary.
    """
    t = as_matrix(t)
    if get_backend() == "native":
        return _jacobi_svd(t)
    left, sing, right_h = np.linalg.svd(t)
    return left, sing, right_h.conj().T


def default_rank_tol(sing: np.ndarray) -> float:
    return len(sing) * EPS * float(sing[0]) if len(sing) else 0.0


def polar_decompose(t, rank_tol: float = 0.0) -> PolarParts:
    """Canonical polar decomposition ``t = u |t|`` with null(u) = null(t).

    ``rank_tol == 0`` selects ``n * eps * sigma_max``; singular values at or
    below the threshold are treated as zero, and ``u`` has exactly ``rank``
    unit singular values.
    """
    t = as_matrix(t)
    left, sing, right = svd(t)
    tol = rank_tol if rank_tol > 0 else default_rank_tol(sing)
    r = int(np.sum(sing > tol))
    u = left[:, :r] @ right[:, :r].conj().T
    p = (right * sing) @ right.conj().T
    return PolarParts(u=u, p=hermitian_part(p), rank_tol=float(tol), rank=r)


def fractional_power(p, t: float, tol: float = 1e-10) -> np.ndarray:
    """``p ** t`` for a positive semidefinite ``p`` and ``t`` in [0, 1].

    ``p ** 0`` is the orthogonal projection onto range(p), not the identity.
    Eigenvalues at or below ``n * eps * lambda_max`` count as zero, so
    ``p**s @ p**(1 - s)`` reproduces ``p``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("exponent must lie in [0, 1]")
    p = as_matrix(p)
    eig = hermitian_eig(p, tol=tol)
    top = max(abs(eig.values[-1]), abs(eig.values[0]))
    if eig.values[0] < -tol * max(top, ABS_FLOOR):
        raise NotPSD(f"minimum eigenvalue {eig.values[0]:.3e} is negative")
    cut = p.shape[0] * EPS * max(top, ABS_FLOOR)
    vals = np.where(eig.values > cut, eig.values, 0.0)
    if t == 0.0:
        f = (vals > 0).astype(float)
    else:
        f = vals ** t
    return hermitian_part((eig.vectors * f) @ eig.vectors.conj().T)


def operator_norm(t) -> float:
    t = as_matrix(t)
    if get_backend() == "native":
        return float(_jacobi_svd(t)[1][0])
    return float(np.linalg.norm(t, 2))


def gelfand_bracket(t, kmax: int = 64) -> tuple[float, float]:
    """Enclose r(t) using ``|tr t^k| / n <= r^k <= ||t^k||`` for k up to ``kmax``."""
    t = as_matrix(t)
    n = t.shape[0]
    nrm = float(np.linalg.norm(t, 2))
    if nrm == 0.0:
        return 0.0, 0.0
    unit = t / nrm
    lo, hi = 0.0, 1.0
    power = np.eye(n, dtype=complex)
    for k in range(1, kmax + 1):
        power = power @ unit
        pk = np.linalg.norm(power, 2)
        hi = min(hi, pk ** (1.0 / k))
        lo = max(lo, (abs(np.trace(power)) / n) ** (1.0 / k))
        if pk == 0.0:
            break
    return float(lo * nrm), float(hi * nrm)


def _backward_residual(t: np.ndarray, eigs: np.ndarray) -> float:
    """Largest ``sigma_min(t - mu I) / ||t||`` over the computed eigenvalues."""
    n = t.shape[0]
    scale = max(float(np.linalg.norm(t, 2)), ABS_FLOOR)
    worst = 0.0
    for mu in eigs:
        s = np.linalg.svd(t - mu * np.eye(n), compute_uv=False)
        worst = max(worst, s[-1] / scale)
    return float(worst)


def eigenvalues(t) -> SpectrumResult:
    """Spectrum of a general square matrix.

    The residual is the worst relative backward error, the smallest singular
    value of ``t - mu I`` over computed eigenvalues ``mu``; it stays below
    ``SPECTRUM_RESIDUAL_BOUND``.
    """
    t = as_matrix(t)
    if get_backend() == "native":
        try:
            eigs = _qr_eigvals(t)
        except NoConvergence as exc:
            exc.bracket = gelfand_bracket(t)
            raise
    else:
        eigs = np.linalg.eigvals(t)
    return SpectrumResult(np.asarray(eigs), _backward_residual(t, eigs))


SPECTRUM_RESIDUAL_BOUND = 1e-12


def spectral_radius(t) -> float:
    t = as_matrix(t)
    if get_backend() == "native":
        return float(np.max(np.abs(_qr_eigvals(t))))
    return float(np.max(np.abs(np.linalg.eigvals(t))))
