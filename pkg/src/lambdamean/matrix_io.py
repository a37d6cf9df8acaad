"""Matrix file format shared by every CLI command.

A matrix is a JSON object ``{"n": int, "entries": [[re, im], ...]}`` with the
``n * n`` entries in row-major order.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .linalg import InvalidMatrix


def matrix_to_json(t) -> dict:
    t = np.asarray(t, dtype=complex)
    n = t.shape[0]
    return {"n": n, "entries": [[float(z.real), float(z.imag)] for z in t.reshape(-1)]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = obj["n"]
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise InvalidMatrix("matrix JSON needs keys 'n' and 'entries'") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidMatrix(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(entries, list) or len(entries) != n * n:
        raise InvalidMatrix(f"expected {n * n} entries for n={n}")
    flat = []
    for pair in entries:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InvalidMatrix(f"entry {pair!r} is not a [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InvalidMatrix("matrix has non-finite entries")
        flat.append(complex(re, im))
    return np.array(flat, dtype=complex).reshape(n, n)


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(json.loads(Path(path).read_text()))


def dump_matrix(t, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(t)) + "\n")
