"""Small linear-algebra layer shared by the exact (Fraction) and float backends.

Exact matrices are numpy object arrays holding ``fractions.Fraction``; float
matrices are ordinary ``float64``/``complex128`` arrays.  Only the handful of
operations the package needs are provided.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

FLOAT_RTOL = 1e-10


def is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def frac_array(rows) -> np.ndarray:
    """Object array of Fractions from nested sequences."""
    arr = np.array(rows, dtype=object)
    flat = arr.reshape(-1)
    for k, x in enumerate(flat):
        flat[k] = Fraction(x)
    return arr


def zeros(shape, exact: bool, dtype=float) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=dtype)


def eye(n: int, exact: bool) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def rref(a: np.ndarray):
    """Exact reduced row echelon form; returns (R, pivot_columns)."""
    m = np.array(a, dtype=object, copy=True)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[[r, p]] = m[[p, r]]
        pivot = m[r, c]
        m[r] = m[r] / pivot
        for i in range(rows):
            if i != r and m[i, c] != 0:
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray, rtol: float = FLOAT_RTOL) -> int:
    if a.size == 0:
        return 0
    if is_exact(a):
        return len(rref(a)[1])
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if not is_exact(a):
        return np.linalg.inv(a)
    aug = np.concatenate([np.array(a, dtype=object), eye(n, True)], axis=1)
    r, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return r[:, n:]


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for a consistent (possibly non-square) system.

    Exact: raises ``ValueError`` if inconsistent.  Float: least squares.
    """
    if not is_exact(a):
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        return x
    vec = b.ndim == 1
    bb = b.reshape(len(b), -1)
    aug = np.concatenate([np.array(a, dtype=object), np.array(bb, dtype=object)], axis=1)
    n = a.shape[1]
    r, piv = rref(aug)
    if any(p >= n for p in piv):
        raise ValueError("inconsistent linear system")
    x = zeros((n, bb.shape[1]), True)
    for row, p in enumerate(piv):
        x[p] = r[row, n:]
    return x[:, 0] if vec else x


def nullspace(a: np.ndarray, rtol: float = FLOAT_RTOL) -> np.ndarray:
    """Columns spanning the right null space."""
    n = a.shape[1]
    if a.shape[0] == 0:
        return eye(n, is_exact(a))
    if not is_exact(a):
        u, s, vh = np.linalg.svd(a)
        tol = rtol * (s[0] if s.size and s[0] > 0 else 1.0)
        r = int(np.sum(s > tol))
        return vh[r:].conj().T
    r, piv = rref(a)
    free = [c for c in range(n) if c not in piv]
    out = zeros((n, len(free)), True)
    for k, f in enumerate(free):
        out[f, k] = Fraction(1)
        for row, p in enumerate(piv):
            out[p, k] = -r[row, f]
    return out


def to_float(a: np.ndarray) -> np.ndarray:
    if is_exact(a):
        return np.array(a, dtype=float)
    return a
