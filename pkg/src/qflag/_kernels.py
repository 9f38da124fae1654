"""Hot loops for shift-diagonal Fock operators, with numba and numpy variants.

An operator on (C^N)^{(x) l} of the form ``e_j -> c[j] e_{j + delta}`` is stored
as the flattened coefficient array ``c`` (row-major over the multi-index j) and
the shift ``delta``.  Two kernels are needed: composing two such operators and
scattering one into a dense matrix.

Set ``QFLAG_DISABLE_NUMBA=1`` to force the numpy implementations.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("QFLAG_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:  # pragma: no cover - exercised only when numba is importable
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# -- numpy -------------------------------------------------------------------

def _slices(n: int, shift):
    """Source/target slices for ``x[j] -> y[j + shift]`` along each axis."""
    src, dst = [], []
    for s in shift:
        s = int(s)
        if s >= 0:
            src.append(slice(0, max(n - s, 0)))
            dst.append(slice(s, n))
        else:
            src.append(slice(-s, n))
            dst.append(slice(0, max(n + s, 0)))
    return tuple(src), tuple(dst)


def compose_numpy(ca: np.ndarray, cb: np.ndarray, n: int, l: int, da, db) -> np.ndarray:
    """Coefficients of A o B where A = (ca, da), B = (cb, db); result shift da + db.

    out[j] = cb[j] * ca[j + db], zero where j + db leaves the box.
    """
    a = ca.reshape((n,) * l)
    b = cb.reshape((n,) * l)
    out = np.zeros_like(b, dtype=np.result_type(a, b))
    src, dst = _slices(n, db)
    out[src] = b[src] * a[dst]
    return out.reshape(-1)


def scatter_numpy(c: np.ndarray, n: int, l: int, d, out: np.ndarray) -> None:
    """out[idx(j + d), idx(j)] += c[j] for j with j + d inside the box."""
    dim = n ** l
    idx = np.arange(dim).reshape((n,) * l)
    src, dst = _slices(n, d)
    cols = idx[src].reshape(-1)
    rows = idx[dst].reshape(-1)
    np.add.at(out, (rows, cols), c.reshape((n,) * l)[src].reshape(-1))


# -- numba -------------------------------------------------------------------

if HAVE_NUMBA:
    @njit(cache=True)
    def _target(j, n, l, d, strides):
        off = 0
        for k in range(l):
            t = j[k] + d[k]
            if t < 0 or t >= n:
                return -1
            off += t * strides[k]
        return off

    @njit(cache=True)
    def _strides(n, l):
        strides = np.empty(l, np.int64)
        s = 1
        for k in range(l - 1, -1, -1):
            strides[k] = s
            s *= n
        return strides

    @njit(cache=True)
    def _advance(j, n, l):
        # odometer increment of the multi-index, last axis fastest
        k = l - 1
        while k >= 0:
            j[k] += 1
            if j[k] < n:
                return
            j[k] = 0
            k -= 1

    @njit(cache=True)
    def _compose_nb(ca, cb, n, l, db, out):
        strides = _strides(n, l)
        j = np.zeros(l, np.int64)
        for flat in range(cb.shape[0]):
            off = _target(j, n, l, db, strides)
            if off >= 0:
                out[flat] = cb[flat] * ca[off]
            _advance(j, n, l)

    @njit(cache=True)
    def _scatter_nb(c, n, l, d, out):
        strides = _strides(n, l)
        j = np.zeros(l, np.int64)
        for flat in range(c.shape[0]):
            off = _target(j, n, l, d, strides)
            if off >= 0:
                out[off, flat] += c[flat]
            _advance(j, n, l)


def compose_numba(ca, cb, n, l, da, db):
    dt = np.result_type(ca, cb)
    out = np.zeros(cb.shape[0], dtype=dt)
    _compose_nb(ca.astype(dt), cb.astype(dt), n, l, np.asarray(db, dtype=np.int64), out)
    return out


def scatter_numba(c, n, l, d, out):
    _scatter_nb(c.astype(out.dtype), n, l, np.asarray(d, dtype=np.int64), out)


if HAVE_NUMBA:
    compose = compose_numba
    scatter = scatter_numba
else:
    compose = compose_numpy
    scatter = scatter_numpy
