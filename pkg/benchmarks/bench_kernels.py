"""Compare the numba and numpy kernels for shift-diagonal Fock operators.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the two raw kernels on random data, then an end-to-end pi_sigma call
(A2 longest element) in a subprocess for each backend, since the backend is
fixed at import time by ``QFLAG_DISABLE_NUMBA``.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from qflag import _kernels as K


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_table(repeat: int):
    rng = np.random.default_rng(0)
    rows = []
    for n, l in [(8, 2), (16, 3), (8, 4), (32, 3)]:
        size = n ** l
        ca, cb = rng.normal(size=size), rng.normal(size=size)
        da, db = (1,) + (0,) * (l - 1), (-1,) * l
        rows.append(("compose", n, l,
                     _best(lambda: K.compose_numpy(ca, cb, n, l, da, db), repeat),
                     _best(lambda: K.compose_numba(ca, cb, n, l, da, db), repeat) if K.HAVE_NUMBA else np.nan))
        if size <= 4096:
            out = np.zeros((size, size))
            rows.append(("scatter", n, l,
                         _best(lambda: K.scatter_numpy(ca, n, l, db, out), repeat),
                         _best(lambda: K.scatter_numba(ca, n, l, db, out), repeat) if K.HAVE_NUMBA else np.nan))
    return rows


_END_TO_END = """
import time
from qflag import coeffalg as C, fockrep as fr, uqmod as U, _kernels as K
from qflag.rootdata import build_root_system
rs = build_root_system("A", 2)
V = U.build_irreducible(rs, (1, 1))
x = C.coeff(V, 3, 0).star() * C.coeff(V, 3, 0)
for warm in (4, 5):  # trigger every jit specialization outside the timing
    fr.pi_sigma((1, 2, 1), x, warm).dense()
t0 = time.perf_counter()
op = fr.pi_sigma((1, 2, 1), x, {N})
op.dense()
print(K.backend_name(), time.perf_counter() - t0)
"""


def end_to_end(N: int):
    out = {}
    for flag in ("", "1"):
        env = dict(os.environ, QFLAG_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", _END_TO_END.format(N=N)], env=env,
                             capture_output=True, text=True, check=True)
        name, secs = res.stdout.split()
        out[name] = float(secs)
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--N", type=int, default=16)
    args = p.parse_args(argv)
    if K.HAVE_NUMBA:   # compile outside the timings
        K.compose_numba(np.ones(4), np.ones(4), 2, 2, (0, 0), (1, 0))
        K.scatter_numba(np.ones(4), 2, 2, (0, 1), np.zeros((4, 4)))
    print(f"{'kernel':8s} {'N':>3s} {'l':>2s} {'numpy_s':>10s} {'numba_s':>10s} {'speedup':>8s}")
    for name, n, l, tn, tb in kernel_table(args.repeat):
        print(f"{name:8s} {n:3d} {l:2d} {tn:10.2e} {tb:10.2e} {tn / tb:8.2f}")
    e2e = end_to_end(args.N)
    print(f"pi_sigma A2 s1s2s1 N={args.N}: " + " ".join(f"{k}={v:.3f}s" for k, v in sorted(e2e.items())))


if __name__ == "__main__":
    main()
