"""Independent oracles: Freudenthal multiplicities and Brauer-Klimyk decomposition.

Only the Cartan matrix and the symmetrizers are taken from ``rootdata``; no
module construction is shared with ``qflag.uqmod``.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache

import numpy as np

from qflag.rootdata import build_root_system


def _form(rs):
    # (varpi_i, varpi_j) = (A^{-1})_{ij} d_i with (alpha_i, alpha_i) = 2 d_i
    A = [[Fraction(int(x)) for x in row] for row in rs.cartan]
    n = len(A)
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    M = [row[:] for row in A]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        inv[c], inv[p] = inv[p], inv[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        inv[c] = [x / piv for x in inv[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[c])]
    return [[inv[i][j] * rs.d[i] for j in range(n)] for i in range(n)]


def _alpha(rs, i):
    return tuple(int(rs.cartan[j, i]) for j in range(rs.rank))


def _positive_roots(rs):
    """Positive roots in fundamental coordinates, generated by simple reflections."""
    n = rs.rank
    simple = [_alpha(rs, i) for i in range(n)]
    found = {a: 1 for a in simple}
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(n):
                # alpha_i-string through beta: beta + alpha_i is a root iff p > 0 going up
                p = 0
                gamma = tuple(b - a for b, a in zip(beta, simple[i]))
                while gamma in found:
                    p += 1
                    gamma = tuple(b - a for b, a in zip(gamma, simple[i]))
                q_len = p - beta[i]
                if q_len > 0:
                    up = tuple(b + a for b, a in zip(beta, simple[i]))
                    if up not in found:
                        found[up] = found[beta] + 1
                        nxt.append(up)
        frontier = nxt
    return found


class _Data:
    def __init__(self, type_letter, rank):
        rs = build_root_system(type_letter, rank)
        self.rs = rs
        self.n = rank
        self.form = _form(rs)
        self.heights = _positive_roots(rs)
        self.roots = sorted(self.heights)
        self.simple = [_alpha(rs, i) for i in range(rank)]
        self.rho = tuple([1] * rank)

    def ip(self, a, b):
        return sum(a[i] * self.form[i][j] * b[j] for i in range(self.n) for j in range(self.n))


@lru_cache(maxsize=None)
def _data(type_letter, rank):
    return _Data(type_letter, rank)


@lru_cache(maxsize=None)
def freudenthal(type_letter: str, rank: int, lam: tuple) -> dict:
    """Weight multiplicities of V(lam) by Freudenthal's recursion."""
    D = _data(type_letter, rank)
    lam = tuple(lam)
    lr = tuple(a + b for a, b in zip(lam, D.rho))
    top = D.ip(lr, lr)
    mult = {lam: 1}
    level = [lam]
    depth = 0
    while level:
        depth += 1
        cand = set()
        for mu in level:
            for a in D.simple:
                cand.add(tuple(m - x for m, x in zip(mu, a)))
        nxt = []
        for mu in sorted(cand):
            mr = tuple(a + b for a, b in zip(mu, D.rho))
            den = top - D.ip(mr, mr)
            if den == 0:
                continue
            s = Fraction(0)
            for beta in D.roots:
                for k in range(1, depth // D.heights[beta] + 1):
                    nu = tuple(m + k * b for m, b in zip(mu, beta))
                    if nu in mult:
                        s += mult[nu] * D.ip(nu, beta)
            m = 2 * s / den
            if m:
                assert m.denominator == 1 and m > 0
                mult[mu] = int(m)
                nxt.append(mu)
        level = nxt
    return mult


def _to_dominant(D, x):
    """Reflect x into the dominant chamber; return (image, sign) or (None, 0) on a wall."""
    x = list(x)
    sign = 1
    while True:
        i = next((k for k in range(D.n) if x[k] < 0), None)
        if i is None:
            break
        c = x[i]
        x = [a - c * b for a, b in zip(x, D.simple[i])]
        sign = -sign
    if any(a == 0 for a in x):
        return None, 0
    return tuple(x), sign


def brauer_klimyk(type_letter: str, rank: int, lam, mu) -> dict:
    """Multiplicities of V(nu) in V(lam) (x) V(mu)."""
    D = _data(type_letter, rank)
    out = Counter()
    for nu, m in freudenthal(type_letter, rank, tuple(mu)).items():
        x = tuple(a + b + r for a, b, r in zip(lam, nu, D.rho))
        y, s = _to_dominant(D, x)
        if y is not None:
            out[tuple(a - r for a, r in zip(y, D.rho))] += s * m
    return {k: v for k, v in out.items() if v}


def weyl_dimension(type_letter: str, rank: int, lam) -> int:
    D = _data(type_letter, rank)
    lr = tuple(a + b for a, b in zip(lam, D.rho))
    num = Fraction(1)
    for beta in D.roots:
        num *= D.ip(lr, beta) / D.ip(D.rho, beta)
    assert num.denominator == 1
    return int(num)


def dimension(type_letter: str, rank: int, lam) -> int:
    return sum(freudenthal(type_letter, rank, tuple(lam)).values())


def positive_root_count(type_letter: str, rank: int) -> int:
    return len(_data(type_letter, rank).roots)


def tensor_dims_match(type_letter, rank, lam, mu) -> bool:
    dec = brauer_klimyk(type_letter, rank, lam, mu)
    lhs = weyl_dimension(type_letter, rank, lam) * weyl_dimension(type_letter, rank, mu)
    return lhs == sum(m * weyl_dimension(type_letter, rank, nu) for nu, m in dec.items())


def q_number(n: int, q: float) -> float:
    return (q ** n - q ** -n) / (q - 1 / q)


def as_array(d: dict) -> np.ndarray:
    return np.array(sorted(d.items()), dtype=object)
