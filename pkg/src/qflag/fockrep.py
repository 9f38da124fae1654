"""*-representations of C_q[U] on truncated Fock spaces.

``pi_q`` realizes C_q[SU(2)] on l_2(Z_+) by

    t11 e_j = sqrt(1 - q^{2j}) e_{j-1},    t12 e_j = -q^{j+1} e_j,
    t21 e_j = q^j e_j,                     t22 e_j = sqrt(1 - q^{2(j+1)}) e_{j+1}.

``pi_i = pi_{q_i} o phi_i^*`` restricts a coefficient to the i-th copy of
U_{q_i}(sl2), and ``pi_sigma = pi_{i_1} (x) ... (x) pi_{i_l}`` is assembled from the
iterated coproduct ``Delta C_{v;w} = sum_u C_{v;u} (x) C_{u;w}``.

Operators are kept in shift-diagonal form: a sum of terms ``e_j -> c[j] e_{j+delta}``
over multi-indices ``j`` in the box ``[0, N)^l``.  Every operator carries a
safe window ``s``: entries whose row and column multi-indices are all ``< s``
agree with the untruncated operator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .coeffalg import AlgebraElement, PBWMonomial, _tensor_of
from .rootdata import RootSystem, build_root_system
from .uqmod import Backend, UqModule, build_irreducible, tensor
from .weyl import WeylWord, gamma_sequence

DEFAULT_N = 8
MAX_BOX = 10 ** 6


class TruncationError(ValueError):
    pass


class ExpansionError(RuntimeError):
    """A C_q[SU(2)] expansion could not be determined (rank deficiency)."""


class TruncatedOperator:
    """Shift-diagonal operator on (C^N)^{(x) l} with a safe window.

    Parameters
    ----------
    N : int
        Levels kept per tensor factor.
    l : int
        Number of tensor factors (0 gives scalars).
    terms : dict
        Maps a shift tuple of length ``l`` to a flat coefficient array of size ``N**l``.
    window : int
        Safe window, at most ``N``.
    """

    def __init__(self, N: int, l: int, terms=None, window: int | None = None):
        if N < 1:
            raise TruncationError("empty truncation")
        if N ** l > MAX_BOX:
            raise TruncationError(f"N^l = {N ** l} exceeds {MAX_BOX}")
        self.N, self.l = int(N), int(l)
        self.terms: dict[tuple[int, ...], np.ndarray] = {}
        for d, c in (terms or {}).items():
            self._accumulate(tuple(int(x) for x in d), np.asarray(c))
        self.window = self.N if window is None else int(window)

    # -- basics --------------------------------------------------------------
    @property
    def size(self) -> int:
        return self.N ** self.l

    def _accumulate(self, d, c):
        if len(d) != self.l:
            raise ValueError("shift length does not match factor count")
        if any(abs(x) >= self.N for x in d):
            return
        if d in self.terms:
            self.terms[d] = self.terms[d] + c
        else:
            self.terms[d] = np.array(c, dtype=np.result_type(c, float))

    @classmethod
    def identity(cls, N: int, l: int) -> "TruncatedOperator":
        return cls(N, l, {(0,) * l: np.ones(N ** l)})

    @classmethod
    def scalar(cls, value, N: int = 1) -> "TruncatedOperator":
        return cls(N, 0, {(): np.array([value])})

    @classmethod
    def zero(cls, N: int, l: int) -> "TruncatedOperator":
        return cls(N, l, {})

    def copy(self) -> "TruncatedOperator":
        return TruncatedOperator(self.N, self.l, {d: c.copy() for d, c in self.terms.items()}, self.window)

    def _compatible(self, other):
        if (self.N, self.l) != (other.N, other.l):
            raise ValueError("operators act on different truncated spaces")

    def __add__(self, other):
        if not isinstance(other, TruncatedOperator):
            other = TruncatedOperator.identity(self.N, self.l) * other
        self._compatible(other)
        out = self.copy()
        for d, c in other.terms.items():
            out._accumulate(d, c)
        out.window = min(self.window, other.window)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, TruncatedOperator):
            return self @ k
        return TruncatedOperator(self.N, self.l, {d: c * k for d, c in self.terms.items()}, self.window)

    __rmul__ = __mul__

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        """Composition; the window shrinks by the level range the product can leave."""
        self._compatible(other)
        out = TruncatedOperator(self.N, self.l)
        for db, cb in other.terms.items():
            for da, ca in self.terms.items():
                d = tuple(a + b for a, b in zip(da, db))
                if any(abs(x) >= self.N for x in d):
                    continue
                out._accumulate(d, _kernels.compose(ca, cb, self.N, self.l, da, db))
        up_b = max([max(d) for d in other.terms] + [0]) if self.l else 0
        down_a = max([max(-x for x in d) for d in self.terms] + [0]) if self.l else 0
        out.window = max(0, min(self.window, other.window) - min(up_b, down_a))
        return out

    def adjoint(self) -> "TruncatedOperator":
        out = TruncatedOperator(self.N, self.l, window=self.window)
        for d, c in self.terms.items():
            cube = np.conj(c.reshape((self.N,) * self.l)) if self.l else np.conj(c)
            new = np.zeros_like(cube)
            src, dst = _kernels._slices(self.N, d)
            new[dst] = cube[src]
            out._accumulate(tuple(-x for x in d), new.reshape(-1))
        return out

    def kron(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if self.N != other.N and self.l and other.l:
            raise ValueError("factor truncations differ")
        N = self.N if self.l else other.N
        out = TruncatedOperator(N, self.l + other.l)
        for da, ca in self.terms.items():
            for db, cb in other.terms.items():
                out._accumulate(da + db, np.multiply.outer(ca, cb).reshape(-1))
        out.window = min(self.window if self.l else N, other.window if other.l else N)
        return out

    # -- views ---------------------------------------------------------------
    def dense(self) -> np.ndarray:
        dt = np.result_type(*[c for c in self.terms.values()], float) if self.terms else float
        out = np.zeros((self.size, self.size), dtype=dt)
        for d, c in self.terms.items():
            if self.l == 0:
                out[0, 0] += c[0]
            else:
                _kernels.scatter(c, self.N, self.l, d, out)
        return out

    def window_indices(self, window: int | None = None) -> np.ndarray:
        s = self.window if window is None else window
        if self.l == 0:
            return np.array([0])
        grid = np.indices((self.N,) * self.l).reshape(self.l, -1)
        return np.nonzero(np.all(grid < s, axis=0))[0]

    def windowed(self, window: int | None = None) -> np.ndarray:
        idx = self.window_indices(window)
        return self.dense()[np.ix_(idx, idx)]

    def diagonal(self) -> np.ndarray:
        c = self.terms.get((0,) * self.l)
        return np.zeros(self.size) if c is None else c.copy()

    def is_diagonal(self, tol: float = 0.0) -> bool:
        return all(d == (0,) * self.l or np.max(np.abs(c)) <= tol for d, c in self.terms.items())

    def window_norm(self, window: int | None = None) -> float:
        """Max-abs entry on the safe window."""
        if self.l == 0:
            return float(np.max(np.abs(self.dense()))) if self.terms else 0.0
        s = self.window if window is None else window
        best = 0.0
        for d, c in self.terms.items():
            cube = np.abs(c.reshape((self.N,) * self.l))
            sl = tuple(slice(0, max(0, min(s, s - x))) for x in d)
            if all(t.stop > 0 for t in sl):
                sub = cube[sl]
                if sub.size:
                    best = max(best, float(sub.max()))
        return best

    def __repr__(self):
        return f"TruncatedOperator(N={self.N}, l={self.l}, shifts={len(self.terms)}, window={self.window})"


def window_distance(a: TruncatedOperator, b: TruncatedOperator) -> float:
    diff = a - b
    return diff.window_norm(min(a.window, b.window))


# -- C_q[SU(2)] ---------------------------------------------------------------

_LETTERS = {"t11": (1, 1), "t12": (1, 2), "t21": (2, 1), "t22": (2, 2)}


def _letter(x) -> tuple[int, int]:
    if isinstance(x, str):
        return _LETTERS[x.lower()]
    return (int(x[0]), int(x[1]))


def pi_q_letter(letter, N: int, q: float) -> TruncatedOperator:
    k, m = _letter(letter)
    j = np.arange(N, dtype=float)
    q = float(q)
    if (k, m) == (1, 1):
        return TruncatedOperator(N, 1, {(-1,): np.sqrt(1 - q ** (2 * j))})
    if (k, m) == (2, 2):
        c = np.sqrt(1 - q ** (2 * (j + 1)))
        c[-1] = 0.0
        return TruncatedOperator(N, 1, {(1,): c})
    if (k, m) == (1, 2):
        return TruncatedOperator(N, 1, {(0,): -q ** (j + 1)})
    return TruncatedOperator(N, 1, {(0,): q ** j})


def pi_su2(word, N: int = DEFAULT_N, q=0.5) -> TruncatedOperator:
    """pi_q of a product of t-generators (left to right); window N - #shifting letters."""
    if N < 1:
        raise TruncationError("empty truncation")
    letters = [_letter(x) for x in word]
    op = TruncatedOperator.identity(N, 1)
    for x in letters:
        op = op @ pi_q_letter(x, N, q)
    shifting = sum(1 for x in letters if x in ((1, 1), (2, 2)))
    op.window = max(0, N - shifting)
    return op


SU2_RELATIONS = {
    "t11t12=q.t12t11": ([("t11", "t12")], [(1, ("t12", "t11"))]),
    "t21t22=q.t22t21": ([("t21", "t22")], [(1, ("t22", "t21"))]),
    "t11t21=q.t21t11": ([("t11", "t21")], [(1, ("t21", "t11"))]),
    "t12t22=q.t22t12": ([("t12", "t22")], [(1, ("t22", "t12"))]),
    "t12t21=t21t12": ([("t12", "t21")], [(0, ("t21", "t12"))]),
    "[t11,t22]=(q-1/q)t12t21": ([("t11", "t22"), ("t22", "t11", -1)], [("q-1/q", ("t12", "t21"))]),
    "t11t22-q.t12t21=1": ([("t11", "t22")], [(1, ("t12", "t21")), ("one", ())]),
}


def su2_relation_residuals(N: int = 32, q=0.5) -> dict[str, tuple[float, int]]:
    """Max window residual of each defining relation of C_q[SU(2)] under pi_q, with its window."""
    q = float(q)
    out = {}
    for name, (lhs, rhs) in SU2_RELATIONS.items():
        L = TruncatedOperator.zero(N, 1)
        for word in lhs:
            sign = word[2] if len(word) == 3 else 1
            L = L + pi_su2(word[:2], N, q) * sign
        R = TruncatedOperator.zero(N, 1)
        for coef, word in rhs:
            if coef == "one":
                R = R + TruncatedOperator.identity(N, 1)
                continue
            c = q - 1 / q if coef == "q-1/q" else q ** coef
            R = R + pi_su2(word, N, q) * c
        R.window = min(R.window, N - 1)
        out[name] = (window_distance(L, R), min(L.window, R.window))
    star = pi_su2(("t11",), N, q).adjoint() - pi_su2(("t22",), N, q)
    out["t11*=t22"] = (star.window_norm(N - 1), N - 1)
    star = pi_su2(("t12",), N, q).adjoint() + pi_su2(("t21",), N, q) * q
    out["t12*=-q.t21"] = (star.window_norm(N), N)
    return out


@dataclass(frozen=True)
class TMonomial:
    """t11^a t12^b t21^c (family 1) or t22^a t12^b t21^c (family 2, a >= 1)."""

    family: int
    a: int
    b: int
    c: int

    @property
    def degree(self) -> int:
        return self.a + self.b + self.c

    @property
    def bidegree(self) -> tuple[int, int]:
        s = 1 if self.family == 1 else -1
        return (s * self.a + self.b - self.c, s * self.a - self.b + self.c)

    def letters(self) -> list[tuple[int, int]]:
        lead = (1, 1) if self.family == 1 else (2, 2)
        return [lead] * self.a + [(1, 2)] * self.b + [(2, 1)] * self.c

    def __str__(self):
        parts = []
        for name, e in ((("t11" if self.family == 1 else "t22"), self.a), ("t12", self.b), ("t21", self.c)):
            if e:
                parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts) or "1"


def t_monomials(max_degree: int, bidegree=None) -> list[TMonomial]:
    out = []
    for deg in range(max_degree + 1):
        for a in range(deg + 1):
            for b in range(deg - a + 1):
                c = deg - a - b
                out.append(TMonomial(1, a, b, c))
                if a:
                    out.append(TMonomial(2, a, b, c))
    if bidegree is not None:
        out = [m for m in out if m.bidegree == tuple(bidegree)]
    return out


def pi_q_monomial(m: TMonomial, N: int, q: float) -> TruncatedOperator:
    """Closed form of pi_q on a spanning monomial; exact on the whole truncation."""
    j = np.arange(N, dtype=float)
    q = float(q)
    diag = (-1.0) ** m.b * q ** (m.b * (j + 1) + m.c * j)
    if m.a == 0:
        return TruncatedOperator(N, 1, {(0,): diag})
    coef = np.ones(N)
    if m.family == 1:   # lowering by a, acting after the diagonal part
        for k in range(m.a):
            coef = coef * np.sqrt(np.clip(1 - q ** (2 * (j - k)), 0, None))
        coef[j < m.a] = 0.0
        return TruncatedOperator(N, 1, {(-m.a,): coef * diag})
    for k in range(m.a):
        coef = coef * np.sqrt(1 - q ** (2 * (j + k + 1)))
    coef[j + m.a >= N] = 0.0
    return TruncatedOperator(N, 1, {(m.a,): coef * diag})


@lru_cache(maxsize=None)
def _a1(q: Fraction):
    return build_root_system("A", 1), Backend("float", q)


@lru_cache(maxsize=None)
def _a1_power(q: Fraction, degree: int):
    rs, be = _a1(q)
    V = build_irreducible(rs, (1,), be)
    return V if degree == 1 else tensor(*([V] * degree))


def _sl2_window(D: int) -> list[tuple[int, int, int]]:
    """F^a K^k E^b with a, b <= D and 0 <= k <= 2D."""
    return [(a, k, b) for a in range(D + 1) for k in range(2 * D + 1) for b in range(D + 1)]


def _a1_apply(M: UqModule, a: int, k: int, b: int, vec):
    out = vec
    for _ in range(b):
        out = M.E[0].dot(out)
    if k:
        kd = M.k_diag(0, k)
        out = kd * out if out.ndim == 1 else kd[:, None] * out
    for _ in range(a):
        out = M.F[0].dot(out)
    return out


@lru_cache(maxsize=None)
def _monomial_evaluations(q: Fraction, D: int, mons: tuple) -> np.ndarray:
    """Rows: sl2 window monomials; columns: values of the t-monomials."""
    win = _sl2_window(D)
    out = np.zeros((len(win), len(mons)))
    e = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    for col, m in enumerate(mons):
        if m.degree == 0:
            out[:, col] = [1.0 if (a == 0 and b == 0) else 0.0 for a, _, b in win]
            continue
        M = _a1_power(q, m.degree)
        bra, ket = np.ones(1), np.ones(1)
        for (k, l) in m.letters():
            bra = np.kron(bra, e[k - 1])
            ket = np.kron(ket, e[l - 1])
        for row, (a, k, b) in enumerate(win):
            out[row, col] = bra @ _a1_apply(M, a, k, b, ket)
    return out


def _solve_expansion(values: np.ndarray, q: Fraction, D: int, bidegree=None, tol=1e-9):
    """Expansion coefficients over t-monomials of a functional given on the window.

    ``values`` has one row per window monomial and one column per functional.
    """
    mons = tuple(t_monomials(D, bidegree))
    if not mons:
        if np.max(np.abs(values), initial=0.0) > tol:
            raise ExpansionError("no admissible monomials for nonzero functional")
        return mons, np.zeros((0,) + values.shape[1:])
    A = _monomial_evaluations(q, D, mons)
    if np.linalg.matrix_rank(A, tol=1e-10 * max(1.0, np.abs(A).max())) < len(mons):
        raise ExpansionError(f"evaluation window rank-deficient for degree {D}")
    x, *_ = np.linalg.lstsq(A, values, rcond=None)
    res = np.max(np.abs(A @ x - values), initial=0.0)
    if res > tol * max(1.0, np.abs(values).max(initial=0.0)):
        raise ExpansionError(f"functional not in the span of degree <= {D} monomials (residual {res:.2e})")
    return mons, x


def _node_q(rs: RootSystem, backend: Backend, i: int) -> Fraction:
    return Fraction(backend.q) ** rs.d[i - 1]


def project_su2(phi: AlgebraElement, i: int, tol: float = 1e-9) -> dict[TMonomial, complex]:
    """Expansion of phi o phi_i over t11^a t12^b t21^c and t22^a t12^b t21^c."""
    rs, be = phi.rs, phi.backend
    D = 0
    for _, t in phi.terms:
        M = _tensor_of(rs, be, t.modules)
        D = max(D, max(abs(w[i - 1]) for w in M.weights))
    win = _sl2_window(D)
    vals = np.zeros(len(win), dtype=complex)
    for row, (a, k, b) in enumerate(win):
        kk = tuple(k if n == i - 1 else 0 for n in range(rs.rank))
        vals[row] = phi.evaluate(PBWMonomial((i,) * a, kk, (i,) * b))
    if np.max(np.abs(vals.imag)) == 0:
        vals = vals.real
    mons, x = _solve_expansion(vals[:, None], _node_q(rs, be, i), D, tol=tol)
    return {m: c for m, c in zip(mons, x[:, 0]) if abs(c) > tol}


# -- spin-j building blocks ---------------------------------------------------

@lru_cache(maxsize=None)
def _spin_blocks(q: Fraction, m: int, N: int):
    """pi_q(C^{V(m)}_{f_a; f_b}) for the A1 module V(m) at q, all a, b.

    Returns (norms, ops) with ``F^a f_0 = norms[a] f_a`` and ``ops[a][b]`` the operator.
    """
    rs, be = _a1(q)
    V = build_irreducible(rs, (m,), be)
    norms = []
    vec = np.zeros(V.dim)
    vec[0] = 1.0
    for a in range(V.dim):
        norms.append(vec[a])
        vec = V.F[0].dot(vec)
    win = _sl2_window(m)
    vals = np.zeros((len(win), V.dim * V.dim))
    for row, (a, k, b) in enumerate(win):
        X = np.eye(V.dim)
        X = _a1_apply(V, a, k, b, X)
        vals[row] = X.reshape(-1)   # X[bra, ket] = (X f_ket, f_bra)
    ops = [[None] * V.dim for _ in range(V.dim)]
    for bra in range(V.dim):
        for ket in range(V.dim):
            bideg = (m - 2 * bra, m - 2 * ket)
            mons, x = _solve_expansion(vals[:, [bra * V.dim + ket]], q, m, bidegree=bideg)
            op = TruncatedOperator.zero(N, 1)
            for mon, c in zip(mons, x[:, 0]):
                if abs(c) > 1e-13:
                    op = op + pi_q_monomial(mon, N, float(q)) * float(c)
            op.window = N
            ops[bra][ket] = op
    return np.array(norms), ops


class _NodeDecomposition:
    """Orthonormal sl2-string decomposition of a module at node i."""

    def __init__(self, M: UqModule, i: int, N: int):
        self.M, self.i, self.N = M, i, N
        self.q = _node_q(M.rs, M.backend, i)
        strings = []   # (m, matrix with columns g_0..g_m)
        E = M.E[i - 1]
        for mu in sorted(set(M.weights), reverse=True):
            m = mu[i - 1]
            if m < 0:
                continue
            idx = [k for k, w in enumerate(M.weights) if w == mu]
            sub = E[:, idx]
            if sub.size and np.abs(sub).max() > 0:
                u, s, vh = np.linalg.svd(sub)
                r = int(np.sum(s > 1e-10 * max(1.0, s[0])))
                ker = vh[r:].conj().T
            else:
                ker = np.eye(len(idx))
            if ker.shape[1] == 0:
                continue
            norms, _ = _spin_blocks(self.q, m, N)
            for col in range(ker.shape[1]):
                g = np.zeros(M.dim, dtype=ker.dtype)
                g[idx] = ker[:, col]
                cols = []
                cur = g
                for a in range(m + 1):
                    cols.append(cur / norms[a])
                    cur = M.F[i - 1].dot(cur)
                strings.append((m, np.stack(cols, axis=1)))
        self.strings = strings
        self._pairs: dict = {}
        support = [np.nonzero(np.abs(G) > 1e-14)[0] for _, G in strings]
        self._support = support
        nbrs: dict = {}
        for sup in support:
            for u in sup:
                nbrs.setdefault(int(u), set()).update(int(x) for x in sup)
        self._nbrs = {u: sorted(v) for u, v in nbrs.items()}

    def neighbors(self, u: int) -> list[int]:
        return self._nbrs.get(int(u), [])

    def neighbors_of(self, vec: np.ndarray) -> list[int]:
        out = set()
        for u in np.nonzero(np.abs(vec) > 1e-14)[0]:
            out.update(self.neighbors(u))
        return sorted(out)

    def pair(self, u: int, up: int) -> TruncatedOperator | None:
        """pi_i(C_{e_u; e_up}), or None when it vanishes; memoized."""
        key = (u, up)
        if key not in self._pairs:
            e = np.zeros(self.M.dim)
            e_u, e_up = e.copy(), e.copy()
            e_u[u], e_up[up] = 1.0, 1.0
            op = self.factor(e_u, e_up)
            self._pairs[key] = op if op.terms and any(np.any(np.abs(c) > 1e-15) for c in op.terms.values()) else None
        return self._pairs[key]

    def factor(self, V: np.ndarray, U: np.ndarray) -> TruncatedOperator:
        """pi_i(C^M_{V; U}) for coordinate vectors V (bra) and U (ket)."""
        op = TruncatedOperator.zero(self.N, 1)
        for m, G in self.strings:
            ket_c = G.conj().T @ U            # (U, g_b)
            bra_c = np.conj(V) @ G             # (g_a, V) = V^H g_a
            if not np.any(np.abs(ket_c) > 1e-14) or not np.any(np.abs(bra_c) > 1e-14):
                continue
            _, ops = _spin_blocks(self.q, m, self.N)
            for a in range(m + 1):
                if abs(bra_c[a]) <= 1e-14:
                    continue
                for b in range(m + 1):
                    c = bra_c[a] * ket_c[b]
                    if abs(c) > 1e-14:
                        op = op + ops[a][b] * c
        op.window = self.N
        return op


_DECOMP: dict = {}


def _decomposition(M: UqModule, i: int, N: int) -> _NodeDecomposition:
    key = (M.key, i, N)
    if key not in _DECOMP:
        if not M.orthonormal:
            raise ValueError("Fock representations need an orthonormal (float) module")
        _DECOMP[key] = _NodeDecomposition(M, i, N)
    return _DECOMP[key]


def pi_i(phi: AlgebraElement, i: int, N: int = DEFAULT_N) -> TruncatedOperator:
    total = TruncatedOperator.zero(N, 1)
    for c, t in phi.terms:
        M = _tensor_of(phi.rs, phi.backend, t.modules)
        total = total + _decomposition(M, i, N).factor(t.bra, t.ket) * c
    total.window = N
    return total


def _letters(sigma) -> tuple[int, ...]:
    return tuple(sigma.letters) if isinstance(sigma, WeylWord) else tuple(int(i) for i in sigma)


def _nonzero(op: TruncatedOperator | None) -> bool:
    return op is not None and any(np.any(np.abs(c) > 1e-15) for c in op.terms.values())


def _pi_sigma_term(M: UqModule, letters, bra, ket, N: int) -> TruncatedOperator:
    """Contract the sum over paths of (x)_k pi_{i_k}(C_{u_{k-1}; u_k}), right to left."""
    l = len(letters)
    if l == 0:
        val = np.conj(bra) @ M.gram @ ket
        return TruncatedOperator.scalar(val, N)
    decs = [_decomposition(M, i, N) for i in letters]
    if l == 1:
        out = decs[0].factor(bra, ket)
        out.window = N
        return out
    eye = np.eye(M.dim)
    # R[u] = operator of the tail letters k..l with bra e_u and the given ket
    R = {}
    for u in decs[-1].neighbors_of(ket):
        op = decs[-1].factor(eye[u], ket)
        if _nonzero(op):
            R[u] = op
    for k in range(l - 2, 0, -1):
        dec = decs[k]
        newR = {}
        cand = set()
        for up in R:
            cand.update(dec.neighbors(up))
        for u in sorted(cand):
            acc = None
            for up in dec.neighbors(u):
                if up not in R:
                    continue
                f = dec.pair(u, up)
                if f is None:
                    continue
                piece = f.kron(R[up])
                acc = piece if acc is None else acc + piece
            if acc is not None:
                newR[u] = acc
        R = newR
    out = TruncatedOperator.zero(N, l)
    dec = decs[0]
    for up, tail in R.items():
        f = dec.factor(bra, eye[up])
        if _nonzero(f):
            out = out + f.kron(tail)
    out.window = N
    return out


def pi_sigma(sigma, phi: AlgebraElement, N: int = DEFAULT_N) -> TruncatedOperator:
    """pi_sigma(phi) for a reduced word ``sigma`` (WeylWord or letter sequence)."""
    letters = _letters(sigma)
    if isinstance(sigma, WeylWord) is False and letters:
        WeylWord.of(phi.rs, letters)   # reducedness check
    l = len(letters)
    total = TruncatedOperator.zero(N, l) if l else TruncatedOperator.scalar(0.0, N)
    for c, t in phi.terms:
        M = _tensor_of(phi.rs, phi.backend, t.modules)
        total = total + _pi_sigma_term(M, letters, t.bra, t.ket, N) * c
    total.window = N
    return total


def torus_weight_factor(M: UqModule, t) -> np.ndarray:
    """t^mu for each basis vector, mu = sum m_i varpi_i, t^mu = prod t_i^{m_i}."""
    t = np.asarray(t, dtype=complex)
    return np.array([np.prod(t ** np.array(w)) for w in M.weights])


def tau_t(phi: AlgebraElement, t) -> complex:
    """The one-dimensional representation tau_t."""
    total = 0j
    for c, term in phi.terms:
        M = _tensor_of(phi.rs, phi.backend, term.modules)
        total += c * (np.conj(term.bra) @ M.gram @ (torus_weight_factor(M, t) * term.ket))
    return total


def pi_sigma_tau(sigma, phi: AlgebraElement, t, N: int = DEFAULT_N) -> TruncatedOperator:
    """(pi_sigma (x) tau_t)(phi): the last coproduct leg is evaluated by tau_t."""
    letters = _letters(sigma)
    l = len(letters)
    total = TruncatedOperator.zero(N, l) if l else TruncatedOperator.scalar(0.0, N)
    for c, term in phi.terms:
        M = _tensor_of(phi.rs, phi.backend, term.modules)
        ket = torus_weight_factor(M, t) * term.ket
        total = total + _pi_sigma_term(M, letters, term.bra, ket, N) * c
    total.window = N
    return total


def roots_of_unity_points(r: int, count: int, order: int = 7) -> list[np.ndarray]:
    """Deterministic torus points with entries exp(2 pi i k / order)."""
    pts = []
    for n in range(count):
        ks = [(n + 1) * (j + 2) % order for j in range(r)]
        pts.append(np.exp(2j * np.pi * np.array(ks) / order))
    return pts


# -- L operators ----------------------------------------------------------------

def extreme_vector_index(M: UqModule, mu) -> int:
    idx = M.indices_of_weight(mu)
    if len(idx) != 1:
        raise ValueError(f"weight {mu} has multiplicity {len(idx)}, expected 1")
    return idx[0]


def L_operator(sigma, lam, rs: RootSystem | None = None, N: int = DEFAULT_N,
               backend: Backend | None = None) -> TruncatedOperator:
    """pi_sigma((C_{sigma lambda; lambda})^* C_{sigma lambda; lambda})."""
    from .coeffalg import coeff
    rs = sigma.root_system if isinstance(sigma, WeylWord) else rs
    w = sigma if isinstance(sigma, WeylWord) else WeylWord.of(rs, sigma)
    V = build_irreducible(rs, lam, backend or Backend("float"))
    mu = w.act(rs.weight(V.highest_weight)).as_ints()
    a = coeff(V, extreme_vector_index(V, mu), 0)
    A = pi_sigma(w, a, N)
    if A.is_diagonal(0.0):
        # pi_sigma is a *-homomorphism; a diagonal factor composes without leaving the box
        L = A.adjoint() @ A
        L.window = N
        return L
    return pi_sigma(w, a.star() * a, N)


def facto_diagonal(sigma: WeylWord, lam, N: int = DEFAULT_N, q=None) -> np.ndarray:
    """prod_k q_{i_k}^{2 (lambda, gamma_k^vee) j_k} over the box (row-major multi-index)."""
    rs = sigma.root_system
    lam_w = rs.weight(lam)
    q = 0.5 if q is None else float(q)
    exps = []
    for i, g in zip(sigma.letters, gamma_sequence(sigma)):
        gw = rs.root_from_rc(g)
        exps.append(int(rs.coroot_pairing(lam_w, gw)) * rs.d[i - 1])
    l = len(exps)
    if l == 0:
        return np.ones(1)
    grid = np.indices((N,) * l).reshape(l, -1)
    return np.prod([q ** (2 * e * grid[k]) for k, e in enumerate(exps)], axis=0)


def gamma_exponents(sigma: WeylWord, lam) -> list[int]:
    rs = sigma.root_system
    lam_w = rs.weight(lam)
    return [int(rs.coroot_pairing(lam_w, rs.root_from_rc(g))) for g in gamma_sequence(sigma)]


def h1_eigenspace(sigma, lam, rs: RootSystem | None = None, N: int = DEFAULT_N,
                  tol: float = 1e-12) -> tuple[int, list[tuple[int, ...]]]:
    """Eigenvalue-1 eigenspace of the (diagonal) L operator on the truncation."""
    L = L_operator(sigma, lam, rs, N)
    if not L.is_diagonal(1e-12):
        raise AssertionError("L operator is not diagonal")
    diag = L.diagonal().real
    hits = np.nonzero(np.abs(diag - 1.0) < tol)[0]
    l = L.l
    basis = [tuple(int(x) for x in np.unravel_index(h, (N,) * l)) if l else () for h in hits]
    return len(hits), basis


def spectrum(op: TruncatedOperator, window: int | None = None, hermitian: bool = True) -> np.ndarray:
    mat = op.windowed(window) if window is not None else op.dense()
    if hermitian:
        return np.sort(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)))
    return np.sort_complex(np.linalg.eigvals(mat))


def counit_operator(phi: AlgebraElement) -> complex:
    return phi.counit()


__all__ = [
    "su2_relation_residuals", "SU2_RELATIONS",
    "TruncatedOperator", "TMonomial", "pi_su2", "pi_q_letter", "pi_q_monomial", "t_monomials",
    "project_su2", "pi_i", "pi_sigma", "pi_sigma_tau", "tau_t", "L_operator", "facto_diagonal",
    "gamma_exponents", "h1_eigenspace", "spectrum", "window_distance", "roots_of_unity_points",
    "ExpansionError", "TruncationError", "extreme_vector_index",
]
