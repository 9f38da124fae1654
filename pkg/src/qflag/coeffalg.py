"""The coefficient algebra C_q[U]: matrix coefficients of finite-dimensional modules.

A matrix coefficient ``C^M_{v;w}`` is the functional ``X -> (X.w, v)`` on
U_q(g).  Here ``M`` may be a tensor product ``M_1 (x) ... (x) M_k`` of
irreducibles, stored as the tuple of factors together with bra/ket vectors in
the Kronecker basis.  Products concatenate factors, the star reverses them
and passes to duals factorwise:

    (C^M_{v;w})^* = C^{M^*}_{(K^{2 rho} v)^*; w^*}.

Elements are never re-expanded into irreducible coefficients.  Equality and
span membership are decided on the cyclic submodule ``U_q(g).w`` of the
direct sum of all tensor modules involved, which is finite-dimensional.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .rootdata import RootSystem, Weight
from .uqmod import (FLOAT, Backend, UqModule, build_irreducible, dual_module,
                    tensor, trivial_module)

EQ_TOL = 1e-9
DEFAULT_KRYLOV_CAP = 20000


class IndeterminateError(RuntimeError):
    """Raised when a decision procedure exceeds its size cap."""


# -- U_q(g) side --------------------------------------------------------------

@dataclass(frozen=True)
class PBWMonomial:
    """F_{f_1}...F_{f_a} K^alpha E_{e_1}...E_{e_b}; node indices are 1-based."""

    f_word: tuple[int, ...] = ()
    k_exponents: tuple[int, ...] | None = None
    e_word: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "f_word", tuple(int(i) for i in self.f_word))
        object.__setattr__(self, "e_word", tuple(int(i) for i in self.e_word))
        if self.k_exponents is not None:
            object.__setattr__(self, "k_exponents", tuple(int(k) for k in self.k_exponents))

    @property
    def counit(self) -> int:
        return int(not self.f_word and not self.e_word)

    def apply(self, M: UqModule, vec: np.ndarray) -> np.ndarray:
        out = vec
        for i in reversed(self.e_word):
            out = M.E[i - 1].dot(out)
        if self.k_exponents is not None and any(self.k_exponents):
            out = M.k_alpha_diag(self.k_exponents) * out
        for i in reversed(self.f_word):
            out = M.F[i - 1].dot(out)
        return out


ONE = PBWMonomial()


def generator(kind: str, i: int, power: int = 1) -> tuple:
    """A generator token: ('E', i), ('F', i) or ('K', i, power)."""
    kind = kind.upper()
    if kind not in ("E", "F", "K"):
        raise ValueError(f"unknown generator {kind!r}")
    return (kind, int(i), int(power)) if kind == "K" else (kind, int(i))


def apply_generator(M: UqModule, gen, vec: np.ndarray) -> np.ndarray:
    kind, i = gen[0], gen[1] - 1
    if kind == "E":
        return M.E[i].dot(vec)
    if kind == "F":
        return M.F[i].dot(vec)
    return M.k_diag(i, gen[2] if len(gen) > 2 else 1) * vec


def apply_star_generator(M: UqModule, gen, vec: np.ndarray) -> np.ndarray:
    """Action of X^* for a generator X."""
    kind, i = gen[0], gen[1] - 1
    qi = M.backend.qi(M.rs.d[i])
    if kind == "E":   # q_i^{-1} F_i K_i
        return M.F[i].dot(M.k_diag(i, 1) * vec) * (1 / qi)
    if kind == "F":   # q_i K_i^{-1} E_i
        return M.k_diag(i, -1) * M.E[i].dot(vec) * qi
    return M.k_diag(i, gen[2] if len(gen) > 2 else 1) * vec


def generator_counit(gen) -> int:
    return 1 if gen[0] == "K" else 0


# -- function-algebra side ----------------------------------------------------

def _tensor_of(rs: RootSystem, backend: Backend, modules: tuple) -> UqModule:
    if not modules:
        return trivial_module(rs, backend)
    return tensor(*modules)


@dataclass(frozen=True, eq=False)
class MatrixCoeff:
    """C^M_{bra; ket} with M = modules[0] (x) ... (x) modules[-1]."""

    modules: tuple
    bra: np.ndarray = field(repr=False)
    ket: np.ndarray = field(repr=False)

    @property
    def key(self):
        return tuple(m.key for m in self.modules)

    def evaluate(self, X: PBWMonomial, rs, backend):
        M = _tensor_of(rs, backend, self.modules)
        return M.inner(X.apply(M, self.ket), self.bra)


def _is_zero(x) -> bool:
    return x == 0 if not isinstance(x, (float, complex)) else abs(x) == 0


class AlgebraElement:
    """Finite linear combination of matrix coefficients.

    Parameters
    ----------
    rs, backend
        Ambient root system and scalar backend.
    terms
        List of ``(scalar, MatrixCoeff)``.
    """

    def __init__(self, rs: RootSystem, backend: Backend, terms=()):
        self.rs = rs
        self.backend = backend
        self.terms: list[tuple[object, MatrixCoeff]] = [(c, t) for c, t in terms if not _is_zero(c)]

    def __repr__(self):
        return f"AlgebraElement({len(self.terms)} terms)"

    # construction
    @classmethod
    def unit(cls, rs: RootSystem, backend: Backend = FLOAT) -> "AlgebraElement":
        one = np.array([backend.scalar(1)], dtype=object if backend.exact else float)
        return cls(rs, backend, [(backend.scalar(1), MatrixCoeff((), one, one.copy()))])

    @classmethod
    def zero(cls, rs: RootSystem, backend: Backend = FLOAT) -> "AlgebraElement":
        return cls(rs, backend, [])

    @property
    def is_exact(self) -> bool:
        return self.backend.exact

    def _same(self, other: "AlgebraElement"):
        if other.rs != self.rs or other.backend != self.backend:
            raise ValueError("elements over different root systems or backends")

    # vector-space structure
    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            if other == 0:
                return self
            other = other * AlgebraElement.unit(self.rs, self.backend)
        self._same(other)
        return AlgebraElement(self.rs, self.backend, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.rs, self.backend, [(-c, t) for c, t in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return AlgebraElement(self.rs, self.backend, [(c * other, t) for c, t in self.terms])

    def __rmul__(self, other):
        return AlgebraElement(self.rs, self.backend, [(other * c, t) for c, t in self.terms])

    # algebra operations
    def star(self) -> "AlgebraElement":
        return star(self)

    def evaluate(self, X: PBWMonomial = ONE):
        return evaluate(self, X)

    def counit(self):
        return evaluate(self, ONE)


def coeff(M: UqModule, bra, ket) -> AlgebraElement:
    """C^M_{bra; ket}; ``bra``/``ket`` are basis indices or coordinate vectors."""
    bra = basis_vector(M, bra) if np.isscalar(bra) else np.asarray(bra)
    ket = basis_vector(M, ket) if np.isscalar(ket) else np.asarray(ket)
    if M.exact:
        bra, ket = np.array(bra, dtype=object), np.array(ket, dtype=object)
    mods = tuple(M.factors) if M.kind == "tensor" else (M,)
    if M.highest_weight is not None and all(c == 0 for c in M.highest_weight) and M.dim == 1:
        scal = np.conj(bra[0]) * M.gram[0, 0] * ket[0] if not M.exact else bra[0] * M.gram[0, 0] * ket[0]
        return scal * AlgebraElement.unit(M.rs, M.backend)
    return AlgebraElement(M.rs, M.backend, [(M.backend.scalar(1), MatrixCoeff(mods, bra, ket))])


def basis_vector(M: UqModule, k: int) -> np.ndarray:
    v = linalg.zeros(M.dim, M.exact)
    v[int(k)] = M.backend.scalar(1)
    return v


def highest_vector_coeff(M: UqModule, bra) -> AlgebraElement:
    """C^lambda_{bra; v_lambda}."""
    return coeff(M, bra, 0)


def _kron(a, b):
    if a.dtype == object or b.dtype == object:
        return np.kron(np.array(a, dtype=object), np.array(b, dtype=object))
    return np.kron(a, b)


def multiply(phi: AlgebraElement, psi: AlgebraElement) -> AlgebraElement:
    """C^M_{v;w} C^N_{v';w'} = C^{M (x) N}_{v (x) v'; w (x) w'}."""
    phi._same(psi)
    terms = []
    for c1, t1 in phi.terms:
        for c2, t2 in psi.terms:
            mods = t1.modules + t2.modules
            if mods:
                _tensor_of(phi.rs, phi.backend, mods)   # enforce the dimension cap early
            terms.append((c1 * c2, MatrixCoeff(mods, _kron(t1.bra, t2.bra), _kron(t1.ket, t2.ket))))
    return AlgebraElement(phi.rs, phi.backend, terms)


def _star_vectors(mods: tuple, bra: np.ndarray, ket: np.ndarray):
    """Bra/ket of the star of C^{mods}_{bra; ket} on the reversed dual factors."""
    if not mods:
        return bra.copy(), ket.copy()
    shape = [m.dim for m in mods]
    exact = mods[0].exact
    # K^{2 rho} on the bra (group-like, so factorwise)
    b = bra.reshape(shape)
    k = ket.reshape(shape)
    for ax, m in enumerate(mods):
        sh = [1] * len(mods)
        sh[ax] = m.dim
        b = b * m.two_rho_diag(1).reshape(sh)
    out = []
    for arr in (b, k):
        arr = arr if exact else np.conj(arr)
        for ax, m in enumerate(mods):
            if not exact:
                sh = [1] * len(mods)
                sh[ax] = m.dim
                arr = arr / np.sqrt(m.two_rho_diag(1)).reshape(sh)
            arr = np.flip(arr, axis=ax)
        arr = np.transpose(arr, axes=tuple(range(len(mods)))[::-1])
        out.append(np.ascontiguousarray(arr).reshape(-1))
    return out[0], out[1]


def star(phi: AlgebraElement) -> AlgebraElement:
    terms = []
    for c, t in phi.terms:
        bra, ket = _star_vectors(t.modules, t.bra, t.ket)
        mods = tuple(dual_module(m) for m in reversed(t.modules))
        cc = c if phi.is_exact else np.conj(c)
        terms.append((cc, MatrixCoeff(mods, bra, ket)))
    return AlgebraElement(phi.rs, phi.backend, terms)


def evaluate(phi: AlgebraElement, X: PBWMonomial = ONE):
    total = phi.backend.scalar(0)
    for c, t in phi.terms:
        total = total + c * t.evaluate(X, phi.rs, phi.backend)
    return total


def evaluate_star_oracle(phi: AlgebraElement, X: PBWMonomial):
    """phi^*(X) computed as conj(phi(S(X)^*)) without forming phi^*.

    X -> S(X)^* is the conjugate-linear algebra map sending E_i to -q_i^{-1} F_i,
    F_i to -q_i E_i and K to K^{-1}; the image of a PBW monomial is expanded as
    an ordered product of generators acting on each ket.
    """
    rs, be = phi.rs, phi.backend
    word = [("F", i) for i in X.f_word]
    if X.k_exponents is not None:
        word += [("K", i + 1, k) for i, k in enumerate(X.k_exponents) if k]
    word += [("E", i) for i in X.e_word]
    total = be.scalar(0)
    for c, t in phi.terms:
        M = _tensor_of(rs, be, t.modules)
        vec = t.ket
        for g in reversed(word):
            qi = be.qi(rs.d[g[1] - 1])
            if g[0] == "E":
                vec = -M.F[g[1] - 1].dot(vec) * (1 / qi)
            elif g[0] == "F":
                vec = -M.E[g[1] - 1].dot(vec) * qi
            else:
                vec = M.k_diag(g[1] - 1, -g[2]) * vec
        val = M.inner(vec, t.bra)
        total = total + (np.conj(c * val) if not be.exact else c * val)
    return total


def left_act(X, phi: AlgebraElement) -> AlgebraElement:
    """(X.phi)(Y) = phi(YX): acts on the ket. ``X`` is a generator token or PBWMonomial."""
    terms = []
    for c, t in phi.terms:
        M = _tensor_of(phi.rs, phi.backend, t.modules)
        if isinstance(X, PBWMonomial):
            ket = X.apply(M, t.ket)
        else:
            ket = apply_generator(M, X, t.ket)
        terms.append((c, MatrixCoeff(t.modules, t.bra, ket)))
    return AlgebraElement(phi.rs, phi.backend, terms)


def right_act(phi: AlgebraElement, X) -> AlgebraElement:
    """(phi.X)(Y) = phi(XY): acts on the bra by X^*."""
    terms = []
    for c, t in phi.terms:
        M = _tensor_of(phi.rs, phi.backend, t.modules)
        if isinstance(X, PBWMonomial):
            word = [("F", i) for i in X.f_word]
            if X.k_exponents is not None:
                word += [("K", i + 1, k) for i, k in enumerate(X.k_exponents) if k]
            word += [("E", i) for i in X.e_word]
        else:
            word = [X]
        bra = t.bra
        # (X_1 ... X_n)^* = X_n^* ... X_1^*, so X_1^* acts first
        for g in word:
            bra = apply_star_generator(M, g, bra)
        terms.append((c, MatrixCoeff(t.modules, bra, t.ket)))
    return AlgebraElement(phi.rs, phi.backend, terms)


# -- deciding linear relations ------------------------------------------------

class _Basis:
    """Incrementally grown basis of a subspace (float: orthonormal, exact: echelon)."""

    def __init__(self, n: int, exact: bool, tol: float = 1e-10):
        self.n, self.exact, self.tol = n, exact, tol
        self.vecs: list[np.ndarray] = []
        self.pivots: list[int] = []

    def add(self, v: np.ndarray) -> bool:
        if self.exact:
            r = v.copy()
            for b, p in zip(self.vecs, self.pivots):
                if r[p] != 0:
                    r = r - r[p] * b
            nz = [k for k in range(self.n) if r[k] != 0]
            if not nz:
                return False
            p = nz[0]
            r = r / r[p]
            for k, b in enumerate(self.vecs):
                if b[p] != 0:
                    self.vecs[k] = b - b[p] * r
            self.vecs.append(r)
            self.pivots.append(p)
            return True
        nrm = np.linalg.norm(v)
        if nrm < self.tol:
            return False
        r = v.astype(complex) if np.iscomplexobj(v) else v.astype(float)
        for _ in range(2):
            for b in self.vecs:
                r = r - b * np.vdot(b, r)
        if np.linalg.norm(r) <= self.tol * max(1.0, nrm):
            return False
        self.vecs.append(r / np.linalg.norm(r))
        return True

    def matrix(self) -> np.ndarray:
        if not self.vecs:
            return linalg.zeros((self.n, 0), self.exact)
        return np.stack(self.vecs, axis=1)


class _DirectSum:
    """Direct sum of tensor modules carrying one ket block each."""

    def __init__(self, rs, backend, blocks):
        self.rs, self.backend = rs, backend
        self.blocks = blocks  # list of (module, ket)
        self.offsets = np.cumsum([0] + [m.dim for m, _ in blocks])
        self.dim = int(self.offsets[-1])
        self.weights = [w for m, _ in blocks for w in m.weights]

    def split(self, vec):
        return [vec[self.offsets[k]:self.offsets[k + 1]] for k in range(len(self.blocks))]

    def apply(self, gen, vec):
        parts = [apply_generator(m, gen, p) for (m, _), p in zip(self.blocks, self.split(vec))]
        return np.concatenate(parts)

    def cyclic_vector(self):
        return np.concatenate([k for _, k in self.blocks])

    def gram_apply(self, vec):
        parts = [m.gram.dot(p) for (m, _), p in zip(self.blocks, self.split(vec))]
        return np.concatenate(parts)


def _krylov(ds: _DirectSum, seeds, gens, exact):
    basis = _Basis(ds.dim, exact)
    queue = [s for s in seeds if basis.add(s)]
    queue = list(basis.vecs)
    while queue:
        v = queue.pop()
        for g in gens:
            w = ds.apply(g, v)
            if basis.add(w):
                queue.append(basis.vecs[-1])
    return basis


def cyclic_submodule(ds: _DirectSum) -> np.ndarray:
    """Columns spanning U_q(g).w = U^- U^0 U^+ w."""
    exact = ds.backend.exact
    r = ds.rs.rank
    a = _krylov(ds, [ds.cyclic_vector()], [("E", i + 1) for i in range(r)], exact)
    weights = sorted(set(ds.weights))
    proj = []
    wt_idx = {mu: np.array([k for k, w in enumerate(ds.weights) if w == mu]) for mu in weights}
    for v in a.vecs:
        for mu in weights:
            p = linalg.zeros(ds.dim, exact, dtype=v.dtype if not exact else float)
            p[wt_idx[mu]] = v[wt_idx[mu]]
            proj.append(p)
    z = _krylov(ds, proj, [("F", i + 1) for i in range(r)], exact)
    return z.matrix()


_KET_MATCH_TOL = 1e-12


def _match_ket(candidates, blocks, ket):
    """Block among ``candidates`` whose ket is parallel to ``ket``, with ket = s * block ket."""
    nk = np.linalg.norm(ket)
    for b in candidates:
        ref = blocks[b][1]
        nr2 = np.vdot(ref, ref).real
        if nr2 == 0:
            continue
        s = np.vdot(ref, ket) / nr2
        if np.linalg.norm(ket - s * ref) <= _KET_MATCH_TOL * max(nk, 1e-300):
            return b, s
    return None, 1.0


def _functional_rows(elements, cap=DEFAULT_KRYLOV_CAP):
    """Coordinates of each element as a functional on a common cyclic module."""
    rs, backend = elements[0].rs, elements[0].backend
    blocks, index = [], {}
    placements = []  # per element: list of (scalar, block, bra)
    by_module: dict = {}
    for el in elements:
        el_place = []
        for c, t in el.terms:
            M = _tensor_of(rs, backend, t.modules)
            if backend.exact:
                key = (M.key, tuple(map(str, t.ket)))
                if key not in index:
                    index[key] = len(blocks)
                    blocks.append((M, t.ket))
                el_place.append((c, index[key], t.bra))
                continue
            # kets equal up to a scalar share one block: C_{b; s k} = C_{conj(s) b; k};
            # separate blocks for roundoff-distinct kets would seed spurious Krylov directions
            b, scale = _match_ket(by_module.setdefault(M.key, []), blocks, t.ket)
            if b is None:
                b, scale = len(blocks), 1.0
                blocks.append((M, t.ket))
                by_module[M.key].append(b)
            el_place.append((c, b, np.conj(scale) * t.bra))
        placements.append(el_place)
    ds = _DirectSum(rs, backend, blocks)
    if ds.dim > cap:
        raise IndeterminateError(f"ambient coefficient space of dimension {ds.dim} exceeds cap {cap}")
    Z = cyclic_submodule(ds) if ds.dim else linalg.zeros((0, 0), backend.exact)
    exact = backend.exact
    rows = []
    for el_place in placements:
        V = linalg.zeros(ds.dim, exact, dtype=complex)
        for c, b, bra in el_place:
            lo = ds.offsets[b]
            # phi(X) = sum c (X w, bra) = (X w, conj(c) bra)
            V[lo:lo + len(bra)] = V[lo:lo + len(bra)] + (c * bra if exact else np.conj(c) * bra)
        gv = ds.gram_apply(V)
        row = (gv if exact else np.conj(gv)).dot(Z) if Z.shape[1] else linalg.zeros(0, exact)
        rows.append(row)
    return rows


def equals(phi: AlgebraElement, psi: AlgebraElement, tol: float = EQ_TOL) -> bool:
    """Equality as functionals on U_q(g); raises IndeterminateError on cap."""
    phi._same(psi)
    diff = phi - psi
    if not diff.terms:
        return True
    (row,) = _functional_rows([diff])
    if phi.is_exact:
        return all(x == 0 for x in row)
    return bool(np.linalg.norm(row) < tol)


def is_zero(phi: AlgebraElement, tol: float = EQ_TOL) -> bool:
    return equals(phi, AlgebraElement.zero(phi.rs, phi.backend), tol)


@dataclass
class SpanResult:
    in_span: bool
    residual: float
    coefficients: np.ndarray


def in_span(phi: AlgebraElement, span, tol: float = EQ_TOL) -> SpanResult:
    """Least-squares membership of ``phi`` in span(``span``)."""
    span = list(span)
    rows = _functional_rows([phi] + span)
    target = rows[0]
    if not span:
        res = float(np.linalg.norm(np.array(target, dtype=complex)))
        return SpanResult(res < tol, res, np.zeros(0))
    A = np.stack(rows[1:], axis=1)
    if phi.is_exact:
        try:
            x = linalg.solve(A, target)
            return SpanResult(True, 0.0, x)
        except ValueError:
            x, *_ = np.linalg.lstsq(np.array(A, dtype=float), np.array(target, dtype=float), rcond=None)
            res = float(np.linalg.norm(np.array(A, dtype=float) @ x - np.array(target, dtype=float)))
            return SpanResult(False, max(res, tol), x)
    if A.shape[0] == 0:
        return SpanResult(True, 0.0, np.zeros(len(span)))
    x, *_ = np.linalg.lstsq(A, target, rcond=None)
    res = float(np.linalg.norm(A @ x - target))
    return SpanResult(res < tol, res, x)


# -- relations ----------------------------------------------------------------

def weight_basis(M: UqModule, mu) -> list[int]:
    return M.indices_of_weight(mu)


def _strictly_above(rs: RootSystem, a, b) -> bool:
    """a > b in the dominance order."""
    return a != b and rs.dominance_leq(rs.weight(b), rs.weight(a))


@dataclass
class DefectResult:
    defect: AlgebraElement
    in_span: bool
    residual: float
    span_size: int
    opp_equal: bool | None = None


def _q_of(rs: RootSystem, backend: Backend, exponent: Fraction):
    """q^exponent for exponent in (1/2)Z... handled as q^(2e/2)."""
    e = Fraction(exponent)
    if e.denominator == 1:
        return backend.qpow(int(e))
    if backend.exact:
        raise ValueError(f"q^{e} is not rational")
    return float(backend.q) ** float(e)


def commutation_defect(V: UqModule, W: UqModule, v, w, variant: str = "N",
                       check_opp: bool = False, tol: float = EQ_TOL) -> DefectResult:
    """Defect of the q-commutation relation between C_{v;v_lambda} and C_{w;v_Lambda}.

    ``v``, ``w`` are basis indices of weight vectors in V = V(lambda), W = V(Lambda).
    Variants: ``"N"``, ``"N_rev"`` (exponent and span with the roles of
    (mu, lambda) and (nu, Lambda) exchanged) and ``"O"``.
    """
    rs, be = V.rs, V.backend
    lam, Lam = rs.weight(V.highest_weight), rs.weight(W.highest_weight)
    mu_t, nu_t = V.weights[v], W.weights[w]
    mu, nu = rs.weight(mu_t), rs.weight(nu_t)
    a = highest_vector_coeff(V, v)
    b = highest_vector_coeff(W, w)
    base = rs.inner(lam, Lam) - rs.inner(mu, nu)
    span, span_opp = [], []
    if variant == "N":
        defect = a * b - _q_of(rs, be, base) * (b * a)
        for k1 in range(V.dim):
            for k2 in range(W.dim):
                m1, n1 = V.weights[k1], W.weights[k2]
                if (_strictly_above(rs, m1, mu_t) and _strictly_above(rs, nu_t, n1)
                        and _add(m1, n1) == _add(mu_t, nu_t)):
                    span.append(highest_vector_coeff(V, k1) * highest_vector_coeff(W, k2))
                    span_opp.append(highest_vector_coeff(W, k2) * highest_vector_coeff(V, k1))
    elif variant == "N_rev":
        defect = a * b - _q_of(rs, be, -base) * (b * a)
        for k1 in range(V.dim):
            for k2 in range(W.dim):
                m1, n1 = V.weights[k1], W.weights[k2]
                if (_strictly_above(rs, n1, nu_t) and _strictly_above(rs, mu_t, m1)
                        and _add(m1, n1) == _add(mu_t, nu_t)):
                    span.append(highest_vector_coeff(W, k2) * highest_vector_coeff(V, k1))
                    span_opp.append(highest_vector_coeff(V, k1) * highest_vector_coeff(W, k2))
    elif variant == "O":
        astar = a.star()
        defect = astar * b - _q_of(rs, be, -base) * (b * astar)
        for k1 in range(V.dim):
            for k2 in range(W.dim):
                m1, n1 = V.weights[k1], W.weights[k2]
                if (_strictly_above(rs, mu_t, m1) and _strictly_above(rs, nu_t, n1)
                        and _add(mu_t, m1, -1) == _add(nu_t, n1, -1)):
                    s = highest_vector_coeff(V, k1).star()
                    span.append(s * highest_vector_coeff(W, k2))
                    span_opp.append(highest_vector_coeff(W, k2) * s)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    res = in_span(defect, span, tol)
    opp = None
    if check_opp:
        opp = all(in_span(x, span_opp, tol).in_span for x in span) and \
            all(in_span(x, span, tol).in_span for x in span_opp)
    return DefectResult(defect, res.in_span, res.residual, len(span), opp)


def _add(a, b, s=1):
    return tuple(x + s * y for x, y in zip(a, b))


def unitarity_sum(V: UqModule, i: int, j: int) -> AlgebraElement:
    """sum_s (C_{e_s; e_i})^* C_{e_s; e_j} over an orthonormal basis."""
    if not V.orthonormal:
        raise ValueError("unitarity sums need an orthonormal basis (float backend)")
    total = AlgebraElement.zero(V.rs, V.backend)
    for s in range(V.dim):
        total = total + coeff(V, s, i).star() * coeff(V, s, j)
    return total


def unitarity_check(V: UqModule, i: int, j: int, tol: float = EQ_TOL) -> bool:
    target = AlgebraElement.unit(V.rs, V.backend) * (1.0 if i == j else 0.0)
    return equals(unitarity_sum(V, i, j), target, tol)


def fundamental_module(rs: RootSystem, k: int, backend: Backend = FLOAT) -> UqModule:
    lam = [0] * rs.rank
    lam[k - 1] = 1
    return build_irreducible(rs, lam, backend)


def weight_of_vector(M: UqModule, vec) -> tuple[int, ...] | None:
    """Weight of a weight vector, or None if ``vec`` is not homogeneous."""
    support = [k for k in range(M.dim) if vec[k] != 0 and (M.exact or abs(vec[k]) > 1e-14)]
    wts = {M.weights[k] for k in support}
    return wts.pop() if len(wts) == 1 else None


__all__ = [
    "AlgebraElement", "MatrixCoeff", "PBWMonomial", "ONE", "IndeterminateError",
    "coeff", "basis_vector", "highest_vector_coeff", "multiply", "star", "evaluate",
    "evaluate_star_oracle", "left_act", "right_act", "equals", "is_zero", "in_span",
    "commutation_defect", "unitarity_sum", "unitarity_check", "generator",
    "fundamental_module", "cyclic_submodule", "weight_of_vector", "Weight",
]
