"""Finite-dimensional U_q(g)-modules: irreducibles, duals, tensor products.

Conventions (type-independent):

* ``K_i v = q_i^{(mu, alpha_i^vee)} v`` on a vector of weight ``mu``, ``q_i = q^{d_i}``;
* ``[E_i, F_j] = delta_ij (K_i - K_i^{-1}) / (q_i - q_i^{-1})``;
* ``Delta(E_i) = E_i (x) 1 + K_i (x) E_i``, ``Delta(F_i) = F_i (x) K_i^{-1} + 1 (x) F_i``;
* ``S(E_i) = -K_i^{-1} E_i``, ``S(F_i) = -F_i K_i``, ``S(K_i) = K_i^{-1}``;
* ``E_i^* = q_i^{-1} F_i K_i`` and ``F_i^* = q_i K_i^{-1} E_i``.

Inner products are linear in the first slot: ``(x, y) = y^H G x``.

``V(lambda)`` is built weight by weight from the highest weight vector.  The
candidates for a weight space ``V_mu`` are the vectors ``F_i b`` with ``b`` a
basis vector of ``V_{mu + alpha_i}``; in the irreducible quotient a vector of
weight ``mu != lambda`` is zero iff every ``E_j`` kills it, so ``V_mu`` is the
image of the stacked map ``x -> (E_j x)_j`` and the contravariant form is
obtained from ``(F_i b, y) = q_i^{1-(mu+alpha_i)(H_i)} (b, E_i y)``.
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import linalg
from .rootdata import RootSystem, Weight, build_root_system

DEFAULT_Q = Fraction(1, 2)
DEFAULT_DIM_CAP = 2000
# dense tensor modules hold 2 * rank + 1 square matrices; cap their total footprint
TENSOR_MEMORY_MB = int(os.environ.get("QFLAG_TENSOR_MB", "512"))
_GS_TOL = 1e-9


class ModuleTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class Backend:
    """Scalar backend: ``exact`` (Fractions, rational q) or ``float``."""

    name: str = "float"
    q: Fraction = DEFAULT_Q

    def __post_init__(self):
        if self.name not in ("exact", "float"):
            raise ValueError(f"unknown backend {self.name!r}")
        q = Fraction(self.q)
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        object.__setattr__(self, "q", q)

    @property
    def exact(self) -> bool:
        return self.name == "exact"

    def scalar(self, x):
        return Fraction(x) if self.exact else float(x)

    def qpow(self, e, base=None):
        """q^e (or base^e) for integer e."""
        b = self.q if base is None else base
        if self.exact:
            return Fraction(b) ** int(e)
        return float(b) ** int(e)

    def qi(self, d: int):
        return self.qpow(d)

    def qint(self, a: int, qi):
        """[a]_{q_i} = (q_i^a - q_i^{-a}) / (q_i - q_i^{-1}); [0] := 0 as an operator value."""
        if a == 0:
            return self.scalar(0)
        if self.exact:
            qi = Fraction(qi)
            return (qi ** a - qi ** (-a)) / (qi - 1 / qi)
        qi = float(qi)
        return (qi ** a - qi ** (-a)) / (qi - 1 / qi)


FLOAT = Backend("float")
EXACT = Backend("exact")

_KEY = itertools.count()


@dataclass(eq=False)
class UqModule:
    rs: RootSystem
    backend: Backend
    weights: list[tuple[int, ...]]
    E: list[np.ndarray]
    F: list[np.ndarray]
    gram: np.ndarray
    highest_weight: tuple[int, ...] | None = None
    label: str = ""
    orthonormal: bool = False
    kind: str = "irreducible"
    factors: tuple = ()
    dual_of: "UqModule | None" = field(default=None, repr=False)
    key: int = field(default_factory=lambda: next(_KEY))

    def __repr__(self):
        return f"UqModule({self.label}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def exact(self) -> bool:
        return self.backend.exact

    def weight(self, idx: int) -> Weight:
        return self.rs.weight(self.weights[idx])

    def indices_of_weight(self, mu) -> list[int]:
        mu = tuple(int(c) for c in (mu.as_ints() if isinstance(mu, Weight) else mu))
        return [k for k, w in enumerate(self.weights) if w == mu]

    def weight_multiplicities(self) -> dict[tuple[int, ...], int]:
        out: dict = {}
        for w in self.weights:
            out[w] = out.get(w, 0) + 1
        return out

    def k_diag(self, i: int, power: int = 1) -> np.ndarray:
        """Eigenvalues of K_i^power on the basis."""
        qi = self.backend.qi(self.rs.d[i])
        vals = [self.backend.qpow(power * w[i], qi) for w in self.weights]
        return np.array(vals, dtype=object if self.exact else float)

    def K(self, i: int, power: int = 1) -> np.ndarray:
        return _diag(self.k_diag(i, power), self.exact)

    def k_alpha_diag(self, exps) -> np.ndarray:
        """Eigenvalues of K^alpha = prod_i K_i^{k_i}."""
        out = np.array([self.backend.scalar(1)] * self.dim, dtype=object if self.exact else float)
        for i, k in enumerate(exps):
            if k:
                out = out * self.k_diag(i, k)
        return out

    def two_rho_diag(self, sign: int = 1) -> np.ndarray:
        """Eigenvalues of K^{sign * 2 rho}, i.e. q^{sign * 2 (mu, rho)}."""
        rs = self.rs
        vals = []
        for w in self.weights:
            e = 2 * rs.inner(rs.weight(w), rs.rho)
            vals.append(self.backend.qpow(sign * int(e)))
        return np.array(vals, dtype=object if self.exact else float)

    def adjoint(self, mat: np.ndarray) -> np.ndarray:
        """Adjoint with respect to the module's inner product."""
        if self.orthonormal:
            return mat.conj().T
        g = self.gram
        return linalg.inverse(g).dot(_herm(mat)).dot(g)

    def inner(self, x, y):
        return np.conj(y).dot(self.gram.dot(x))

    def pbw_matrix(self, f_word=(), k_exps=None, e_word=()) -> np.ndarray:
        """Matrix of F_{f_1} ... F_{f_a} K^alpha E_{e_1} ... E_{e_b} (indices 1-based)."""
        m = linalg.eye(self.dim, self.exact)
        for i in f_word:
            m = m.dot(self.F[i - 1])
        if k_exps is not None and any(k_exps):
            m = m * self.k_alpha_diag(k_exps)[None, :]
        for i in e_word:
            m = m.dot(self.E[i - 1])
        return m

    def highest_weight_vectors(self, mu, S=None) -> np.ndarray:
        """Basis (columns, global coords) of {v in M_mu : E_i v = 0 for i in S}."""
        idx = self.indices_of_weight(mu)
        S = range(self.rs.rank) if S is None else [i - 1 for i in S]
        if not idx:
            return linalg.zeros((self.dim, 0), self.exact)
        rows = [self.E[i][:, idx] for i in S]
        stack = np.concatenate(rows, axis=0) if rows else linalg.zeros((0, len(idx)), self.exact)
        ns = linalg.nullspace(stack)
        out = linalg.zeros((self.dim, ns.shape[1]), self.exact, dtype=ns.dtype if not self.exact else float)
        out[idx, :] = ns
        return out


def _diag(vals, exact: bool) -> np.ndarray:
    n = len(vals)
    m = linalg.zeros((n, n), exact)
    for k, v in enumerate(vals):
        m[k, k] = v
    return m


def _herm(m: np.ndarray) -> np.ndarray:
    return m.conj().T if m.dtype != object else m.T


def _weight_key(w):
    return tuple(-c for c in w)


def _alpha(rs: RootSystem, i: int) -> tuple[int, ...]:
    return tuple(rs.cartan_matrix[k][i] for k in range(rs.rank))


def _add(a, b, s=1):
    return tuple(x + s * y for x, y in zip(a, b))


def _select_columns(mat: np.ndarray, exact: bool):
    """Indices of a greedy maximal independent set of columns (leftmost first)."""
    if exact:
        return linalg.rref(mat)[1]
    basis = []
    keep = []
    for c in range(mat.shape[1]):
        v = np.array(mat[:, c], dtype=float)
        nrm = np.linalg.norm(v)
        if nrm < _GS_TOL:
            continue
        r = v.copy()
        for _ in range(2):
            for b in basis:
                r -= b * (b @ r)
        if np.linalg.norm(r) > _GS_TOL * nrm:
            basis.append(r / np.linalg.norm(r))
            keep.append(c)
    return keep


def _cache_path(rs: RootSystem, lam, backend: Backend) -> Path | None:
    root = os.environ.get("QFLAG_CACHE_DIR")
    if not root:
        return None
    name = f"{rs.name}_{'_'.join(map(str, lam))}_q{backend.q.numerator}-{backend.q.denominator}_{backend.name}.json"
    return Path(root) / name


def build_irreducible(rs: RootSystem, lam, backend: Backend = FLOAT,
                      dim_cap: int = DEFAULT_DIM_CAP) -> UqModule:
    """The irreducible module V(lambda) for dominant integral lambda."""
    if isinstance(lam, Weight):
        rs._check(lam)
        lam_w = lam
    else:
        lam_w = rs.weight(lam)
    if not lam_w.is_dominant:
        raise ValueError(f"{lam_w!r} is not dominant integral")
    lam_t = lam_w.as_ints()
    dim = rs.weyl_dimension(lam_w)
    if dim > dim_cap:
        raise ModuleTooLarge(f"dim V({lam_t}) = {dim} exceeds cap {dim_cap}")
    path = _cache_path(rs, lam_t, backend)
    if path is not None and path.exists():
        return load_module(path)
    mod = _construct(rs, lam_t, backend)
    if mod.dim != dim:
        raise AssertionError(f"constructed dimension {mod.dim} != Weyl dimension {dim}")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_module(mod, path)
    return mod


def _construct(rs: RootSystem, lam: tuple[int, ...], backend: Backend) -> UqModule:
    exact = backend.exact
    r = rs.rank
    one = backend.scalar(1)
    alphas = [_alpha(rs, i) for i in range(r)]
    qis = [backend.qi(rs.d[i]) for i in range(r)]
    dims = {lam: 1}
    gram = {lam: linalg.eye(1, exact)}
    E: dict = {}   # (mu, j) -> block V_mu -> V_{mu+alpha_j}
    F: dict = {}   # (nu, i) -> block V_nu -> V_{nu-alpha_i}
    layers = [[lam]]
    while True:
        targets = set()
        for nu in layers[-1]:
            for i in range(r):
                targets.add(_add(nu, alphas[i], -1))
        new_layer = []
        for mu in sorted(targets, key=_weight_key):
            cands = [(i, b) for i in range(r) if _add(mu, alphas[i]) in dims
                     for b in range(dims[_add(mu, alphas[i])])]
            ups = [j for j in range(r) if _add(mu, alphas[j]) in dims]
            blocks = []
            for j in ups:
                up = _add(mu, alphas[j])
                blk = linalg.zeros((dims[up], len(cands)), exact)
                for c, (i, b) in enumerate(cands):
                    nu = _add(mu, alphas[i])
                    top = _add(nu, alphas[j])
                    if top in dims:
                        col = E[(nu, j)][:, b]
                        blk[:, c] += F[(top, i)].dot(col)
                    if i == j:
                        blk[b, c] += backend.qint(nu[i], qis[i])
                blocks.append(blk)
            stack = np.concatenate(blocks, axis=0)
            piv = _select_columns(stack, exact)
            if not piv:
                continue
            n = len(piv)
            base = stack[:, piv]
            coords = linalg.solve(base, stack)
            if not exact:
                coords = np.where(np.abs(coords) < 1e-14, 0.0, coords)
            # F blocks into mu
            for i in range(r):
                nu = _add(mu, alphas[i])
                if nu not in dims:
                    continue
                cols = [c for c, (ii, _) in enumerate(cands) if ii == i]
                F[(nu, i)] = coords[:, cols]
            # E blocks out of mu
            off = 0
            for j, blk in zip(ups, blocks):
                up = _add(mu, alphas[j])
                E[(mu, j)] = base[off:off + dims[up], :]
                off += dims[up]
            # contravariant form
            g = linalg.zeros((n, n), exact)
            for a, pa in enumerate(piv):
                i, b = cands[pa]
                nu = _add(mu, alphas[i])
                fac = backend.qpow(1 - nu[i], qis[i])
                eimg = E[(mu, i)]
                g[a, :] = fac * gram[nu].dot(eimg)[b, :]
            if not exact:
                g = 0.5 * (g + g.T)
                lo = np.linalg.cholesky(g)
                t_inv = lo.T
                t = np.linalg.inv(t_inv)
                for j in ups:
                    E[(mu, j)] = E[(mu, j)].dot(t)
                for i in range(r):
                    if (_add(mu, alphas[i]), i) in F:
                        F[(_add(mu, alphas[i]), i)] = t_inv.dot(F[(_add(mu, alphas[i]), i)])
                g = np.eye(n)
            dims[mu] = n
            gram[mu] = g
            new_layer.append(mu)
        if not new_layer:
            break
        layers.append(new_layer)

    order = [mu for layer in layers for mu in layer]
    offset = {}
    weights = []
    for mu in order:
        offset[mu] = len(weights)
        weights.extend([mu] * dims[mu])
    dim = len(weights)
    Em = [linalg.zeros((dim, dim), exact) for _ in range(r)]
    Fm = [linalg.zeros((dim, dim), exact) for _ in range(r)]
    for (mu, j), blk in E.items():
        up = _add(mu, alphas[j])
        Em[j][offset[up]:offset[up] + dims[up], offset[mu]:offset[mu] + dims[mu]] = blk
    for (nu, i), blk in F.items():
        lo_ = _add(nu, alphas[i], -1)
        Fm[i][offset[lo_]:offset[lo_] + dims[lo_], offset[nu]:offset[nu] + dims[nu]] = blk
    G = linalg.zeros((dim, dim), exact)
    for mu in order:
        G[offset[mu]:offset[mu] + dims[mu], offset[mu]:offset[mu] + dims[mu]] = gram[mu]
    del one
    return UqModule(rs, backend, weights, Em, Fm, G, highest_weight=lam,
                    label=f"V({','.join(map(str, lam))})", orthonormal=not exact)


def trivial_module(rs: RootSystem, backend: Backend = FLOAT) -> UqModule:
    return build_irreducible(rs, [0] * rs.rank, backend)


def dual_module(M: UqModule) -> UqModule:
    """Contragredient module M^* with the inner product (u^*, v^*) = (K^{-2 rho} v, u).

    Basis: the functionals e_a^* = (., e_a), rescaled by q^{(mu_a, rho)} in the
    float backend (giving the orthonormal phi_{-mu}); listed in reverse order
    so that a highest weight vector comes first.  Cached on ``M``.
    """
    cached = getattr(M, "_dual", None)
    if cached is not None:
        return cached
    exact = M.exact
    n = M.dim
    rev = list(range(n))[::-1]
    # pi^*(X) = conj(G^{-1} S(X)^H G) in the e^* basis
    ginv = linalg.inverse(M.gram) if not M.orthonormal else None

    def contra(sx):
        if M.orthonormal:
            return sx.T
        return ginv.dot(sx.T).dot(M.gram).conj() if not exact else ginv.dot(sx.T).dot(M.gram)

    En, Fn = [], []
    for i in range(M.rs.rank):
        kinv = M.k_diag(i, -1)
        kk = M.k_diag(i, 1)
        s_e = -(kinv[:, None] * M.E[i])          # S(E) = -K^{-1} E
        s_f = -(M.F[i] * kk[None, :])            # S(F) = -F K
        En.append(contra(s_e))
        Fn.append(contra(s_f))
    g_dual = M.gram * M.two_rho_diag(-1)[None, :]
    if not exact:
        scale = np.sqrt(M.two_rho_diag(1))      # q^{(mu, rho)}
        # phi_a = scale_a e_a^*;  X_phi = D^{-1} X D
        En = [(m * scale[None, :]) / scale[:, None] for m in En]
        Fn = [(m * scale[None, :]) / scale[:, None] for m in Fn]
        g_dual = g_dual * scale[None, :] * scale[:, None]
    perm = np.array(rev)
    En = [m[np.ix_(perm, perm)] for m in En]
    Fn = [m[np.ix_(perm, perm)] for m in Fn]
    g_dual = g_dual[np.ix_(perm, perm)]
    weights = [tuple(-c for c in M.weights[k]) for k in rev]
    hw = None
    if M.highest_weight is not None:
        hw = weights[0]
    D = UqModule(M.rs, M.backend, weights, En, Fn, g_dual, highest_weight=hw,
                 label=f"{M.label}*", orthonormal=M.orthonormal, kind="dual", dual_of=M)
    M._dual = D
    return D


def dual_vector(M: UqModule, v: np.ndarray) -> np.ndarray:
    """Coordinates of v^* = (., v) in the basis of ``dual_module(M)``."""
    w = np.conj(v) if v.dtype != object else v.copy()
    if not M.exact:
        w = w / np.sqrt(M.two_rho_diag(1))
    return w[::-1]


_TENSOR_CACHE: dict = {}


def tensor_dim_cap(rs: RootSystem) -> int:
    """Largest tensor dimension whose dense action matrices fit in ``TENSOR_MEMORY_MB``."""
    return int((TENSOR_MEMORY_MB * 2 ** 20 / (8 * (2 * rs.rank + 1))) ** 0.5)


def tensor(*mods: UqModule, dim_cap: int | None = None) -> UqModule:
    """Tensor product via the coproduct; kron ordering of the basis."""
    if len(mods) == 1 and isinstance(mods[0], (list, tuple)):
        mods = tuple(mods[0])
    if not mods:
        raise ValueError("empty tensor product")
    rs, backend = mods[0].rs, mods[0].backend
    for m in mods:
        if m.rs != rs or m.backend != backend:
            raise ValueError("tensor factors must share root system and backend")
    if len(mods) == 1:
        return mods[0]
    key = tuple(m.key for m in mods)
    if key in _TENSOR_CACHE:
        return _TENSOR_CACHE[key]
    dim = int(np.prod([m.dim for m in mods]))
    dim_cap = tensor_dim_cap(rs) if dim_cap is None else dim_cap
    if dim > dim_cap:
        raise ModuleTooLarge(f"tensor dimension {dim} exceeds cap {dim_cap}")
    A = mods[0]
    for B in mods[1:]:
        A = _tensor2(A, B)
    A.kind = "tensor"
    A.factors = tuple(mods)
    A.label = " (x) ".join(m.label for m in mods)
    _TENSOR_CACHE[key] = A
    return A


def _kron(a, b):
    if a.dtype == object or b.dtype == object:
        return np.kron(np.array(a, dtype=object), np.array(b, dtype=object))
    return np.kron(a, b)


def _tensor2(M: UqModule, N: UqModule) -> UqModule:
    exact = M.exact
    En, Fn = [], []
    iM, iN = linalg.eye(M.dim, exact), linalg.eye(N.dim, exact)
    for i in range(M.rs.rank):
        En.append(_kron(M.E[i], iN) + _kron(M.K(i), N.E[i]))
        Fn.append(_kron(M.F[i], N.K(i, -1)) + _kron(iM, N.F[i]))
    weights = [_add(a, b) for a in M.weights for b in N.weights]
    return UqModule(M.rs, M.backend, weights, En, Fn, _kron(M.gram, N.gram),
                    label=f"{M.label} (x) {N.label}", orthonormal=M.orthonormal and N.orthonormal,
                    kind="tensor", factors=(M, N))


def character(M: UqModule) -> dict[tuple[int, ...], int]:
    return M.weight_multiplicities()


def decompose_highest_weights(M: UqModule) -> dict[tuple[int, ...], int]:
    """Multiplicity of each V(lambda) in M: dim of highest weight vectors of weight lambda."""
    out = {}
    for mu in sorted(set(M.weights), key=_weight_key):
        if all(c >= 0 for c in mu):
            k = M.highest_weight_vectors(mu).shape[1]
            if k:
                out[mu] = k
    return out


def levi_dimension(rs: RootSystem, nu, S) -> int:
    """Dimension of the irreducible U_q(l_S)-module with highest weight nu."""
    nu = rs.weight(nu) if not isinstance(nu, Weight) else nu
    S = set(S)
    rho_s = None
    num = Fraction(1)
    levi_roots = [rs.root_from_rc(rc) for rc in rs.positive_roots_rc
                  if all(rc[j] == 0 for j in range(rs.rank) if (j + 1) not in S)]
    rho_s = sum(levi_roots, rs.zero()) * Fraction(1, 2)
    for a in levi_roots:
        num *= rs.inner(nu + rho_s, a) / rs.inner(rho_s, a)
    return int(num)


def branch_to_levi(M: UqModule, S) -> dict[tuple[int, ...], int]:
    """U_q(l_S)-highest weights (full torus labels) with multiplicities."""
    S = sorted(set(int(i) for i in S))
    if len(S) >= M.rs.rank:
        raise ValueError("S must be a proper subset of the simple roots")
    out = {}
    for mu in sorted(set(M.weights), key=_weight_key):
        if all(mu[i - 1] >= 0 for i in S):
            k = M.highest_weight_vectors(mu, S).shape[1]
            if k:
                out[mu] = k
    return out


def trivial_levi_multiplicity(M: UqModule, S) -> int:
    zero = tuple([0] * M.rs.rank)
    if zero not in M.weight_multiplicities():
        return 0
    return M.highest_weight_vectors(zero, sorted(set(S))).shape[1]


# -- disk cache ---------------------------------------------------------------

def _enc(m: np.ndarray):
    if m.dtype == object:
        return [[str(x) for x in row] for row in m]
    return m.tolist()


def _dec(rows, exact: bool):
    if exact:
        return linalg.frac_array(rows) if rows else linalg.zeros((0, 0), True)
    return np.array(rows, dtype=float)


def module_to_dict(M: UqModule) -> dict:
    return {
        "type": M.rs.type_letter, "rank": M.rs.rank,
        "highest_weight": list(M.highest_weight) if M.highest_weight else None,
        "q": str(M.backend.q), "backend": M.backend.name,
        "weights": [list(w) for w in M.weights],
        "E": [_enc(m) for m in M.E], "F": [_enc(m) for m in M.F],
        "gram": _enc(M.gram), "orthonormal": M.orthonormal, "label": M.label,
    }


def save_module(M: UqModule, path) -> None:
    Path(path).write_text(json.dumps(module_to_dict(M)))


def load_module(path) -> UqModule:
    data = json.loads(Path(path).read_text())
    rs = build_root_system(data["type"], data["rank"])
    backend = Backend(data["backend"], Fraction(data["q"]))
    ex = backend.exact
    return UqModule(rs, backend, [tuple(w) for w in data["weights"]],
                    [_dec(m, ex) for m in data["E"]], [_dec(m, ex) for m in data["F"]],
                    _dec(data["gram"], ex),
                    highest_weight=tuple(data["highest_weight"]) if data["highest_weight"] else None,
                    label=data["label"], orthonormal=data["orthonormal"])
