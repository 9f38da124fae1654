"""Operator-level verification of the classification statements for pi_sigma on C_q[U/K_S].

Each check returns a :class:`Verdict`.  Tolerances: ``EXACT_TOL`` for claims about
diagonal operators (no orthonormalization error enters), ``ASSEMBLED_TOL`` for
operators assembled from module data.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fockrep as fr
from .coeffalg import _Basis, _DirectSum, coeff, highest_vector_coeff
from .flagalg import FlagContext, a_s_generators
from .rootdata import RootSystem
from .uqmod import build_irreducible
from .weyl import WeylWord, concatenate, is_min_coset_rep, parabolic_decompose

EXACT_TOL = 1e-12
ASSEMBLED_TOL = 1e-9


class PreconditionError(ValueError):
    """Raised when a check is called outside its hypotheses."""


@dataclass
class Verdict:
    claim: str
    anchor: str
    params: dict
    passed: bool
    residuals: dict = field(default_factory=dict)
    window: int | None = None
    tolerance: float | None = None
    detail: str = ""

    def record(self) -> str:
        """One key=value line; deterministic ordering."""
        parts = [f"claim={self.claim}", f"anchor={self.anchor}",
                 f"verdict={'pass' if self.passed else 'fail'}"]
        for k in sorted(self.params):
            parts.append(f"{k}={_fmt(self.params[k])}")
        for k in sorted(self.residuals):
            parts.append(f"res.{k}={_fmt(self.residuals[k])}")
        if self.window is not None:
            parts.append(f"window={self.window}")
        if self.tolerance is not None:
            parts.append(f"tol={self.tolerance:.0e}")
        if self.detail:
            parts.append(f"detail={self.detail.replace(' ', '_')}")
        return " ".join(parts)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.3e}"
    if isinstance(x, (list, tuple)):
        return "(" + ",".join(_fmt(y) for y in x) + ")"
    return str(x).replace(" ", "")


def _word(rs: RootSystem, sigma) -> WeylWord:
    return sigma if isinstance(sigma, WeylWord) else WeylWord.of(rs, sigma)


def raising_orbit(V, idx: int) -> np.ndarray:
    """Orthonormal columns spanning U_q(b_+) v for the basis vector ``idx``."""
    ds = _DirectSum(V.rs, V.backend, [(V, np.eye(V.dim)[idx])])
    basis = _Basis(V.dim, False)
    basis.add(np.eye(V.dim)[idx])
    queue = list(basis.vecs)
    while queue:
        v = queue.pop()
        for i in range(V.rs.rank):
            w = ds.apply(("E", i + 1), v)
            if basis.add(w):
                queue.append(basis.vecs[-1])
    return basis.matrix()


def check_vanishing(rs: RootSystem, sigma, lam, N: int = fr.DEFAULT_N,
                    tol: float = 1e-10) -> Verdict:
    """pi_sigma(C_{v; v_lambda}) vanishes exactly for v orthogonal to U_q(b_+) v_{sigma lambda}."""
    w = _word(rs, sigma)
    V = build_irreducible(rs, lam)
    ext = fr.extreme_vector_index(V, w.act(rs.weight(V.highest_weight)).as_ints())
    Z = raising_orbit(V, ext)
    proj = Z @ Z.conj().T
    pattern, max_zero, min_nonzero, mismatches = [], 0.0, np.inf, 0
    for k in range(V.dim):
        expect_zero = np.linalg.norm(proj[:, k]) < 1e-12
        nrm = fr.pi_sigma(w, highest_vector_coeff(V, k), N).window_norm()
        if expect_zero:
            max_zero = max(max_zero, nrm)
            ok = nrm < tol
        else:
            min_nonzero = min(min_nonzero, nrm)
            ok = nrm > tol
        mismatches += not ok
        pattern.append(0 if expect_zero else 1)
    # the complement of the orbit is killed, not only the basis vectors outside it
    perp = np.linalg.svd(np.eye(V.dim) - proj)[0][:, :V.dim - Z.shape[1]]
    for c in range(perp.shape[1]):
        nrm = fr.pi_sigma(w, coeff(V, perp[:, c], 0), N).window_norm()
        max_zero = max(max_zero, nrm)
        mismatches += nrm >= tol
    ext_norm = fr.pi_sigma(w, highest_vector_coeff(V, ext), N).window_norm()
    passed = mismatches == 0 and ext_norm > tol
    return Verdict("vanishing", "part1", {"type": rs.name, "sigma": repr(w), "lambda": tuple(lam),
                                           "pattern": tuple(pattern)},
                   passed, {"max_zero_norm": max_zero,
                            "min_nonzero_norm": float(min_nonzero if np.isfinite(min_nonzero) else 0.0),
                            "extreme_norm": ext_norm},
                   window=N, tolerance=tol)


def check_h1(ctx: FlagContext, sigma, lam, N: int = fr.DEFAULT_N, tol: float = ASSEMBLED_TOL) -> Verdict:
    """Eigenvalue-1 eigenspace of L_{sigma lambda; lambda} is spanned by e_0^{(x) l}.

    The other eigenvalues are at most q^2, so ``tol`` only has to absorb the
    rounding of the module construction.
    """
    w = _word(ctx.rs, sigma)
    if not is_min_coset_rep(w, ctx.S):
        raise PreconditionError(f"{w} is not a minimal coset representative for S = {ctx.S}")
    if not ctx.in_P_plus_plus(lam):
        raise PreconditionError(f"{tuple(lam)} is not in P_++(S^c)")
    dim, basis = fr.h1_eigenspace(w, lam, ctx.rs, N, tol)
    diag = np.sort(fr.L_operator(w, lam, ctx.rs, N).diagonal().real)[::-1]
    gap = float(1.0 - diag[1]) if diag.size > 1 else 1.0
    passed = dim == 1 and basis == [(0,) * w.length]
    return Verdict("h1", "Prop:spanned-by-e0", {"type": ctx.rs.name, "S": ctx.S, "sigma": repr(w),
                                                 "lambda": tuple(lam)},
                   passed, {"dimension": dim, "top_deviation": float(abs(diag[0] - 1.0)), "gap": gap},
                   window=N, tolerance=tol)


def check_inequivalence(ctx: FlagContext, sigma, sigma2, N: int = fr.DEFAULT_N,
                        tol: float = ASSEMBLED_TOL, max_coeff: int = 2) -> Verdict:
    """Distinguish pi_sigma and pi_sigma' on C_q[U/K_S] by an L operator."""
    rs = ctx.rs
    w1, w2 = _word(rs, sigma), _word(rs, sigma2)
    if w1 == w2:
        raise PreconditionError("sigma and sigma' coincide")
    for w in (w1, w2):
        if not is_min_coset_rep(w, ctx.S):
            raise PreconditionError(f"{w} is not in W^S")
    for lam in ctx.regular_weights(max_coeff):
        lw = rs.weight(lam)
        for a, b in ((w1, w2), (w2, w1)):
            # if a.lam is not >= b.lam, v_{a lam} lies outside U(b+) v_{b lam}
            if not rs.dominance_leq(b.act(lw), a.act(lw)):
                V = build_irreducible(rs, lam)
                ext = fr.extreme_vector_index(V, a.act(lw).as_ints())
                c = highest_vector_coeff(V, ext)
                x = c.star() * c
                killed = fr.pi_sigma(b, x, N).window_norm()
                L = fr.pi_sigma(a, x, N)
                top = float(np.max(np.abs(L.diagonal())))
                passed = killed < tol and abs(top - 1.0) < tol
                return Verdict("inequivalence", "Lemma:inequivalent",
                               {"type": rs.name, "S": ctx.S, "sigma": repr(w1), "sigma2": repr(w2),
                                "lambda": lam, "kept": repr(a), "killed_by": repr(b)},
                               passed, {"killed_norm": killed, "L_max": top}, window=N, tolerance=tol)
    return Verdict("inequivalence", "Lemma:inequivalent",
                   {"type": rs.name, "S": ctx.S, "sigma": repr(w1), "sigma2": repr(w2)},
                   False, detail="no discriminating weight in window")


def check_restriction_factorization(ctx: FlagContext, sigma, t, N: int = fr.DEFAULT_N,
                                    tol: float = ASSEMBLED_TOL, generators=None) -> Verdict:
    """(pi_sigma (x) tau_t)(a) = pi_u(a) (x) id on A_S, where sigma = u v with u in W^S, v in W_S."""
    rs = ctx.rs
    w = _word(rs, sigma)
    u, v = parabolic_decompose(w, ctx.S)
    word = concatenate(u, v)
    gens = a_s_generators(ctx) if generators is None else generators
    worst = 0.0
    for a in gens:
        lhs = fr.pi_sigma_tau(word, a, t, N)
        if u.length:
            rhs = fr.pi_sigma(u, a, N)
        else:
            rhs = fr.TruncatedOperator.scalar(a.counit(), N)
        if v.length:
            rhs = rhs.kron(fr.TruncatedOperator.identity(N, v.length))
        if u.length == 0 and v.length == 0:
            worst = max(worst, abs(lhs.dense()[0, 0] - rhs.dense()[0, 0]))
        else:
            worst = max(worst, fr.window_distance(lhs, rhs))
    return Verdict("restriction", "Prop:pi_u-tensor-id",
                   {"type": rs.name, "S": ctx.S, "sigma": repr(w), "u": repr(u), "v": repr(v),
                    "t": tuple(round(float(np.angle(x)), 6) for x in np.atleast_1d(t)),
                    "generators": len(gens)},
                   worst < tol, {"max_window_residual": worst}, window=N, tolerance=tol)


def check_gns_pattern(ctx: FlagContext, sigma, lam, N: int = fr.DEFAULT_N,
                      tol: float = ASSEMBLED_TOL) -> Verdict:
    """<pi_sigma((C_{mu;lambda})^* C_{nu;lambda}) e_0, e_0> = delta_{mu, sigma lambda} delta_{nu, sigma lambda}."""
    rs = ctx.rs
    w = _word(rs, sigma)
    if not is_min_coset_rep(w, ctx.S):
        raise PreconditionError(f"{w} is not in W^S")
    if not ctx.in_P_plus(lam):
        raise PreconditionError(f"{tuple(lam)} is not in P_+(S^c)")
    V = build_irreducible(rs, lam)
    target = w.act(rs.weight(V.highest_weight)).as_ints()
    worst = 0.0
    stars = [highest_vector_coeff(V, k).star() for k in range(V.dim)]
    for m in range(V.dim):
        for n in range(V.dim):
            op = fr.pi_sigma(w, stars[m] * highest_vector_coeff(V, n), N)
            val = op.dense()[0, 0]
            expect = 1.0 if (V.weights[m] == target and V.weights[n] == target) else 0.0
            worst = max(worst, abs(abs(val) - expect) if expect else abs(val))
    return Verdict("gns", "GNS", {"type": rs.name, "S": ctx.S, "sigma": repr(w), "lambda": tuple(lam)},
                   worst < tol, {"max_deviation": worst}, window=N, tolerance=tol)


def check_ladder(rs: RootSystem, sigma, lam, gen_lam, gen_idx: int, N: int = fr.DEFAULT_N,
                 tol: float = ASSEMBLED_TOL) -> Verdict:
    """L pi(C_{v; v_Lambda}) = q^{2((sigma lambda, mu) - (lambda, Lambda))} pi(C_{v; v_Lambda}) L."""
    w = _word(rs, sigma)
    V = build_irreducible(rs, lam)
    W = build_irreducible(rs, gen_lam)
    L = fr.L_operator(w, lam, N=N)
    A = fr.pi_sigma(w, highest_vector_coeff(W, gen_idx), N)
    sl = w.act(rs.weight(V.highest_weight))
    mu = rs.weight(W.weights[gen_idx])
    e = 2 * (rs.inner(sl, mu) - rs.inner(rs.weight(V.highest_weight), rs.weight(W.highest_weight)))
    factor = float(V.backend.q) ** float(e)
    res = fr.window_distance(L @ A, (A @ L) * factor)
    return Verdict("ladder", "q-exponent-ladder", {"type": rs.name, "sigma": repr(w), "lambda": tuple(lam),
                                                   "gen": (tuple(gen_lam), gen_idx)},
                   res < tol, {"residual": res}, window=N, tolerance=tol)


def check_facto(rs: RootSystem, sigma, lam, N: int = fr.DEFAULT_N, tol: float = EXACT_TOL) -> Verdict:
    """Diagonal of L_{sigma lambda; lambda} against prod_k q_{i_k}^{2 (lambda, gamma_k^vee) j_k}."""
    w = _word(rs, sigma)
    L = fr.L_operator(w, lam, N=N)
    off = max([float(np.max(np.abs(c))) for d, c in L.terms.items() if any(d)] + [0.0])
    res = float(np.max(np.abs(L.diagonal() - fr.facto_diagonal(w, lam, N))))
    return Verdict("facto", "facto", {"type": rs.name, "sigma": repr(w), "lambda": tuple(lam),
                                      "exponents": tuple(fr.gamma_exponents(w, lam))},
                   res < tol and off < tol, {"diagonal": res, "offdiagonal": off}, window=N, tolerance=tol)


# -- reduced-word independence ----------------------------------------------------

def _sector_labels(w: WeylWord, N: int, weights) -> tuple[np.ndarray, np.ndarray]:
    """Joint L-operator exponents of each box index and whether its sector is complete."""
    rs = w.root_system
    l = w.length
    exps = np.array([[e * rs.d[i - 1] for e, i in zip(fr.gamma_exponents(w, lam), w.letters)]
                     for lam in weights], dtype=np.int64)
    grid = np.indices((N,) * l).reshape(l, -1)
    labels = exps @ grid
    complete = np.ones(grid.shape[1], dtype=bool)
    for k in range(l):
        pos = exps[:, k] > 0
        if not pos.any():
            complete[:] = False
            break
        bound = np.min(labels[pos] // exps[pos, k][:, None], axis=0)
        complete &= bound < N
    return labels.T, complete


def sector_spectra(w: WeylWord, op: fr.TruncatedOperator, weights=None) -> dict:
    """Spectra of ``op`` on the complete joint eigenspaces of the L operators."""
    rs = w.root_system
    weights = weights or [tuple(int(j == i) for j in range(rs.rank)) for i in range(rs.rank)]
    labels, complete = _sector_labels(w, op.N, weights)
    dense = op.dense()
    out = {}
    keys = {}
    for idx in np.nonzero(complete)[0]:
        keys.setdefault(tuple(labels[idx]), []).append(idx)
    for key, idx in keys.items():
        block = dense[np.ix_(idx, idx)]
        leak = np.abs(dense[:, idx]).sum() - np.abs(block).sum()
        out[key] = (np.sort(np.linalg.eigvalsh(0.5 * (block + block.conj().T))), float(leak))
    return out


def check_reduced_word_independence(rs: RootSystem, word1, word2, elements_, N: int = fr.DEFAULT_N,
                                    tol: float = 1e-8) -> Verdict:
    """Sorted spectra of pi(a^* a) agree for two reduced words of one Weyl element.

    The L operators of the fundamental weights are diagonal in both realizations
    and commute with the compared operators; any intertwiner preserves their
    joint eigenspaces, which are finite.  Spectra are compared sector by sector
    over the sectors contained in the truncation box.
    """
    w1, w2 = _word(rs, word1), _word(rs, word2)
    if w1 != w2:
        raise PreconditionError("words represent different Weyl group elements")
    worst, leak, compared = 0.0, 0.0, 0
    for a in elements_:
        x = a.star() * a
        s1 = sector_spectra(w1, fr.pi_sigma(w1, x, N))
        s2 = sector_spectra(w2, fr.pi_sigma(w2, x, N))
        common = sorted(set(s1) & set(s2))
        if set(s1) != set(s2):
            worst = np.inf
        ev1 = np.concatenate([s1[k][0] for k in common]) if common else np.zeros(0)
        ev2 = np.concatenate([s2[k][0] for k in common]) if common else np.zeros(0)
        if ev1.shape != ev2.shape:
            worst = np.inf
        else:
            worst = max(worst, float(np.max(np.abs(np.sort(ev1) - np.sort(ev2)), initial=0.0)))
            for k in common:
                worst = max(worst, float(np.max(np.abs(s1[k][0] - s2[k][0]), initial=0.0)))
        leak = max([leak] + [s1[k][1] for k in common] + [s2[k][1] for k in common])
        compared += len(ev1)
    passed = worst < tol and leak < tol
    return Verdict("reduced-word", "Thm:independent-of-reduced-expression",
                   {"type": rs.name, "word1": tuple(w1.letters), "word2": tuple(w2.letters),
                    "elements": len(elements_), "eigenvalues": compared},
                   passed, {"spectral": worst, "sector_leak": leak}, window=N, tolerance=tol)


def unordered_pairs(ctx: FlagContext):
    reps = ctx.parabolic.minimal_reps
    return list(itertools.combinations(reps, 2))


__all__ = [
    "Verdict", "PreconditionError", "check_vanishing", "check_h1", "check_inequivalence",
    "check_restriction_factorization", "check_gns_pattern", "check_ladder", "check_facto",
    "check_reduced_word_independence", "sector_spectra", "raising_orbit", "unordered_pairs",
    "EXACT_TOL", "ASSEMBLED_TOL",
]
