"""Quantized flag manifolds: B_lambda, A_S, invariance, Gel'fand nodes and PRV witnesses.

Subsets ``S`` of simple roots and node labels are 1-based.  ``S^c`` is the
complement; P_+(S^c) consists of dominant weights with vanishing coefficients
on S, and P_++(S^c) additionally requires positive coefficients on S^c.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .coeffalg import AlgebraElement, equals, generator, highest_vector_coeff, left_act
from .rootdata import RootSystem, Weight, build_root_system
from .uqmod import (FLOAT, Backend, ModuleTooLarge, build_irreducible,
                    decompose_highest_weights, dual_module, tensor,
                    trivial_levi_multiplicity)
from .weyl import (ParabolicData, WeylWord, act, elements, from_epsilon_map,
                   minimal_coset_reps)


@dataclass
class FlagContext:
    rs: RootSystem
    S: tuple[int, ...]
    backend: Backend = FLOAT
    _parabolic: ParabolicData | None = field(default=None, repr=False)

    def __post_init__(self):
        S = tuple(sorted(set(int(i) for i in self.S)))
        if any(not 1 <= i <= self.rs.rank for i in S):
            raise ValueError(f"S = {S} has nodes outside 1..{self.rs.rank}")
        if len(S) == self.rs.rank:
            raise ValueError("S must be a proper subset of the simple roots")
        self.S = S

    @classmethod
    def of(cls, type_letter: str, rank: int, S=(), backend: Backend = FLOAT) -> "FlagContext":
        return cls(build_root_system(type_letter, rank), tuple(S), backend)

    @property
    def Sc(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.rs.rank + 1) if i not in self.S)

    @property
    def parabolic(self) -> ParabolicData:
        if self._parabolic is None:
            self._parabolic = minimal_coset_reps(self.rs, self.S)
        return self._parabolic

    def _coeffs(self, lam) -> tuple[int, ...]:
        if isinstance(lam, Weight):
            return lam.as_ints()
        return tuple(int(c) for c in lam)

    def in_P_plus(self, lam) -> bool:
        c = self._coeffs(lam)
        return all(x >= 0 for x in c) and all(c[i - 1] == 0 for i in self.S)

    def in_P_plus_plus(self, lam) -> bool:
        c = self._coeffs(lam)
        return self.in_P_plus(c) and all(c[i - 1] > 0 for i in self.Sc)

    def fundamental_weights(self) -> list[tuple[int, ...]]:
        return [tuple(int(j == i - 1) for j in range(self.rs.rank)) for i in self.Sc]

    def regular_weights(self, max_coeff: int = 2) -> list[tuple[int, ...]]:
        out = []
        for vals in itertools.product(range(1, max_coeff + 1), repeat=len(self.Sc)):
            lam = [0] * self.rs.rank
            for i, v in zip(self.Sc, vals):
                lam[i - 1] = v
            out.append(tuple(lam))
        return out


def b_lambda_basis(ctx: FlagContext, lam) -> list[AlgebraElement]:
    """{C^lambda_{v; v_lambda}} over the weight basis of V(lambda)."""
    if not ctx.in_P_plus(lam):
        raise ValueError(f"{tuple(lam)} is not in P_+(S^c) for S = {ctx.S}")
    V = build_irreducible(ctx.rs, lam, ctx.backend)
    return [highest_vector_coeff(V, k) for k in range(V.dim)]


def a_s_generators(ctx: FlagContext, lams=None, zero_weight_only: bool = False) -> list[AlgebraElement]:
    """(C^lambda_{v; v_lambda})^* C^lambda_{w; v_lambda} for v, w in the weight basis.

    With ``zero_weight_only`` only pairs with weight(v) = weight(w) are kept.
    """
    lams = ctx.fundamental_weights() if lams is None else [tuple(l) for l in lams]
    out = []
    for lam in lams:
        if not ctx.in_P_plus(lam):
            raise ValueError(f"{lam} is not in P_+(S^c)")
        V = build_irreducible(ctx.rs, lam, ctx.backend)
        stars = [highest_vector_coeff(V, k).star() for k in range(V.dim)]
        for v in range(V.dim):
            for w in range(V.dim):
                if zero_weight_only and V.weights[v] != V.weights[w]:
                    continue
                out.append(stars[v] * highest_vector_coeff(V, w))
    return out


def levi_generators(ctx: FlagContext) -> list[tuple]:
    gens = []
    for i in range(1, ctx.rs.rank + 1):
        gens.append(generator("K", i, 1))
        gens.append(generator("K", i, -1))
    for j in ctx.S:
        gens.append(generator("E", j))
        gens.append(generator("F", j))
    return gens


def is_invariant(phi: AlgebraElement, ctx: FlagContext) -> bool:
    """X.phi = eps(X) phi for the generators of U_q(l_S)."""
    for g in levi_generators(ctx):
        eps = 1 if g[0] == "K" else 0
        if not equals(left_act(g, phi), phi * eps if eps else AlgebraElement.zero(phi.rs, phi.backend)):
            return False
    return True


# -- Gel'fand nodes -------------------------------------------------------------

HERMITIAN = "hermitian-symmetric"
ODD_ORTHOGONAL = "SO(2l+1)/U(l)"
SYMPLECTIC = "Sp(l)/U(1)xSp(l-1)"


@dataclass(frozen=True)
class GelfandCase:
    type_letter: str
    rank: int
    node: int
    family: str


def gelfand_nodes(type_letter: str, rank: int) -> list[GelfandCase]:
    """Maximal parabolics (by deleted node) giving Gel'fand pairs, Bourbaki numbering."""
    build_root_system(type_letter, rank)   # validates
    t, l = type_letter.upper(), rank
    herm: list[int] = []
    extra: list[tuple[int, str]] = []
    if t == "A":
        herm = list(range(1, l + 1))
    elif t == "B":
        herm = [1]
        extra = [(l, ODD_ORTHOGONAL)]
    elif t == "C":
        herm = [l]
        extra = [(1, SYMPLECTIC)]
    elif t == "D":
        herm = [1, l - 1, l]
    elif t == "E" and l == 6:
        herm = [1, 6]
    elif t == "E" and l == 7:
        herm = [7]
    cases = {n: GelfandCase(t, l, n, HERMITIAN) for n in herm}
    for n, fam in extra:
        cases.setdefault(n, GelfandCase(t, l, n, fam))
    return [cases[n] for n in sorted(cases)]


# -- PRV witnesses ------------------------------------------------------------------

def dominant_representative(rs: RootSystem, mu: Weight) -> Weight:
    c = list(mu.coeffs)
    a = rs.cartan_matrix
    while True:
        neg = [i for i, x in enumerate(c) if x < 0]
        if not neg:
            return rs.weight(c)
        i = neg[0]
        ci = c[i]
        c = [c[k] - ci * a[k][i] for k in range(rs.rank)]


def _single_node(ctx: FlagContext) -> int:
    if len(ctx.Sc) != 1:
        raise ValueError("a single deleted node is required (#S^c = 1)")
    return ctx.Sc[0]


def prv_witness(ctx: FlagContext, target) -> WeylWord | None:
    """Shortest w with varpi - w varpi equal to ``target``, else with [varpi - w varpi] = target.

    Breadth-first over W by length; exact matches are preferred over matches
    of the dominant representative.
    """
    rs = ctx.rs
    node = _single_node(ctx)
    varpi = rs.fundamental_weights[node - 1]
    target = target if isinstance(target, Weight) else rs.weight(target)
    fallback = None
    for w in elements(rs):
        diff = varpi - act(w, varpi)
        if diff == target:
            return w
        if fallback is None and dominant_representative(rs, diff) == target:
            fallback = w
    return fallback


def paper_sigma(rs: RootSystem, i: int) -> WeylWord:
    """sigma_i: eps_i, eps_{i+1} -> -eps_i, -eps_{i+1} (type D, 1 <= i < l)."""
    if rs.type_letter != "D":
        raise ValueError("sigma_i is defined for type D")
    n = rs.rank
    m = np.eye(n, dtype=object)
    m[i - 1, i - 1] = -1
    m[i, i] = -1
    return from_epsilon_map(rs, m)


def d_series_witnesses(rank: int) -> list[tuple[WeylWord, Weight, Weight]]:
    """(sigma_1 sigma_3 ... sigma_{2i-1}, varpi - that varpi, expected) for D_l, node l."""
    rs = build_root_system("D", rank)
    l = rank
    lp = l // 2
    varpi = rs.fundamental_weights[l - 1]
    out = []
    w = WeylWord.identity(rs)
    for i in range(1, lp + 1):
        w = w * paper_sigma(rs, 2 * i - 1)
        diff = varpi - act(w, varpi)
        if i < lp:
            expected = rs.fundamental_weights[2 * i - 1]
        elif l % 2:
            expected = rs.fundamental_weights[l - 2] + rs.fundamental_weights[l - 1]
        else:
            expected = rs.fundamental_weights[l - 1] * 2
        out.append((w, diff, expected))
    return out


# -- sphericity ----------------------------------------------------------------------

def _in_root_lattice(rs: RootSystem, lam) -> bool:
    rc = rs.to_root_coords(rs.weight(lam))
    return all(c.denominator == 1 for c in rc)


def spherical_multiplicity(ctx: FlagContext, lam) -> int:
    """Multiplicity of the trivial U_q(l_S)-type in V(lambda)."""
    if not _in_root_lattice(ctx.rs, lam):
        return 0
    V = build_irreducible(ctx.rs, lam, ctx.backend)
    return trivial_levi_multiplicity(V, ctx.S)


def spherical_weights(ctx: FlagContext, max_coeff: int = 2) -> list[tuple[int, ...]]:
    """Minimal additive generators of the spherical dominant weights in the window."""
    _single_node(ctx)
    r = ctx.rs.rank
    found = []
    for lam in itertools.product(range(max_coeff + 1), repeat=r):
        if not any(lam):
            continue
        try:
            if spherical_multiplicity(ctx, lam) >= 1:
                found.append(lam)
        except ModuleTooLarge:
            continue
    found_set = set(found)
    gens = []
    for lam in sorted(found, key=lambda x: (sum(x), x)):
        decomposable = False
        for other in found_set:
            rest = tuple(a - b for a, b in zip(lam, other))
            if other != lam and all(x >= 0 for x in rest) and any(rest) and rest in found_set:
                decomposable = True
                break
        if not decomposable:
            gens.append(lam)
    return gens


@dataclass
class FactorizationReport:
    context: str
    node: int
    spherical: list
    decomposition: dict
    occurs: dict
    witnesses: dict
    degree_checks: list
    multiplicity_free: bool
    exhaustive: bool

    @property
    def passed(self) -> bool:
        return all(self.occurs.values()) and all(ok for *_, ok in self.degree_checks)


def factorization_evidence(ctx: FlagContext, degree_bound: int = 2, max_coeff: int = 2) -> FactorizationReport:
    node = _single_node(ctx)
    rs = ctx.rs
    varpi = tuple(int(j == node - 1) for j in range(rs.rank))
    V = build_irreducible(rs, varpi, ctx.backend)
    dec = decompose_highest_weights(tensor(dual_module(V), V))
    sph = spherical_weights(ctx, max_coeff)
    occurs = {mu: dec.get(mu, 0) >= 1 for mu in sph}
    witnesses = {mu: prv_witness(ctx, mu) for mu in sph}
    checks = []
    for n in itertools.product(range(degree_bound + 1), repeat=len(sph)):
        if sum(n) > degree_bound:
            continue
        lam = tuple(sum(k * mu[j] for k, mu in zip(n, sph)) for j in range(rs.rank))
        try:
            m = spherical_multiplicity(ctx, lam)
        except ModuleTooLarge:
            continue
        checks.append((n, lam, m, m == 1))
    zero = tuple([0] * rs.rank)
    return FactorizationReport(
        context=f"{rs.name} S={ctx.S}", node=node, spherical=sph, decomposition=dec,
        occurs=occurs, witnesses=witnesses, degree_checks=checks,
        multiplicity_free=all(v == 1 for v in dec.values()),
        exhaustive=set(dec) <= set(sph) | {zero},
    )


def prv_multiplicity_check(ctx: FlagContext, target) -> tuple[WeylWord | None, int]:
    """PRV witness for ``target`` and the multiplicity of V(target) in V(varpi)^* (x) V(varpi)."""
    node = _single_node(ctx)
    rs = ctx.rs
    varpi = tuple(int(j == node - 1) for j in range(rs.rank))
    w = prv_witness(ctx, target)
    V = build_irreducible(rs, varpi, ctx.backend)
    dec = decompose_highest_weights(tensor(dual_module(V), V))
    t = tuple(int(c) for c in (target.as_ints() if isinstance(target, Weight) else target))
    return w, dec.get(t, 0)


__all__ = [
    "FlagContext", "b_lambda_basis", "a_s_generators", "is_invariant", "gelfand_nodes",
    "GelfandCase", "prv_witness", "paper_sigma", "d_series_witnesses", "spherical_weights",
    "spherical_multiplicity", "factorization_evidence", "FactorizationReport",
    "dominant_representative", "prv_multiplicity_check", "levi_generators",
]
