from __future__ import annotations

import pytest

import oracles
from qflag import flagalg as F
from qflag import coeffalg as C
from qflag import uqmod as U
from qflag.rootdata import build_root_system


def test_context_validation():
    with pytest.raises(ValueError):
        F.FlagContext.of("A", 2, (1, 2))
    with pytest.raises(ValueError):
        F.FlagContext.of("A", 2, (3,))
    ctx = F.FlagContext.of("A", 3, (2,))
    assert ctx.Sc == (1, 3)
    assert ctx.in_P_plus((1, 0, 2)) and not ctx.in_P_plus((1, 1, 0))
    assert ctx.in_P_plus_plus((1, 0, 2)) and not ctx.in_P_plus_plus((1, 0, 0))


def test_a_s_generators_counts():
    ctx = F.FlagContext.of("A", 2, (2,))
    gens = F.a_s_generators(ctx, [(1, 0)])
    assert len(gens) == 9
    assert len(F.a_s_generators(ctx, [(1, 0)], zero_weight_only=True)) == 3
    assert all(F.is_invariant(g, ctx) for g in gens)


def test_invariance_detects_noninvariant():
    ctx = F.FlagContext.of("A", 1, ())
    V = U.build_irreducible(ctx.rs, (1,))
    assert not F.is_invariant(C.coeff(V, 0, 0), ctx)
    assert F.is_invariant(C.AlgebraElement.unit(ctx.rs), ctx)


GELFAND = {
    # Hermitian symmetric nodes plus the odd orthogonal and symplectic spheres
    ("A", 1): [1], ("A", 2): [1, 2], ("A", 3): [1, 2, 3], ("A", 4): [1, 2, 3, 4],
    ("B", 2): [1, 2], ("B", 3): [1, 3], ("B", 4): [1, 4],
    ("C", 2): [1, 2], ("C", 3): [1, 3], ("C", 4): [1, 4],
    ("D", 4): [1, 3, 4], ("G", 2): [],
}


@pytest.mark.parametrize("key", sorted(GELFAND))
def test_gelfand_nodes(key):
    assert [c.node for c in F.gelfand_nodes(*key)] == GELFAND[key]


def test_gelfand_families():
    fam = {c.node: c.family for c in F.gelfand_nodes("B", 3)}
    assert fam == {1: F.HERMITIAN, 3: F.ODD_ORTHOGONAL}
    fam = {c.node: c.family for c in F.gelfand_nodes("C", 3)}
    assert fam == {1: F.SYMPLECTIC, 3: F.HERMITIAN}


@pytest.mark.parametrize("rank", [4, 5])
def test_d_series_witnesses(rank):
    rows = F.d_series_witnesses(rank)
    assert rows
    for w, diff, expected in rows:
        assert diff == expected


def test_d5_sigma1_flips_first_two():
    rs = build_root_system("D", 5)
    w = F.paper_sigma(rs, 1)
    varpi5 = rs.fundamental_weights[4]
    assert varpi5 - w.act(varpi5) == rs.fundamental_weights[1]


def test_d4_prv_target():
    ctx = F.FlagContext.of("D", 4, (1, 2, 3))
    w = F.prv_witness(ctx, (0, 0, 0, 2))
    rs = ctx.rs
    v4 = rs.fundamental_weights[3]
    target = F.paper_sigma(rs, 1) * F.paper_sigma(rs, 3)
    assert w.act(v4) == target.act(v4)


@pytest.mark.parametrize("t,r,S,expected", [
    ("A", 2, (2,), [(1, 1)]),
    ("A", 1, (), [(2,)]),
    ("A", 3, (1, 3), [(0, 2, 0), (1, 0, 1)]),
])
def test_spherical_weights(t, r, S, expected):
    assert sorted(F.spherical_weights(F.FlagContext.of(t, r, S))) == expected


@pytest.mark.parametrize("t,r,S", [("A", 2, (2,)), ("A", 3, (1, 3)), ("C", 2, (2,))])
def test_prv_multiplicity_against_oracle(t, r, S):
    ctx = F.FlagContext.of(t, r, S)
    node = next(i for i in range(1, r + 1) if i not in S)
    varpi = tuple(int(j == node - 1) for j in range(r))
    dual = U.dual_module(U.build_irreducible(ctx.rs, varpi)).highest_weight
    dec = oracles.brauer_klimyk(t, r, dual, varpi)
    for mu in F.spherical_weights(ctx):
        w, mult = F.prv_multiplicity_check(ctx, mu)
        assert w is not None
        assert mult == dec.get(mu, 0) >= 1


def test_factorization_evidence_cp2():
    r = F.factorization_evidence(F.FlagContext.of("A", 2, (2,)))
    assert r.passed and r.multiplicity_free and r.exhaustive
    assert r.decomposition == {(1, 1): 1, (0, 0): 1}


def test_factorization_evidence_c2():
    r = F.factorization_evidence(F.FlagContext.of("C", 2, (2,)))
    assert r.passed
    assert sorted(r.spherical) == [(0, 1), (2, 0)]
