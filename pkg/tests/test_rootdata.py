from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qflag.rootdata import RootSystem, RootSystemMismatch, build_root_system

TYPES = [("A", 1), ("A", 2), ("A", 3), ("A", 4), ("B", 2), ("B", 3), ("C", 2), ("C", 3),
         ("D", 4), ("D", 5), ("G", 2), ("F", 4), ("E", 6)]

# |Phi^+| from the classical formulas
POSITIVE_COUNT = {("A", 1): 1, ("A", 2): 3, ("A", 3): 6, ("A", 4): 10, ("B", 2): 4, ("B", 3): 9,
                  ("C", 2): 4, ("C", 3): 9, ("D", 4): 12, ("D", 5): 20, ("G", 2): 6, ("F", 4): 24,
                  ("E", 6): 36}


@pytest.mark.parametrize("t,r", TYPES)
def test_positive_root_count(t, r):
    rs = build_root_system(t, r)
    assert len(rs.positive_roots) == POSITIVE_COUNT[(t, r)]
    assert len(rs.positive_roots) == oracles.positive_root_count(t, r)


@pytest.mark.parametrize("t,r", TYPES)
def test_symmetrized_cartan(t, r):
    rs = build_root_system(t, r)
    DA = np.diag(rs.d) @ rs.cartan.astype(np.int64)
    assert np.array_equal(DA, DA.T)
    assert all(rs.cartan[i, i] == 2 for i in range(r))


@pytest.mark.parametrize("t,r", TYPES)
def test_rho_is_half_sum(t, r):
    rs = build_root_system(t, r)
    total = rs.zero()
    for beta in rs.positive_roots:
        total = total + beta
    assert total * Fraction(1, 2) == rs.rho
    assert rs.rho.as_ints() == (1,) * r


def test_a2_inner_product():
    rs = build_root_system("A", 2)
    w1, w2 = rs.fundamental_weights
    assert rs.inner(w1, w1) == Fraction(2, 3)
    assert rs.inner(w1, w2) == Fraction(1, 3)


def test_a2_dominance_incomparable():
    rs = build_root_system("A", 2)
    w1, w2 = rs.fundamental_weights
    assert not rs.dominance_leq(w1, w2)
    assert not rs.dominance_leq(w2, w1)
    assert rs.dominance_leq(rs.zero(), w1 + w2)


def test_d5_epsilon_realization():
    rs = build_root_system("D", 5)
    assert len(rs.positive_roots) == 20
    assert rs.to_epsilon(rs.fundamental_weights[4]) == (Fraction(1, 2),) * 5
    assert rs.to_epsilon(rs.fundamental_weights[1]) == (1, 1, 0, 0, 0)


@pytest.mark.parametrize("t,r", [("B", 2), ("C", 3), ("G", 2), ("F", 4)])
def test_coroot_pairing_is_cartan(t, r):
    rs = build_root_system(t, r)
    for i, a in enumerate(rs.simple_roots):
        for j, b in enumerate(rs.simple_roots):
            assert rs.coroot_pairing(b, a) == rs.cartan[i, j]


def test_invalid_types():
    for t, r in [("E", 5), ("B", 1), ("G", 3), ("Q", 2), ("D", 3)]:
        with pytest.raises(ValueError):
            build_root_system(t, r)


def test_mismatch():
    a = build_root_system("A", 2).fundamental_weights[0]
    b = build_root_system("B", 2).fundamental_weights[0]
    with pytest.raises(RootSystemMismatch):
        a + b


@pytest.mark.parametrize("t,r", TYPES)
def test_roundtrip(t, r):
    rs = build_root_system(t, r)
    assert RootSystem.from_dict(rs.to_dict()) == rs


@pytest.mark.parametrize("t,r,top", [("A", 2, 3), ("B", 3, 1), ("C", 2, 2), ("G", 2, 2), ("D", 4, 1)])
@settings(max_examples=15, deadline=None)
@given(data=st.data())
def test_weyl_dimension_matches_freudenthal(t, r, top, data):
    lam = tuple(data.draw(st.lists(st.integers(0, top), min_size=r, max_size=r)))
    rs = build_root_system(t, r)
    assert rs.weyl_dimension(rs.weight(*lam)) == oracles.dimension(t, r, lam)


@pytest.mark.parametrize("t,r", [("A", 3), ("B", 2), ("G", 2)])
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_inner_is_symmetric_bilinear(t, r, data):
    rs = build_root_system(t, r)
    vec = st.lists(st.integers(-3, 3), min_size=r, max_size=r)
    a, b, c = (rs.weight(*data.draw(vec)) for _ in range(3))
    assert rs.inner(a, b) == rs.inner(b, a)
    assert rs.inner(a + b, c) == rs.inner(a, c) + rs.inner(b, c)
    assert rs.inner(a, a) >= 0
