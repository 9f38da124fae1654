from __future__ import annotations

import numpy as np
import pytest

from qflag import classify as K
from qflag import coeffalg as C
from qflag import fockrep as fr
from qflag import uqmod as U
from qflag.flagalg import FlagContext
from qflag.rootdata import build_root_system
from qflag.weyl import WeylWord, elements, longest_element

A2 = build_root_system("A", 2)


def test_vanishing_s1():
    v = K.check_vanishing(A2, (1,), (1, 0), N=6)
    assert v.passed
    # V(varpi_1) basis: varpi_1, s1 varpi_1, lowest; only the lowest lies outside the orbit
    assert v.params["pattern"] == (1, 1, 0)


def test_vanishing_longest_all_nonzero():
    v = K.check_vanishing(A2, longest_element(A2), (1, 0), N=6)
    assert v.passed and v.params["pattern"] == (1, 1, 1)


@pytest.mark.parametrize("w", elements(A2), ids=repr)
@pytest.mark.parametrize("lam", [(1, 0), (0, 1)])
def test_vanishing_all(w, lam):
    assert K.check_vanishing(A2, w, lam, N=5).passed


@pytest.mark.parametrize("word", [(2,), (1, 2)])
def test_h1_instances(word):
    ctx = FlagContext(A2, (1,))
    assert K.check_h1(ctx, word, (0, 1)).passed


def test_h1_preconditions():
    ctx = FlagContext(A2, (1,))
    with pytest.raises(K.PreconditionError):
        K.check_h1(ctx, (1,), (0, 1))
    with pytest.raises(K.PreconditionError):
        K.check_h1(ctx, (2,), (1, 0))


@pytest.mark.parametrize("pair", [((), (2,)), ((2,), (1, 2))])
def test_inequivalence(pair):
    v = K.check_inequivalence(FlagContext(A2, (1,)), *pair)
    assert v.passed and v.params["lambda"] == (0, 1)


def test_inequivalence_rejects_equal():
    with pytest.raises(K.PreconditionError):
        K.check_inequivalence(FlagContext(A2, (1,)), (2,), (2,))


@pytest.mark.parametrize("word,u", [((1,), "e"), ((2, 1), "s2")])
def test_restriction(word, u):
    ctx = FlagContext(A2, (1,))
    for t in fr.roots_of_unity_points(2, 2):
        v = K.check_restriction_factorization(ctx, word, t)
        assert v.passed and v.params["u"] == u


@pytest.mark.parametrize("S", [(1,), (2,)])
def test_gns(S):
    ctx = FlagContext(A2, S)
    for w in ctx.parabolic.minimal_reps:
        for lam in ctx.fundamental_weights():
            assert K.check_gns_pattern(ctx, w, lam, N=5).passed


@pytest.mark.parametrize("gen_lam,idx", [((1, 0), 0), ((1, 0), 1), ((1, 0), 2), ((0, 1), 1)])
def test_ladder(gen_lam, idx):
    assert K.check_ladder(A2, (1, 2), (1, 1), gen_lam, idx, N=6).passed


def test_facto_b2():
    assert K.check_facto(build_root_system("B", 2), (2, 1), (1, 1)).passed


def test_reduced_word_independence():
    V1 = U.build_irreducible(A2, (1, 0))
    V2 = U.build_irreducible(A2, (0, 1))
    els = [C.coeff(V1, k, 0) for k in range(3)] + [C.coeff(V2, k, 0) for k in range(2)]
    v = K.check_reduced_word_independence(A2, (1, 2, 1), (2, 1, 2), els, N=8)
    assert v.passed and v.params["eigenvalues"] > 100


def test_reduced_word_naive_spectra_differ():
    """Whole-box spectra disagree: the truncation cuts the two realizations differently."""
    V1 = U.build_irreducible(A2, (1, 0))
    x = C.coeff(V1, 1, 0).star() * C.coeff(V1, 1, 0)
    a = fr.spectrum(fr.pi_sigma((1, 2, 1), x, 6))
    b = fr.spectrum(fr.pi_sigma((2, 1, 2), x, 6))
    assert np.max(np.abs(a - b)) > 1e-3


def test_sector_functionals_preserved():
    """Shifts of pi(a^* a) leave the joint L-exponent labels unchanged."""
    V1 = U.build_irreducible(A2, (1, 0))
    w = WeylWord.of(A2, (1, 2, 1))
    x = C.coeff(V1, 1, 0).star() * C.coeff(V1, 1, 0)
    op = fr.pi_sigma(w, x, 6)
    exps = np.array([[e for e in fr.gamma_exponents(w, lam)] for lam in [(1, 0), (0, 1)]])
    for d, c in op.terms.items():
        if np.max(np.abs(c)) > 1e-14:
            assert np.all(exps @ np.array(d) == 0)


def test_record_is_deterministic():
    v = K.check_facto(A2, (1, 2), (1, 1))
    assert v.record() == K.check_facto(A2, (1, 2), (1, 1)).record()
    assert "verdict=pass" in v.record()
