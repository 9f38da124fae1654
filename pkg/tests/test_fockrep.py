from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qflag import coeffalg as C
from qflag import fockrep as fr
from qflag import uqmod as U
from qflag.rootdata import build_root_system
from qflag.weyl import WeylWord

Q = 0.5
A1 = build_root_system("A", 1)
A2 = build_root_system("A", 2)
B2 = build_root_system("B", 2)


def test_t21_diagonal():
    op = fr.pi_su2(["t21"], 4, Q)
    assert op.is_diagonal()
    assert np.allclose(op.diagonal(), [1, Q, Q ** 2, Q ** 3])


def test_t12_diagonal():
    assert np.allclose(fr.pi_su2(["t12"], 3, Q).diagonal(), [-Q, -Q ** 2, -Q ** 3])


def test_t11_kills_vacuum():
    op = fr.pi_su2(["t11"], 5, Q).dense()
    assert np.all(op[:, 0] == 0)
    assert op[0, 1] == pytest.approx(np.sqrt(1 - Q ** 2))


@pytest.mark.parametrize("N", [8, 32])
def test_su2_relations(N):
    res = fr.su2_relation_residuals(N, Q)
    for name, (r, window) in res.items():
        assert r < 1e-12, name
        assert window >= N - 2


def test_window_shrinks_for_truncation_artifacts():
    # t11 t22 = 1 - q^{2(j+1)} fails only at the top level of the box
    op = fr.pi_su2(["t11", "t22"], 6, Q)
    exact = 1 - Q ** (2 * (np.arange(6) + 1))
    assert np.allclose(op.diagonal()[:op.window], exact[:op.window])
    assert op.diagonal()[-1] == 0


def test_truncation_error():
    with pytest.raises(fr.TruncationError):
        fr.pi_su2(["t11"], 0)


@st.composite
def operators(draw, N, l):
    shifts = draw(st.lists(st.tuples(*[st.integers(-2, 2)] * l), min_size=1, max_size=3, unique=True))
    vals = st.floats(-2, 2, allow_nan=False)
    terms = {d: np.array([draw(vals) for _ in range(N ** l)]) for d in shifts}
    return fr.TruncatedOperator(N, l, terms)


@settings(max_examples=40, deadline=None)
@given(data=st.data(), l=st.integers(1, 2))
def test_composition_matches_dense_on_window(data, l):
    N = 5
    A, B = data.draw(operators(N, l)), data.draw(operators(N, l))
    P = A @ B
    idx = P.window_indices()
    assert np.allclose(P.dense()[np.ix_(idx, idx)], (A.dense() @ B.dense())[np.ix_(idx, idx)])
    assert np.allclose(A.adjoint().dense(), A.dense().conj().T)
    assert np.allclose((A + B).dense(), A.dense() + B.dense())


@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_kron_matches_dense(data):
    A, B = data.draw(operators(3, 1)), data.draw(operators(3, 1))
    assert np.allclose(A.kron(B).dense(), np.kron(A.dense(), B.dense()))


# -- projections -----------------------------------------------------------------

def test_project_constant_at_orthogonal_node():
    V = U.build_irreducible(A2, (1, 0))
    exp = fr.project_su2(C.coeff(V, 0, 0), 2)
    assert {str(k): v for k, v in exp.items() if abs(v) > 1e-12} == {"1": pytest.approx(1.0)}


def test_project_t11_type():
    V = U.build_irreducible(A2, (1, 0))
    exp = {k: v for k, v in fr.project_su2(C.coeff(V, 0, 0), 1).items() if abs(v) > 1e-12}
    assert len(exp) == 1
    (m, v), = exp.items()
    assert str(m) == "t11" and m.bidegree == (1, 1) and v == pytest.approx(1.0)


@pytest.mark.parametrize("i,j", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_pi_s1_matches_pi_q(i, j):
    V = U.build_irreducible(A1, (1,))
    a = fr.pi_sigma((1,), C.coeff(V, i - 1, j - 1), 8)
    b = fr.pi_su2([(i, j)], 8, Q)
    assert fr.window_distance(a, b) < 1e-14


def test_pi_sigma_rejects_nonreduced():
    V = U.build_irreducible(A2, (1, 0))
    with pytest.raises(ValueError):
        fr.pi_sigma((1, 1), C.coeff(V, 0, 0), 4)


@st.composite
def a2_elements(draw):
    V = draw(st.sampled_from([U.build_irreducible(A2, (1, 0)), U.build_irreducible(A2, (0, 1))]))
    vals = st.floats(-1, 1, allow_nan=False)
    bra = np.array([complex(draw(vals), draw(vals)) for _ in range(V.dim)])
    ket = np.array([complex(draw(vals), draw(vals)) for _ in range(V.dim)])
    return C.coeff(V, bra, ket)


@pytest.mark.parametrize("word", [(1, 2, 1), (2, 1, 2), (1, 2)])
@settings(max_examples=6, deadline=None)
@given(data=st.data())
def test_pi_sigma_is_star_homomorphism(word, data):
    a, b = data.draw(a2_elements()), data.draw(a2_elements())
    N = 5
    pa, pb = fr.pi_sigma(word, a, N), fr.pi_sigma(word, b, N)
    assert fr.window_distance(fr.pi_sigma(word, a * b, N), pa @ pb) < 1e-10
    assert fr.window_distance(fr.pi_sigma(word, a.star(), N), pa.adjoint()) < 1e-10
    assert fr.window_distance(fr.pi_sigma(word, a + b, N), pa + pb) < 1e-10


def test_pi_identity_is_counit():
    V = U.build_irreducible(A2, (1, 1))
    for k in range(V.dim):
        phi = C.coeff(V, k, k)
        assert fr.pi_sigma((), phi, 4).dense()[0, 0] == pytest.approx(phi.counit())


# -- torus -------------------------------------------------------------------------

def test_tau_t11():
    V = U.build_irreducible(A1, (1,))
    theta = 0.7
    t = np.array([np.exp(1j * theta)])
    assert fr.tau_t(C.coeff(V, 0, 0), t) == pytest.approx(np.exp(1j * theta))
    assert fr.tau_t(C.coeff(V, 1, 1), t) == pytest.approx(np.exp(-1j * theta))
    assert fr.tau_t(C.coeff(V, 0, 1), t) == 0


def test_tau_is_character():
    V = U.build_irreducible(A2, (1, 0))
    W = U.build_irreducible(A2, (0, 1))
    t = fr.roots_of_unity_points(2, 1)[0]
    a, b = C.coeff(V, 1, 1), C.coeff(W, 2, 2)
    assert fr.tau_t(a * b, t) == pytest.approx(fr.tau_t(a, t) * fr.tau_t(b, t))


# -- L operators --------------------------------------------------------------------

def test_l_operator_a1():
    L = fr.L_operator((1,), (1,), A1, N=4)
    assert L.is_diagonal(1e-14)
    assert np.allclose(L.diagonal(), [1, Q ** 2, Q ** 4, Q ** 6])


def test_a2_gamma_exponents():
    w = WeylWord.of(A2, (1, 2))
    assert fr.gamma_exponents(w, (1, 0)) == [1, 0]


@pytest.mark.parametrize("rs,word,lam", [(A2, (1, 2), (1, 1)), (A2, (2, 1, 2), (1, 2)),
                                        (B2, (2, 1), (1, 1)), (B2, (1, 2, 1), (0, 1))])
def test_l_operator_matches_facto(rs, word, lam):
    w = WeylWord.of(rs, word)
    L = fr.L_operator(w, lam, N=6)
    assert L.is_diagonal(1e-12)
    assert np.max(np.abs(L.diagonal() - fr.facto_diagonal(w, lam, 6))) < 1e-12


def test_h1_regular_and_control():
    assert fr.h1_eigenspace((2,), (0, 1), A2, N=6)[0] == 1
    dim, basis = fr.h1_eigenspace((1, 2), (1, 0), A2, N=6)
    assert dim == 6 and all(b[0] == 0 for b in basis)


def test_spectrum_sorted():
    L = fr.L_operator((1,), (1,), A1, N=4)
    assert np.allclose(fr.spectrum(L), sorted([1, Q ** 2, Q ** 4, Q ** 6]))
