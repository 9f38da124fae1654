"""Weyl group elements as reduced words, parabolic quotients and inversion sequences.

An element is identified by its integer action matrix on fundamental-weight
coordinates (column convention, ``mu' = M @ mu``).  Simple reflections are
numbered from 1 as in the Bourbaki tables of :mod:`qflag.rootdata`.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .rootdata import RootSystem, Weight

DEFAULT_GROUP_CAP = int(os.environ.get("QFLAG_WEYL_CAP", "51840"))


class GroupTooLarge(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _simple_reflections(rs: RootSystem) -> tuple[np.ndarray, ...]:
    out = []
    for i in range(rs.rank):
        m = np.eye(rs.rank, dtype=np.int64)
        m[:, i] -= rs.cartan[:, i]
        m.setflags(write=False)
        out.append(m)
    return tuple(out)


def _canonical_letters(rs: RootSystem, mat: np.ndarray) -> tuple[int, ...]:
    """Lexicographically least reduced word of the element with action ``mat``.

    The left descents of w are the i with (w rho, alpha_i^vee) < 0.
    """
    refl = _simple_reflections(rs)
    rho = np.ones(rs.rank, dtype=np.int64)
    w = mat.copy()
    letters = []
    for _ in range(len(rs.positive_roots_rc) + 1):
        wr = w @ rho
        neg = np.nonzero(wr < 0)[0]
        if neg.size == 0:
            return tuple(letters)
        i = int(neg[0])
        letters.append(i + 1)
        w = refl[i] @ w
    raise ValueError("matrix is not a Weyl group element")


@dataclass(frozen=True, eq=False)
class WeylWord:
    root_system: RootSystem = field(repr=False)
    letters: tuple[int, ...]
    matrix: np.ndarray = field(repr=False, compare=False)

    def __eq__(self, other):
        return (isinstance(other, WeylWord) and other.root_system == self.root_system
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.root_system, self.matrix.tobytes()))

    def __repr__(self):
        return "e" if not self.letters else "s" + "s".join(map(str, self.letters))

    def __len__(self):
        return len(self.letters)

    @property
    def length(self) -> int:
        return len(self.letters)

    @classmethod
    def from_matrix(cls, rs: RootSystem, mat) -> "WeylWord":
        mat = np.asarray(mat, dtype=np.int64)
        letters = _canonical_letters(rs, mat)
        check = word_matrix(rs, letters)
        if not np.array_equal(check, mat):
            raise ValueError("matrix is not a Weyl group element")
        mat = mat.copy()
        mat.setflags(write=False)
        return cls(rs, letters, mat)

    @classmethod
    def of(cls, rs: RootSystem, letters) -> "WeylWord":
        """Keep ``letters`` verbatim; they must form a reduced expression."""
        letters = tuple(int(i) for i in letters)
        mat = word_matrix(rs, letters)
        if inversion_count(rs, mat) != len(letters):
            raise ValueError(f"{letters} is not a reduced expression")
        mat.setflags(write=False)
        return cls(rs, letters, mat)

    @classmethod
    def identity(cls, rs: RootSystem) -> "WeylWord":
        return cls.from_matrix(rs, np.eye(rs.rank, dtype=np.int64))

    def __mul__(self, other: "WeylWord") -> "WeylWord":
        return WeylWord.from_matrix(self.root_system, self.matrix @ other.matrix)

    def inverse(self) -> "WeylWord":
        return reduce(self.root_system, self.letters[::-1])

    def canonical(self) -> "WeylWord":
        return WeylWord.from_matrix(self.root_system, self.matrix)

    def act(self, mu: Weight) -> Weight:
        return act(self, mu)


def word_matrix(rs: RootSystem, letters) -> np.ndarray:
    refl = _simple_reflections(rs)
    m = np.eye(rs.rank, dtype=np.int64)
    for i in letters:
        if not 1 <= i <= rs.rank:
            raise ValueError(f"simple reflection index {i} out of range 1..{rs.rank}")
        m = m @ refl[i - 1]
    return m


def _root_fc(rs: RootSystem) -> np.ndarray:
    """Positive roots as integer fundamental-coordinate rows."""
    return np.array([[sum(rs.cartan_matrix[i][j] * rc[j] for j in range(rs.rank))
                      for i in range(rs.rank)] for rc in rs.positive_roots_rc], dtype=np.int64)


_ROOT_FC_CACHE: dict = {}


def positive_root_rows(rs: RootSystem) -> np.ndarray:
    if rs not in _ROOT_FC_CACHE:
        _ROOT_FC_CACHE[rs] = _root_fc(rs)
    return _ROOT_FC_CACHE[rs]


def _is_positive_root(rs: RootSystem, fc) -> bool:
    return rs.roots_fc[tuple(int(x) for x in fc)] > 0


def inversion_count(rs: RootSystem, mat: np.ndarray) -> int:
    """#(R+ cap w R-) = #{alpha > 0 : w alpha < 0}."""
    images = positive_root_rows(rs) @ mat.T
    return sum(1 for row in images if not _is_positive_root(rs, row))


def reduce(rs: RootSystem, letters) -> WeylWord:
    """Canonical (lexicographically least reduced) form of a word."""
    return WeylWord.from_matrix(rs, word_matrix(rs, letters))


def act(w: WeylWord, mu: Weight) -> Weight:
    w.root_system._check(mu)
    coeffs = w.matrix.astype(object).dot(np.array(mu.coeffs, dtype=object))
    return mu.rs.weight([Fraction(c) for c in coeffs])


def act_root_rc(w: WeylWord, rc) -> tuple[int, ...]:
    """Image of a root given in simple-root coordinates, again in root coordinates."""
    rs = w.root_system
    fc = rs.cartan @ np.asarray(rc, dtype=np.int64)
    img = w.matrix @ fc
    rcs = rs.cartan_inverse.dot(np.array(img, dtype=object))
    return tuple(int(x) for x in rcs)


def reflection(rs: RootSystem, root: Weight) -> WeylWord:
    """The reflection s_beta for a root beta."""
    cols = []
    for wgt in rs.fundamental_weights:
        cols.append((wgt - rs.coroot_pairing(wgt, root) * root).as_ints())
    return WeylWord.from_matrix(rs, np.array(cols, dtype=np.int64).T)


def from_epsilon_map(rs: RootSystem, emap) -> WeylWord:
    """Weyl element acting on the epsilon realization by the matrix ``emap``."""
    emap = np.array(emap, dtype=object)
    cols = []
    for wgt in rs.fundamental_weights:
        vec = emap.dot(np.array(rs.to_epsilon(wgt), dtype=object))
        cols.append(rs.from_epsilon(vec).as_ints())
    return WeylWord.from_matrix(rs, np.array(cols, dtype=np.int64).T)


@lru_cache(maxsize=None)
def _enumerate(rs: RootSystem, cap: int) -> tuple[WeylWord, ...]:
    refl = _simple_reflections(rs)
    start = np.eye(rs.rank, dtype=np.int64)
    seen = {start.tobytes(): start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for s in refl:
            n = m @ s
            key = n.tobytes()
            if key not in seen:
                if len(seen) >= cap:
                    raise GroupTooLarge(f"|W({rs.name})| exceeds cap {cap}")
                seen[key] = n
                queue.append(n)
    words = [WeylWord.from_matrix(rs, m) for m in seen.values()]
    return tuple(sorted(words, key=lambda w: (w.length, w.letters)))


def elements(rs: RootSystem, cap: int | None = None) -> tuple[WeylWord, ...]:
    """All of W in canonical form, ordered by (length, word)."""
    return _enumerate(rs, DEFAULT_GROUP_CAP if cap is None else cap)


def longest_element(rs: RootSystem) -> WeylWord:
    """sigma_0, found by descending until no simple root stays positive."""
    refl = _simple_reflections(rs)
    m = np.eye(rs.rank, dtype=np.int64)
    rho = np.ones(rs.rank, dtype=np.int64)
    while True:
        wr = m @ rho
        pos = np.nonzero(wr > 0)[0]
        if pos.size == 0:
            return WeylWord.from_matrix(rs, m)
        m = refl[int(pos[0])] @ m


def _normalize_subset(rs: RootSystem, S) -> tuple[int, ...]:
    S = tuple(sorted(set(int(i) for i in S)))
    if any(not 1 <= i <= rs.rank for i in S):
        raise ValueError(f"subset {S} has indices outside 1..{rs.rank}")
    return S


def is_min_coset_rep(w: WeylWord, S) -> bool:
    """l(w s_alpha) > l(w) for all alpha in S, i.e. w(alpha_i) > 0."""
    rs = w.root_system
    return all(_is_positive_root(rs, w.matrix @ rs.cartan[:, i - 1]) for i in S)


def maps_levi_roots_positive(w: WeylWord, S) -> bool:
    """sigma(R_S^+) contained in R^+."""
    rs = w.root_system
    S = set(S)
    for rc in rs.positive_roots_rc:
        if all(rc[j] == 0 for j in range(rs.rank) if (j + 1) not in S):
            if not _is_positive_root(rs, w.matrix @ (rs.cartan @ np.asarray(rc))):
                return False
    return True


@dataclass(frozen=True)
class ParabolicData:
    S: tuple[int, ...]
    W_S_order: int
    minimal_reps: tuple[WeylWord, ...]


def parabolic_subgroup(rs: RootSystem, S) -> tuple[WeylWord, ...]:
    S = _normalize_subset(rs, S)
    return tuple(w for w in elements(rs) if set(w.letters) <= set(S))


def minimal_coset_reps(rs: RootSystem, S, allow_full: bool = False) -> ParabolicData:
    S = _normalize_subset(rs, S)
    if len(S) == rs.rank and not allow_full:
        raise ValueError("S must be a proper subset of the simple roots")
    reps = []
    for w in elements(rs):
        a = is_min_coset_rep(w, S)
        if a != maps_levi_roots_positive(w, S):
            raise AssertionError(f"coset characterizations disagree at {w}")
        if a:
            reps.append(w)
    order = len(parabolic_subgroup(rs, S))
    return ParabolicData(S, order, tuple(reps))


def parabolic_decompose(w: WeylWord, S) -> tuple[WeylWord, WeylWord]:
    """w = w1 w2 with w1 in W^S, w2 in W_S and additive lengths."""
    rs = w.root_system
    S = _normalize_subset(rs, S)
    refl = _simple_reflections(rs)
    m = w.matrix.copy()
    tail = []
    changed = True
    while changed:
        changed = False
        for i in S:
            if not _is_positive_root(rs, m @ rs.cartan[:, i - 1]):
                m = m @ refl[i - 1]
                tail.append(i)
                changed = True
                break
    w1 = WeylWord.from_matrix(rs, m)
    w2 = reduce(rs, tail[::-1])
    return w1, w2


def concatenate(u: WeylWord, v: WeylWord) -> WeylWord:
    """The word u.letters + v.letters, which must be reduced."""
    return WeylWord.of(u.root_system, u.letters + v.letters)


def gamma_sequence(w: WeylWord) -> list[tuple[int, ...]]:
    """gamma_k = s_{i_l} ... s_{i_{k+1}} (alpha_{i_k}) in simple-root coordinates.

    Computed from ``w.letters`` as stored, which must be reduced.
    """
    rs = w.root_system
    letters = w.letters
    out = []
    for k, i in enumerate(letters):
        tail = WeylWord(rs, (), word_matrix(rs, letters[k + 1:][::-1]))
        rc = tuple(int(j == i - 1) for j in range(rs.rank))
        out.append(act_root_rc(tail, rc))
    return out


def stabilizer(rs: RootSystem, lam: Weight) -> tuple[WeylWord, ...]:
    return tuple(w for w in elements(rs) if act(w, lam) == lam)


def word_table(words) -> list[dict]:
    return [{"word": repr(w), "letters": list(w.letters), "length": w.length} for w in words]
