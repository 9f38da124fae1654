"""Root systems of simple type with exact rational arithmetic.

Node numbering follows Bourbaki:

====  ==========================================  ===================
type  diagram                                     long / short
====  ==========================================  ===================
A_n   1 - 2 - ... - n                              simply laced
B_n   1 - ... - (n-1) => n                         n short
C_n   1 - ... - (n-1) <= n                         n long
D_n   1 - ... - (n-2) < (n-1), n                   simply laced
E_n   1 - 3 - 4 - 5 - ... - n, with 2 on node 4    simply laced
F_4   1 - 2 => 3 - 4                               1, 2 long
G_2   1 <= 2                                       2 long
====  ==========================================  ===================

The invariant form is normalized so that short roots have squared length 2,
hence ``d_i = (alpha_i, alpha_i) / 2`` is 1, 2 or 3.  Weights are stored in the
fundamental-weight basis, which makes membership in ``P`` and dominance plain
integrality checks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from . import linalg

_VALID_RANKS = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 2,
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}


def _diagram(letter: str, n: int) -> tuple[list[int], list[tuple[int, int]]]:
    """Per-node d_i and the (0-based) edge list of the Dynkin diagram."""
    chain = [(i, i + 1) for i in range(n - 1)]
    if letter == "A":
        return [1] * n, chain
    if letter == "B":
        return [2] * (n - 1) + [1], chain
    if letter == "C":
        return [1] * (n - 1) + [2], chain
    if letter == "D":
        return [1] * n, [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    if letter == "E":
        edges = [(0, 2), (1, 3)] + [(i, i + 1) for i in range(2, n - 1)]
        return [1] * n, edges
    if letter == "F":
        return [2, 2, 1, 1], chain
    if letter == "G":
        return [1, 3], chain
    raise ValueError(letter)


class RootSystemMismatch(ValueError):
    """Raised when weights from different root systems are combined."""


@dataclass(frozen=True, eq=False)
class RootSystem:
    type_letter: str
    rank: int
    cartan_matrix: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]
    positive_roots_rc: tuple[tuple[int, ...], ...] = field(repr=False)

    def __eq__(self, other):
        return (isinstance(other, RootSystem)
                and (self.type_letter, self.rank) == (other.type_letter, other.rank))

    def __hash__(self):
        return hash((self.type_letter, self.rank))

    @property
    def name(self) -> str:
        return f"{self.type_letter}{self.rank}"

    # -- matrices -----------------------------------------------------------
    @cached_property
    def cartan(self) -> np.ndarray:
        return np.array(self.cartan_matrix, dtype=np.int64)

    @cached_property
    def cartan_inverse(self) -> np.ndarray:
        """Exact inverse; maps fundamental-weight coords to simple-root coords."""
        return linalg.inverse(linalg.frac_array(self.cartan_matrix))

    @cached_property
    def root_form(self) -> np.ndarray:
        """(alpha_i, alpha_j) as an exact matrix."""
        r = self.rank
        return linalg.frac_array([[self.d[i] * self.cartan_matrix[i][j] for j in range(r)]
                                  for i in range(r)])

    @cached_property
    def weight_form(self) -> np.ndarray:
        """(varpi_i, varpi_j) as an exact matrix: diag(d) A^{-1}."""
        dmat = linalg.frac_array(np.diag(self.d))
        return dmat.dot(self.cartan_inverse)

    # -- weights ------------------------------------------------------------
    def weight(self, *coeffs) -> "Weight":
        if len(coeffs) == 1 and not isinstance(coeffs[0], (int, Fraction)):
            coeffs = tuple(coeffs[0])
        if len(coeffs) != self.rank:
            raise ValueError(f"expected {self.rank} coefficients, got {len(coeffs)}")
        return Weight(self, tuple(Fraction(c) for c in coeffs))

    def zero(self) -> "Weight":
        return self.weight([0] * self.rank)

    @cached_property
    def fundamental_weights(self) -> tuple["Weight", ...]:
        return tuple(self.weight([int(i == j) for j in range(self.rank)])
                     for i in range(self.rank))

    def root_from_rc(self, rc) -> "Weight":
        """Weight of sum_j rc_j alpha_j (simple-root coordinates)."""
        a = self.cartan_matrix
        return self.weight([sum(a[i][j] * rc[j] for j in range(self.rank))
                            for i in range(self.rank)])

    @cached_property
    def simple_roots(self) -> tuple["Weight", ...]:
        return tuple(self.root_from_rc([int(i == j) for j in range(self.rank)])
                     for i in range(self.rank))

    @cached_property
    def positive_roots(self) -> tuple["Weight", ...]:
        return tuple(self.root_from_rc(rc) for rc in self.positive_roots_rc)

    @cached_property
    def rho(self) -> "Weight":
        return self.weight([1] * self.rank)

    @cached_property
    def roots_fc(self) -> dict[tuple[int, ...], int]:
        """Integer fundamental coords of every root -> +1/-1 (sign)."""
        out = {}
        for rc in self.positive_roots_rc:
            fc = tuple(sum(self.cartan_matrix[i][j] * rc[j] for j in range(self.rank))
                       for i in range(self.rank))
            out[fc] = 1
            out[tuple(-x for x in fc)] = -1
        return out

    def to_root_coords(self, mu: "Weight") -> tuple[Fraction, ...]:
        self._check(mu)
        return tuple(self.cartan_inverse.dot(np.array(mu.coeffs, dtype=object)))

    def inner(self, mu: "Weight", nu: "Weight") -> Fraction:
        self._check(mu)
        self._check(nu)
        g = self.weight_form
        return sum((mu.coeffs[i] * g[i, j] * nu.coeffs[j]
                    for i in range(self.rank) for j in range(self.rank)), Fraction(0))

    def coroot_pairing(self, mu: "Weight", alpha: "Weight") -> Fraction:
        """(mu, alpha^vee) = 2 (mu, alpha) / (alpha, alpha)."""
        return 2 * self.inner(mu, alpha) / self.inner(alpha, alpha)

    def dominance_leq(self, mu: "Weight", nu: "Weight") -> bool:
        """True iff nu - mu is a non-negative integer combination of simple roots."""
        diff = self.to_root_coords(nu - mu)
        return all(c.denominator == 1 and c >= 0 for c in diff)

    def weyl_dimension(self, lam: "Weight") -> int:
        lr = lam + self.rho
        num = Fraction(1)
        for a in self.positive_roots:
            num *= self.inner(lr, a) / self.inner(self.rho, a)
        if num.denominator != 1:
            raise ValueError(f"{lam} is not integral dominant")
        return int(num)

    def _check(self, mu: "Weight") -> None:
        if mu.rs != self:
            raise RootSystemMismatch(f"weight over {mu.rs.name} used with {self.name}")

    # -- epsilon realizations ----------------------------------------------
    @cached_property
    def epsilon_simple_roots(self) -> np.ndarray:
        """Rows are the simple roots in the standard epsilon coordinates."""
        letter, n = self.type_letter, self.rank
        if letter not in "ABCD":
            raise NotImplementedError("epsilon realization only for classical types")
        dim = n + 1 if letter == "A" else n
        rows = []
        for i in range(n - 1):
            v = [0] * dim
            v[i], v[i + 1] = 1, -1
            rows.append(v)
        last = [0] * dim
        if letter == "A":
            last[n - 1], last[n] = 1, -1
        elif letter == "B":
            last[n - 1] = 1
        elif letter == "C":
            last[n - 1] = 2
        else:
            last[n - 2], last[n - 1] = 1, 1
        rows.append(last)
        return linalg.frac_array(rows)

    def to_epsilon(self, mu: "Weight") -> tuple[Fraction, ...]:
        rc = np.array(self.to_root_coords(mu), dtype=object)
        return tuple(rc.dot(self.epsilon_simple_roots))

    def from_epsilon(self, vec) -> "Weight":
        vec = [Fraction(x) for x in vec]
        coeffs = []
        for row in self.epsilon_simple_roots:
            coeffs.append(2 * sum(a * b for a, b in zip(vec, row)) / sum(a * a for a in row))
        return self.weight(coeffs)

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "type": self.type_letter,
            "rank": self.rank,
            "cartan_matrix": [list(r) for r in self.cartan_matrix],
            "d": list(self.d),
            "positive_roots": [list(rc) for rc in self.positive_roots_rc],
            "rho": [str(c) for c in self.rho.coeffs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RootSystem":
        rs = build_root_system(data["type"], int(data["rank"]))
        if [list(r) for r in rs.cartan_matrix] != data["cartan_matrix"]:
            raise ValueError("serialized Cartan matrix does not match")
        return rs


@dataclass(frozen=True)
class Weight:
    rs: RootSystem = field(compare=True, repr=False)
    coeffs: tuple[Fraction, ...]

    def __repr__(self):
        return "W(" + ",".join(str(c) for c in self.coeffs) + ")"

    def _other(self, other: "Weight") -> "Weight":
        if not isinstance(other, Weight):
            return NotImplemented
        if other.rs != self.rs:
            raise RootSystemMismatch("weights over different root systems")
        return other

    def __add__(self, other):
        other = self._other(other)
        return Weight(self.rs, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        other = self._other(other)
        return Weight(self.rs, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Weight(self.rs, tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        return Weight(self.rs, tuple(Fraction(k) * a for a in self.coeffs))

    __rmul__ = __mul__

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    @property
    def is_dominant(self) -> bool:
        return self.is_integral and all(c >= 0 for c in self.coeffs)

    @property
    def is_regular_dominant(self) -> bool:
        return self.is_integral and all(c > 0 for c in self.coeffs)

    def as_ints(self) -> tuple[int, ...]:
        if not self.is_integral:
            raise ValueError(f"{self!r} is not in the weight lattice")
        return tuple(int(c) for c in self.coeffs)


def _positive_roots(cartan: list[list[int]]) -> list[tuple[int, ...]]:
    """Positive roots in simple-root coordinates via alpha-strings, by height."""
    n = len(cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                # <beta, alpha_i^vee> = sum_j beta_j a_ij
                pairing = sum(beta[j] * cartan[i][j] for j in range(n))
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(roots, key=lambda rc: (sum(rc), tuple(-x for x in rc)))


@lru_cache(maxsize=None)
def build_root_system(type_letter: str, rank: int) -> RootSystem:
    letter = str(type_letter).upper()
    if letter not in _VALID_RANKS or not isinstance(rank, int) or not _VALID_RANKS[letter](rank):
        raise ValueError(f"invalid simple type {type_letter}{rank}")
    d, edges = _diagram(letter, rank)
    form = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        form[i][i] = 2 * d[i]
    for i, j in edges:
        form[i][j] = form[j][i] = -max(d[i], d[j])
    cartan = [[form[i][j] // d[i] for j in range(rank)] for i in range(rank)]
    pos = _positive_roots(cartan)
    return RootSystem(letter, rank, tuple(tuple(r) for r in cartan), tuple(d), tuple(pos))
