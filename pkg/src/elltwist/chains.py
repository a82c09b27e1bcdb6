"""Symbolic twisted cycles over Q(c) and their intersection pairing.

Generators are indexed by J = ((01), (12), (20), w1, w2) in that order.
The three segment cycles satisfy Xi_(01) + Xi_(12) + Xi_(20) = 0, so
J' = ((01), (20), w1, w2) is a basis.

The pairing matrix below is taken as given; it is valid in the chamber
arg x0 < arg x1 < arg x2.  Everything else in this module is derived
from it by exact arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import UnknownIndex
from .ratfunc import (
    C,
    ONE,
    ZERO,
    Matrix,
    RationalFunctionC,
    kernel,
    mat_str,
    rank,
)

J = ("(01)", "(12)", "(20)", "w1", "w2")
J_PRIME = ("(01)", "(20)", "w1", "w2")

_ALIASES = {
    "01": "(01)", "(01)": "(01)", "10": "(01)",
    "12": "(12)", "(12)": "(12)", "21": "(12)",
    "20": "(20)", "(20)": "(20)", "02": "(20)",
    "w1": "w1", "omega1": "w1", "ω1": "w1", "ω₁": "w1",
    "w2": "w2", "omega2": "w2", "ω2": "w2", "ω₂": "w2",
}


def canonical_index(name: str) -> str:
    try:
        return _ALIASES[str(name).strip()]
    except KeyError:
        raise UnknownIndex(f"unknown generator index {name!r}; expected one of {J}") from None


def segment_endpoints(index: str) -> tuple[int, int]:
    """(i, j) for a segment index (ij); the segment runs from x_i to x_j."""
    index = canonical_index(index)
    if not index.startswith("("):
        raise UnknownIndex(f"{index} is not a segment index")
    return int(index[1]), int(index[2])


@dataclass(frozen=True)
class TwistedCycleSym:
    """Formal Q(c)-combination of the generators in J.

    ``dual`` marks elements of the dual homology (coefficients already
    carried through c -> 1/c).
    """

    coeffs: tuple = field(default_factory=lambda: (ZERO,) * 5)
    dual: bool = False

    @classmethod
    def from_dict(cls, d: Mapping, dual: bool = False) -> "TwistedCycleSym":
        vals = [ZERO] * 5
        for k, v in d.items():
            vals[J.index(canonical_index(k))] = vals[J.index(canonical_index(k))] + RationalFunctionC.coerce(v)
        return cls(tuple(vals), dual)

    @classmethod
    def from_basis_vector(cls, vec: Iterable) -> "TwistedCycleSym":
        """Build from coordinates on J'."""
        vec = [RationalFunctionC.coerce(v) for v in vec]
        if len(vec) != 4:
            raise ValueError("expected four coordinates on J'")
        return cls((vec[0], ZERO, vec[1], vec[2], vec[3]))

    def __getitem__(self, name: str) -> RationalFunctionC:
        return self.coeffs[J.index(canonical_index(name))]

    def _check(self, other: "TwistedCycleSym"):
        if self.dual != other.dual:
            raise ValueError("cannot combine a cycle with a dual cycle")

    def __add__(self, other: "TwistedCycleSym") -> "TwistedCycleSym":
        self._check(other)
        return TwistedCycleSym(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.dual)

    def __sub__(self, other: "TwistedCycleSym") -> "TwistedCycleSym":
        self._check(other)
        return TwistedCycleSym(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.dual)

    def __neg__(self) -> "TwistedCycleSym":
        return TwistedCycleSym(tuple(-a for a in self.coeffs), self.dual)

    def scale(self, k) -> "TwistedCycleSym":
        k = RationalFunctionC.coerce(k)
        return TwistedCycleSym(tuple(k * a for a in self.coeffs), self.dual)

    def __rmul__(self, k):
        return self.scale(k)

    def basis_vector(self) -> list[RationalFunctionC]:
        """Coordinates on J' (requires the (12) coefficient to vanish)."""
        if self.coeffs[1]:
            raise ValueError("reduce_to_basis first: (12) coefficient is non-zero")
        return [self.coeffs[0], self.coeffs[2], self.coeffs[3], self.coeffs[4]]

    def is_zero(self) -> bool:
        return all(not a for a in self.coeffs)

    def __str__(self):
        parts = []
        for name, a in zip(J, self.coeffs):
            if a:
                parts.append(f"({a})*Xi{name}")
        return " + ".join(parts) if parts else "0"


def generator(index: str) -> TwistedCycleSym:
    vals = [ZERO] * 5
    vals[J.index(canonical_index(index))] = ONE
    return TwistedCycleSym(tuple(vals))


def reduce_to_basis(xi: TwistedCycleSym) -> TwistedCycleSym:
    """Eliminate Xi_(12) = -Xi_(01) - Xi_(20)."""
    a01, a12, a20, a1, a2 = xi.coeffs
    return TwistedCycleSym((a01 - a12, ZERO, a20 - a12, a1, a2), xi.dual)


def dualize(xi: TwistedCycleSym) -> TwistedCycleSym:
    return TwistedCycleSym(tuple(a.subs_inverse() for a in xi.coeffs), not xi.dual)


def intersection_matrix() -> Matrix:
    d = -(C + 1) / (C - 1)
    u = ONE / (C - 1)
    v = C / (C - 1)
    return [
        [d, u, v, ZERO, ZERO],
        [v, d, u, ZERO, ZERO],
        [u, v, d, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ZERO, ONE],
        [ZERO, ZERO, ZERO, -ONE, ZERO],
    ]


_MATRIX = intersection_matrix()


def intersect(xi: TwistedCycleSym, eta: TwistedCycleSym) -> RationalFunctionC:
    """<xi, eta^dual>: linear in xi, coefficients of eta taken at 1/c."""
    if xi.dual:
        raise ValueError("first argument must be an ordinary twisted cycle")
    b = [x.subs_inverse() for x in eta.coeffs] if not eta.dual else list(eta.coeffs)
    acc = ZERO
    for mu, a in enumerate(xi.coeffs):
        if not a:
            continue
        for nu, bn in enumerate(b):
            if bn and _MATRIX[mu][nu]:
                acc = acc + a * bn * _MATRIX[mu][nu]
    return acc


def minor(m: Matrix, row: int, col: int) -> Matrix:
    return [[x for j, x in enumerate(r) if j != col] for i, r in enumerate(m) if i != row]


def cofactor(m: Matrix, row: int, col: int) -> RationalFunctionC:
    """Signed cofactor; row/col are 1-based as in the usual matrix notation."""
    from .ratfunc import det

    sign = 1 if (row + col) % 2 == 0 else -1
    return det(minor(m, row - 1, col - 1)) * sign


def gram_matrix(indices=J_PRIME) -> Matrix:
    ids = [J.index(canonical_index(i)) for i in indices]
    return [[_MATRIX[i][j] for j in ids] for i in ids]


def rank_check() -> int:
    """Rank of the pairing restricted to J'; four means J' is a basis."""
    return rank(gram_matrix(J_PRIME))


def pairing_kernel() -> list[list[RationalFunctionC]]:
    return kernel(intersection_matrix())


def render_matrix(m: Matrix) -> list[list[str]]:
    return mat_str(m)
