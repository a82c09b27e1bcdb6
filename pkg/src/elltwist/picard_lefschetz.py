"""Vanishing cycles, the twisted Picard-Lefschetz transform and connection matrices.

Matrices act on coordinate columns over J' = ((01), (20), w1, w2): column
nu of M(gamma) holds the coordinates of gamma_*(Xi_nu).  A composite path
written left to right as g1 o g2 o ... o gk (gk traversed first) has the
matrix M(g1) M(g2) ... M(gk).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .chains import (
    J,
    J_PRIME,
    TwistedCycleSym,
    generator,
    intersect,
    intersection_matrix,
    reduce_to_basis,
)
from .errors import (
    CompositionMismatch,
    InDeformationWindow,
    SelfIntersectionZero,
    UnknownLabel,
)
from .kernel import Lattice
from .local_system import Configuration
from .ratfunc import (
    C,
    ONE,
    ZERO,
    Matrix,
    RationalFunctionC,
    charpoly,
    det,
    identity,
    inverse,
    mat,
    mat_eval,
    mat_str,
    matmul,
)

EPS_DET = 0.05

PAIRS = ("(01)", "(02)")
ELEMENTARY = (("(02)", -1, 0), ("(02)", 1, 0), ("(01)", 0, -1), ("(01)", 0, 1))
COMPOSITE = (("(02)", 1, 2), ("(02)", -1, 2), ("(01)", 2, 1), ("(01)", 2, -1))


# ---------------------------------------------------------------------------
# labels and configuration tags
# ---------------------------------------------------------------------------

def _pair(text: str) -> str:
    t = str(text).strip().strip("()")
    if t in ("01", "10"):
        return "(01)"
    if t in ("02", "20"):
        return "(02)"
    raise UnknownLabel(f"unknown pair {text!r}; expected (01) or (02)")


@dataclass(frozen=True)
class PathLabel:
    """gamma_{pair}^{m1, m2} raised to `power`."""

    pair: str
    m1: int
    m2: int
    power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pair", _pair(self.pair))
        key = (self.pair, int(self.m1), int(self.m2))
        if key not in ELEMENTARY + COMPOSITE:
            raise UnknownLabel(f"no path gamma_{self.pair}^{self.m1},{self.m2}")
        if self.power == 0:
            raise UnknownLabel("power must be a nonzero integer")

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.pair, self.m1, self.m2)

    @property
    def elementary(self) -> bool:
        return self.key in ELEMENTARY

    @property
    def swap(self) -> tuple[int, int]:
        return (0, 1) if self.pair == "(01)" else (0, 2)

    def inverse(self) -> "PathLabel":
        return PathLabel(self.pair, self.m1, self.m2, -self.power)

    def __str__(self):
        s = f"{self.pair[1:3]}:{self.m1},{self.m2}"
        return s if self.power == 1 else f"{s}^{self.power}"


_FACTOR = re.compile(
    r"^\(?(?P<pair>\d\d)\)?:\(?(?P<m1>[+-]?\d+),(?P<m2>[+-]?\d+)\)?(?:\^\(?(?P<pow>[+-]?\d+)\)?)?$"
)


def parse_label(text: str) -> PathLabel:
    """Parse '01:0,1', '(02):(1,0)' or '01:0,-1^-1'."""
    m = _FACTOR.match(str(text).replace(" ", ""))
    if not m:
        raise UnknownLabel(f"cannot parse path label {text!r}")
    power = int(m["pow"]) if m["pow"] else 1
    return PathLabel(m["pair"], int(m["m1"]), int(m["m2"]), power)


def parse_word(text: str) -> list[PathLabel]:
    """Factors separated by '*', 'o', the composition sign or whitespace; leftmost acts last."""
    parts = [p for p in re.split(r"\s*(?:\*|∘|\so\s)\s*|\s+", str(text).strip()) if p]
    return [parse_label(p) for p in parts]


def apply_tag(tag: str, label: PathLabel) -> str:
    """Configuration tag after traversing `label` (or its inverse) from `tag`."""
    t = list(tag.strip("()"))
    i, j = label.swap
    # a transposition is its own inverse, so every power acts by swap^|power|
    for _ in range(abs(label.power) % 2):
        t[i], t[j] = t[j], t[i]
    return "(" + "".join(t) + ")"


def composite_word(label: PathLabel) -> list[PathLabel]:
    """Word in elementary paths for gamma_(02)^{+-1,2}."""
    if label.elementary:
        return [label]
    if label.pair == "(02)" and label.m2 == 2:
        e = 1 if label.m1 == 1 else -1
        word = [
            PathLabel("(01)", 0, 1, -e),
            PathLabel("(01)", 0, -1, -e),
            PathLabel("(02)", label.m1, 0, e),
            PathLabel("(01)", 0, -1, e),
            PathLabel("(01)", 0, 1, e),
        ]
        if label.power == 1:
            return word
        if label.power == -1:
            return [w.inverse() for w in reversed(word)]
        base = word if label.power > 0 else [w.inverse() for w in reversed(word)]
        return base * abs(label.power)
    raise UnknownLabel(f"no decomposition is available for gamma_{label.pair}^{label.m1},{label.m2}")


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

def special_configuration(perm: str, lattice: Lattice) -> Configuration:
    """q_(ijk) = (w_i/2, w_j/2, w_k/2)."""
    digits = str(perm).strip("()")
    if sorted(digits) != ["0", "1", "2"]:
        raise ValueError(f"{perm!r} is not a permutation of 012")
    half = {0: lattice.omega0 / 2, 1: lattice.omega1 / 2, 2: lattice.omega2 / 2}
    x = [half[int(d)] for d in digits]
    return Configuration(x[0], x[1], lattice)


def singular_point(pair: str, m1: int, m2: int, lattice: Lattice) -> Configuration:
    """q_(ij)^{m1,m2}, where the path meets D^(ij); returned unchecked."""
    pair = _pair(pair)
    d = (m1 * lattice.omega1 + m2 * lattice.omega2) / 4
    if pair == "(02)":
        x0, x1 = lattice.omega0 / 2 + d, lattice.omega1 / 2
    else:
        x0, x1 = lattice.omega0 / 2 + d, lattice.omega1 / 2 - d
    return Configuration(x0, x1, lattice, checked=False)


def singular_membership(q: Configuration) -> set[str]:
    return q.singular_pairs()


def path_point(label: PathLabel, s: float, lattice: Lattice, eps_det: float = EPS_DET) -> Configuration:
    if not label.elementary:
        raise UnknownLabel(f"{label} is not elementary")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    if abs(s - 0.5) <= eps_det:
        raise InDeformationWindow(f"s = {s} lies in the deformation window around 1/2")
    d = (label.m1 * lattice.omega1 + label.m2 * lattice.omega2) * s / 2
    x0 = lattice.omega0 / 2 + d
    if label.pair == "(02)":
        x1 = lattice.omega1 / 2
    else:
        x1 = lattice.omega1 / 2 - d
    return Configuration(x0, x1, lattice)


# ---------------------------------------------------------------------------
# vanishing cycles and the transform
# ---------------------------------------------------------------------------

_VANISHING = {
    ("(02)", -1, 0): {"(20)": -1, "w1": -1, "w2": -1},
    ("(02)", 1, 0): {"(20)": -1, "w2": -1},
    ("(01)", 0, -1): {"(01)": 1, "w1": -1, "w2": -1},
    ("(01)", 0, 1): {"(01)": 1, "w1": -1},
}


def vanishing_cycle(label: PathLabel | str) -> TwistedCycleSym:
    if isinstance(label, str):
        label = parse_label(label)
    try:
        return TwistedCycleSym.from_dict(_VANISHING[label.key])
    except KeyError:
        raise UnknownLabel(f"no vanishing cycle is attached to {label}") from None


PL_CONSTANT = -C - 1


def pl_transform(xi: TwistedCycleSym, delta: TwistedCycleSym) -> TwistedCycleSym:
    """xi + (-c-1) <xi, delta> / <delta, delta> * delta."""
    dd = intersect(delta, delta)
    if not dd:
        raise SelfIntersectionZero("the vanishing cycle has zero self-intersection")
    k = PL_CONSTANT * intersect(xi, delta) / dd
    return xi + delta.scale(k)


def pl_transform_numeric(xi, delta, c0: complex, delta_dual=None) -> np.ndarray:
    """Same transform on complex coefficient vectors over J, at c = c0.

    `delta_dual` holds the coefficients of delta evaluated at 1/c0; it
    defaults to delta itself, which is right for constant coefficients.
    """
    M = np.array(mat_eval(intersection_matrix(), c0), dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    delta = np.asarray(delta, dtype=complex)
    dual = delta if delta_dual is None else np.asarray(delta_dual, dtype=complex)
    dd = delta @ M @ dual
    if dd == 0:
        raise SelfIntersectionZero("the vanishing cycle has zero self-intersection")
    return xi + (-c0 - 1) * (xi @ M @ dual) / dd * delta


@dataclass(frozen=True)
class ConnectionMatrix:
    matrix: Matrix
    source: str = "(012)"
    target: str = "(012)"
    word: tuple = ()

    def det(self) -> RationalFunctionC:
        return det(self.matrix)

    def charpoly(self) -> list[RationalFunctionC]:
        return charpoly(self.matrix)

    def at(self, c0: complex):
        return mat_eval(self.matrix, c0)

    def render(self) -> list[list[str]]:
        return mat_str(self.matrix)

    def __eq__(self, other):
        if isinstance(other, ConnectionMatrix):
            other = other.matrix
        return all(a == b for ra, rb in zip(self.matrix, other) for a, b in zip(ra, rb))

    __hash__ = None


def _columns_to_matrix(cols: Sequence[Sequence[RationalFunctionC]]) -> Matrix:
    n = len(cols)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def connection_matrix(label: PathLabel | str) -> ConnectionMatrix:
    if isinstance(label, str):
        label = parse_label(label)
    if not label.elementary:
        return compose([label])
    delta = vanishing_cycle(label)
    cols = []
    for name in J_PRIME:
        image = reduce_to_basis(pl_transform(generator(name), delta))
        cols.append(image.basis_vector())
    m = _columns_to_matrix(cols)
    base = PathLabel(*label.key)
    src = "(012)"
    out = ConnectionMatrix(m, src, apply_tag(src, base), (base,))
    if label.power == 1:
        return out
    return compose([label])


def _power(m: Matrix, k: int) -> Matrix:
    base = m if k > 0 else inverse(m)
    out = identity(len(m))
    for _ in range(abs(k)):
        out = matmul(out, base)
    return out


def compose(word: Iterable[PathLabel | str] | str, start: str = "(012)", end: str | None = None) -> ConnectionMatrix:
    """Matrix of the composite path; the rightmost factor is traversed first.

    Tags are tracked by the transposition each factor induces.  `end`, if
    given, must agree with the computed terminal tag.
    """
    if isinstance(word, str):
        word = parse_word(word)
    labels = [parse_label(w) if isinstance(w, str) else w for w in word]
    expanded: list[PathLabel] = []
    for lab in labels:
        expanded.extend(composite_word(lab))
    start = "(" + str(start).strip("()") + ")"
    tag = start
    m = identity(4)
    for lab in reversed(expanded):
        base = connection_matrix(PathLabel(*lab.key)).matrix
        m = matmul(_power(base, lab.power), m)
        tag = apply_tag(tag, lab)
    if end is not None and "(" + str(end).strip("()") + ")" != tag:
        raise CompositionMismatch(f"word ends at q{tag}, not at q({str(end).strip('()')})")
    return ConnectionMatrix(m, start, tag, tuple(labels))


# ---------------------------------------------------------------------------
# reference matrices (columns-as-images)
# ---------------------------------------------------------------------------

def _m(rows) -> Matrix:
    return mat([[RationalFunctionC.parse(x) if isinstance(x, str) else RationalFunctionC.coerce(x) for x in r]
                for r in rows])


GOLDEN = {
    ("(02)", -1, 0): _m([[1, 0, 0, 0],
                         ["c", "-c", "c-1", "-c+1"],
                         ["c", "-c-1", "c", "-c+1"],
                         ["c", "-c-1", "c-1", "-c+2"]]),
    ("(02)", 1, 0): _m([[1, 0, 0, 0],
                        ["c", "-c", "c-1", 0],
                        [0, 0, 1, 0],
                        ["c", "-c-1", "c-1", 1]]),
    ("(01)", 0, -1): _m([["-c", 1, "-c+1", "c-1"],
                         [0, 1, 0, 0],
                         ["c+1", -1, "c", "-c+1"],
                         ["c+1", -1, "c-1", "-c+2"]]),
    ("(01)", 0, 1): _m([["-c", 1, 0, "c-1"],
                        [0, 1, 0, 0],
                        ["c+1", -1, 1, "-c+1"],
                        [0, 0, 0, 1]]),
}


def golden_matrix(label: PathLabel | str) -> Matrix:
    if isinstance(label, str):
        label = parse_label(label)
    try:
        return GOLDEN[label.key]
    except KeyError:
        raise UnknownLabel(f"no reference matrix for {label}") from None


def verify_against_golden(label: PathLabel | str) -> bool:
    return connection_matrix(label) == golden_matrix(label)


def expected_charpoly() -> list[RationalFunctionC]:
    """(x-1)^3 (x+c), highest degree first."""
    # (x-1)^3 = x^3 - 3x^2 + 3x - 1
    a = [ONE, RationalFunctionC.const(-3), RationalFunctionC.const(3), RationalFunctionC.const(-1)]
    out = [ZERO] * 5
    for k, ak in enumerate(a):
        out[k] = out[k] + ak
        out[k + 1] = out[k + 1] + ak * C
    return out


__all__ = [
    "PathLabel", "ConnectionMatrix", "parse_label", "parse_word", "apply_tag",
    "special_configuration", "singular_point", "singular_membership", "path_point",
    "vanishing_cycle", "pl_transform", "pl_transform_numeric", "connection_matrix",
    "compose", "golden_matrix", "verify_against_golden", "expected_charpoly", "J", "J_PRIME",
]
