import random

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from elltwist.chains import (
    J,
    TwistedCycleSym,
    cofactor,
    dualize,
    generator,
    gram_matrix,
    intersect,
    intersection_matrix,
    pairing_kernel,
    rank_check,
    reduce_to_basis,
    render_matrix,
)
from elltwist.errors import UnknownIndex
from elltwist.ratfunc import C, ONE, ZERO, RationalFunctionC, mat_eval, rank, transpose

c = sp.symbols("c")

# Reference matrix typed in from the source (rows mu, columns nu over J).
REFERENCE = sp.Matrix([
    [-(c + 1) / (c - 1), 1 / (c - 1), c / (c - 1), 0, 0],
    [c / (c - 1), -(c + 1) / (c - 1), 1 / (c - 1), 0, 0],
    [1 / (c - 1), c / (c - 1), -(c + 1) / (c - 1), 0, 0],
    [0, 0, 0, 0, 1],
    [0, 0, 0, -1, 0],
])


def to_sympy(r):
    return sp.sympify(str(r).replace("^", "**"))


def test_matrix_matches_reference_entrywise():
    M = intersection_matrix()
    for i in range(5):
        for j in range(5):
            assert sp.simplify(to_sympy(M[i][j]) - REFERENCE[i, j]) == 0


def test_rendered_strings():
    rows = render_matrix(intersection_matrix())
    assert rows[0] == ["(-c-1)/(c-1)", "1/(c-1)", "c/(c-1)", "0", "0"]
    assert rows[3] == ["0", "0", "0", "0", "1"]
    assert rows[4] == ["0", "0", "0", "-1", "0"]


def test_cofactor_22():
    M = intersection_matrix()
    assert str(cofactor(M, 2, 2)) == "(c^2+c+1)/(c-1)^2"
    ref = REFERENCE.minor_submatrix(1, 1).det()
    assert sp.simplify(ref - (c ** 2 + c + 1) / (c - 1) ** 2) == 0


def test_generators():
    assert generator("(01)")["(01)"] == ONE
    assert generator("w1")["w1"] == ONE
    assert generator("(12)")["(12)"] == ONE
    with pytest.raises(UnknownIndex):
        generator("(03)")


def test_reduce_to_basis_examples():
    e01, e12, e20 = generator("(01)"), generator("(12)"), generator("(20)")
    assert reduce_to_basis(e12) == -e01 - e20
    assert reduce_to_basis(e01 + e12 + e20).is_zero()
    assert reduce_to_basis(generator("w2")) == generator("w2")


def test_dualize_examples():
    x = TwistedCycleSym.from_dict({"(01)": C, "w1": ONE / (C - 1)})
    d = dualize(x)
    assert d["(01)"] == ONE / C
    assert d["w1"] == -C / (C - 1)
    assert d.dual and dualize(d) == x


def test_intersection_examples():
    e01, e20 = generator("(01)"), generator("(20)")
    assert intersect(e01, e01) == -(C + 1) / (C - 1)
    assert intersect(generator("w1"), generator("w2")) == ONE
    assert intersect(generator("w2"), generator("w1")) == -ONE
    assert intersect(e01, e20) == C / (C - 1)


def test_relation_is_in_the_radical():
    rel = generator("(01)") + generator("(12)") + generator("(20)")
    for name in J:
        assert intersect(rel, generator(name)).is_zero()
        assert intersect(generator(name), rel).is_zero()


def test_vanishing_cycle_self_intersection():
    delta = generator("(01)") - generator("w1")
    # bilinear expansion by hand: <e01,e01> + <w1,w1> - <e01,w1> - <w1,e01>
    assert intersect(delta, delta) == -(C + 1) / (C - 1)


def test_twisted_antisymmetry():
    M = intersection_matrix()
    Mt_inv = transpose([[x.subs_inverse() for x in row] for row in M])
    assert all(a == -b for ra, rb in zip(Mt_inv, M) for a, b in zip(ra, rb))


def test_rank_and_kernel():
    assert rank_check() == 4
    assert rank(intersection_matrix()) == 4
    assert REFERENCE.rank(simplify=True) == 4
    (v,) = pairing_kernel()
    # normalised so the first entry is 1
    v = [x / v[0] for x in v]
    assert v == [ONE, ONE, ONE, ZERO, ZERO]


def test_gram_block_independent():
    G = gram_matrix()
    ref = sp.Matrix([[to_sympy(x) for x in row] for row in G])
    assert sp.simplify(ref.det()) != 0


def test_numeric_evaluation_matches_exact():
    rng = random.Random(5)
    M = intersection_matrix()
    for _ in range(10):
        c0 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(abs(c0) - 1) < 1e-3 or abs(c0) < 1e-3:
            continue
        num = np.array(mat_eval(M, c0), dtype=complex)
        ref = np.array(REFERENCE.subs(c, c0).evalf(), dtype=complex)
        assert np.max(np.abs(num - ref)) < 1e-12 * max(1, np.max(np.abs(ref)))


small = st.integers(-3, 3).map(RationalFunctionC.const)
entries = st.one_of(small, small.map(lambda k: k * C), small.map(lambda k: k / (C - 1)))
vectors = st.lists(entries, min_size=5, max_size=5).map(lambda v: TwistedCycleSym(tuple(v)))


@settings(max_examples=30, deadline=None)
@given(vectors, vectors, vectors, entries)
def test_sesquilinearity(x, y, z, k):
    assert intersect(x + y, z) == intersect(x, z) + intersect(y, z)
    assert intersect(x.scale(k), z) == k * intersect(x, z)
    assert intersect(x, z.scale(k)) == k.subs_inverse() * intersect(x, z)


@settings(max_examples=30, deadline=None)
@given(vectors)
def test_reduce_is_projection(x):
    r = reduce_to_basis(x)
    assert reduce_to_basis(r) == r
    # the pairing does not see the relation
    for name in J:
        assert intersect(r, generator(name)) == intersect(x, generator(name))
