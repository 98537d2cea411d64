from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opaq.linalg import (
    ChainComplex,
    Quotient,
    RationalMatrix,
    SolveBasis,
    coequalizer,
    kernel_basis,
    rank,
)


def test_rank_empty():
    assert rank(RationalMatrix(0, 0)) == 0


def test_rank_identity():
    assert rank(RationalMatrix.identity(3)) == 3


def test_rank_dependent_rows():
    m = RationalMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    assert rank(m) == 1


def test_kernel_injective():
    assert kernel_basis(RationalMatrix.identity(2)) == []


def test_kernel_zero_map():
    ker = kernel_basis(RationalMatrix(2, 2))
    assert len(ker) == 2


def test_kernel_one_row():
    m = RationalMatrix.from_rows([[1, 1, 0]])
    ker = kernel_basis(m)
    assert len(ker) == 2
    for v in ker:
        assert v[0] + v[1] == 0


def test_coequalizer_equal_maps():
    f = RationalMatrix.identity(3)
    dim, proj = coequalizer(f, f)
    assert dim == 3
    assert proj.entries == RationalMatrix.identity(3).entries


def test_coequalizer_full_quotient():
    f = RationalMatrix.identity(2)
    g = RationalMatrix(2, 2)
    dim, _ = coequalizer(f, g)
    assert dim == 0


def test_coequalizer_projection_equalizes():
    f = RationalMatrix.from_rows([[1, 0], [2, 1], [0, 0]])
    g = RationalMatrix.from_rows([[0, 1], [1, 1], [1, 0]])
    dim, proj = coequalizer(f, g)
    assert proj.mul(f).sub(proj.mul(g)).is_zero()
    assert dim == 3 - rank(f.sub(g))


def test_chain_complex_rejects_bad_d2():
    d = {1: RationalMatrix.identity(1), 2: RationalMatrix.identity(1)}
    with pytest.raises(ValueError):
        ChainComplex({0: 1, 1: 1, 2: 1}, d)


def test_homology_acyclic():
    c = ChainComplex({0: 1, 1: 1}, {1: RationalMatrix.identity(1)})
    assert c.homology_dimension(0) == 0
    assert c.homology_dimension(1) == 0


def test_homology_zero_differential():
    c = ChainComplex({0: 2, 1: 3}, {1: RationalMatrix(2, 3)})
    assert c.homology_dimension(0) == 2
    assert c.homology_dimension(1) == 3


def test_quotient_project_kills_relations():
    # quotient of K^3 by (e0 - e1)
    q = Quotient(3, [{0: Fraction(1), 1: Fraction(-1)}])
    assert q.dim == 2
    assert q.project({0: Fraction(1)}) == q.project({1: Fraction(1)})


def test_solve_basis():
    b = SolveBasis([{0: Fraction(1), 1: Fraction(1)}, {1: Fraction(1)}])
    c = b.express({0: Fraction(2), 1: Fraction(3)})
    assert c == {0: Fraction(2), 1: Fraction(1)}
    assert b.express({2: Fraction(1)}) is None


@st.composite
def small_matrix(draw):
    r = draw(st.integers(1, 5))
    c = draw(st.integers(1, 5))
    data = [
        [draw(st.integers(-3, 3)) for _ in range(c)] for _ in range(r)
    ]
    return RationalMatrix.from_rows(data)


@given(small_matrix())
@settings(max_examples=60, deadline=None)
def test_rank_transpose(m):
    assert rank(m) == rank(m.transpose())


@given(small_matrix())
@settings(max_examples=60, deadline=None)
def test_rank_nullity(m):
    assert rank(m) + len(kernel_basis(m)) == m.cols


@given(small_matrix())
@settings(max_examples=40, deadline=None)
def test_kernel_vectors_annihilated(m):
    for v in kernel_basis(m):
        col = RationalMatrix(m.cols, 1, {(i, 0): c for i, c in enumerate(v) if c})
        assert m.mul(col).is_zero()
