from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from opaq.operads import builtin
from opaq.smodule import (
    GradedSpace,
    SModule,
    Suspension,
    compose,
    compose_linear,
    identity_perm,
    infinitesimal_compose,
    pcompose,
    perm_group,
    pinv,
    psign,
    reorder_sign,
    unit_smodule,
)

ONE = Fraction(1)


def test_perm_basics():
    s = (2, 3, 1)
    assert pcompose(s, pinv(s)) == identity_perm(3)
    assert psign((2, 1, 3)) == -1
    assert psign(identity_perm(4)) == 1


def test_reorder_sign_even_degrees():
    assert reorder_sign([0, 0, 0], [2, 0, 1]) == 1


def test_reorder_sign_odd_swap():
    assert reorder_sign([1, 1], [1, 0]) == -1


def test_compose_com_com_dim():
    C = builtin("com", 3).M
    CC = compose(C, C)
    # arity 2: outer arity 1 with inner arity 2, or outer arity 2 split 1|2
    assert CC.space(2).dim == 2
    assert CC.space(3).dim == 1 + 3 + 1


def test_compose_ass_ass_dim():
    A = builtin("ass", 2).M
    AA = compose(A, A)
    assert AA.space(2).dim == 4


def test_infinitesimal_com_dim():
    C = builtin("com", 3).M
    CiC = infinitesimal_compose(C, C)
    # one slot carries Com, the rest the unit of I: block sizes (1,2) x 3,
    # (3), (1,1,1) with the special slot in any of 3 places but inner must
    # have arity >= 1, outer from Com
    assert CiC.space(3).dim == 3 + 1 + 3


def test_compose_linear_ass_unit_dim():
    A = builtin("ass", 2).M
    I = unit_smodule(2)
    AI = compose_linear(A, I, A)
    # k=1 outer unit with Ass(2) in the special slot: 2; k=2 with the
    # special slot on either input: 2 x 2
    assert AI.space(2).dim == 6


def test_composite_action_is_group_action():
    A = builtin("ass", 3).M
    AA = compose(A, A)
    n = 3
    for s in perm_group(n):
        for t in perm_group(n):
            st_ = pcompose(s, t)
            for lab in AA.space(n):
                lhs = AA.act_vec(n, s, AA.act(n, t, lab))
                rhs = AA.act(n, st_, lab)
                assert lhs == rhs


def test_suspension_shifts_degree_and_flips_diff():
    sp = GradedSpace([("x", 0), ("y", 1)])
    M = SModule(
        2,
        {2: sp},
        diff={2: {"y": {"x": ONE}}},
        act_basis=lambda n, s, lb: {lb: ONE},
    )
    S = Suspension(1).smodule(M)
    assert S.degree(2, ("s", 1, "x")) == 1
    assert S.diff[2][("s", 1, "y")] == {("s", 1, "x"): -ONE}


def test_composite_differential_squares_to_zero():
    sp = GradedSpace([("x", 0), ("y", 1)])
    M = SModule(
        4,
        {2: sp},
        diff={2: {"y": {"x": ONE}}},
        act_basis=lambda n, s, lb: {lb: ONE},
    )
    MM = compose(M, M)
    for n in MM.arities():
        for lab in MM.space(n):
            assert not MM.d_vec(n, MM.d_vec(n, {lab: ONE})), (n, lab)


@given(st.permutations(list(range(1, 5))))
@settings(max_examples=30, deadline=None)
def test_action_equivariance_random_perm(p):
    sigma = tuple(p)
    A = builtin("ass", 4).M
    AA = compose(A, A)
    lab = next(iter(AA.space(4)))
    v = AA.act(4, sigma, lab)
    back = AA.act_vec(4, pinv(sigma), v)
    assert back == {lab: ONE}
