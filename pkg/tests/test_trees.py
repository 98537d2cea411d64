from fractions import Fraction

from opaq import trees as tr
from opaq.smodule import GradedSpace, SModule, identity_perm

ONE = Fraction(1)


def trivial_binary_gens(N=5):
    return SModule(
        N,
        {2: GradedSpace([("m", 0)])},
        act_basis=lambda n, s, lb: {lb: ONE},
    )


def regular_binary_gens(N=5):
    def act(n, s, lb):
        if s == identity_perm(2):
            return {lb: ONE}
        return {("q" if lb == "p" else "p"): ONE}

    return SModule(
        N, {2: GradedSpace([("p", 0), ("q", 0)])}, act_basis=act
    )


def test_free_operad_dims_trivial_gen():
    g = trivial_binary_gens()
    M = tr.free_operad_smodule(g, 5)
    assert M.space(2).dim == 1
    assert M.space(3).dim == 3
    assert M.space(4).dim == 15
    assert M.space(5).dim == 105


def test_free_operad_dims_regular_gen():
    g = regular_binary_gens(3)
    M = tr.free_operad_smodule(g, 3)
    assert M.space(2).dim == 2
    assert M.space(3).dim == 12


def test_empty_gens_gives_unit():
    g = SModule(3, {}, act_basis=lambda n, s, lb: {lb: ONE})
    M = tr.free_operad_smodule(g, 3)
    assert M.space(1).dim == 1
    assert M.space(2).dim == 0
    assert M.space(3).dim == 0


def test_canonicalize_fixes_child_order():
    g = trivial_binary_gens()
    raw = ("v", "m", (3, ("v", "m", (1, 2))))
    v = tr.canonicalize(g, raw)
    assert v == {("v", "m", (("v", "m", (1, 2)), 3)): ONE}


def test_canonicalize_odd_children_sign():
    # one odd binary generator: swapping two odd subtrees costs a sign
    g = SModule(
        5,
        {2: GradedSpace([("m", 1)])},
        act_basis=lambda n, s, lb: {lb: ONE},
    )
    t12 = ("v", "m", (1, 2))
    t34 = ("v", "m", (3, 4))
    raw = ("v", "m", (t34, t12))
    v = tr.canonicalize(g, raw)
    assert v == {("v", "m", (t12, t34)): -ONE}


def test_graft_leaf_relabeling():
    g = trivial_binary_gens()
    t = ("v", "m", (1, 2))
    out = tr.graft(g, t, 1, t)
    assert out == {("v", "m", (("v", "m", (1, 2)), 3)): ONE}
    out2 = tr.graft(g, t, 2, t)
    assert out2 == {("v", "m", (1, ("v", "m", (2, 3)))): ONE}


def test_graft_unit_identities():
    g = trivial_binary_gens()
    t = ("v", "m", (("v", "m", (1, 2)), 3))
    assert tr.graft(g, t, 2, 1) == {t: ONE}
    assert tr.graft(g, 1, 1, t) == {t: ONE}


def test_subtree_splits_count():
    g = trivial_binary_gens()
    t = ("v", "m", (("v", "m", (1, 2)), 3))
    splits = tr.subtree_splits(g, t)
    # two internal vertices: root split and lower split
    assert len(splits) == 2
    blocks = sorted(tuple(sorted(S)) for _, S, _, _ in splits)
    assert blocks == [(1, 2), (1, 2, 3)]


def test_vertex_derivation_is_square_zero():
    # two generators x (deg 1) -> y (deg 0), d extended as derivation
    g = SModule(
        4,
        {2: GradedSpace([("x", 1), ("y", 0)])},
        act_basis=lambda n, s, lb: {lb: ONE},
    )
    dop = {2: {("x"): {"y": ONE}}}
    M = tr.free_operad_smodule(g, 4, diff_op=dop)
    for n in range(2, 5):
        for t in M.space(n):
            dd = M.d_vec(n, M.d_vec(n, {t: ONE}))
            assert not dd, (n, t)
