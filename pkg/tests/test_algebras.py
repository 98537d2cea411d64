from fractions import Fraction

import pytest

from opaq import operads as op
from opaq.algebras import (
    abelian_extension,
    adjoint_module,
    algebra_from_table,
    derivations,
    enveloping_algebra,
    free_module,
    kaehler,
    module_homs,
    trivial_algebra,
    trivial_module,
)
from opaq.smodule import GradedSpace

ONE = Fraction(1)


@pytest.fixture(scope="module")
def ass():
    return op.builtin("ass", 5)


@pytest.fixture(scope="module")
def com():
    return op.builtin("com", 4)


@pytest.fixture(scope="module")
def nil2(ass):
    # A = Kx + Ky with x*x = y, every other product zero
    return algebra_from_table(
        ass,
        [("x", 0), ("y", 0)],
        {
            (2, (1, 2)): {("x", "x"): {"y": 1}},
            (2, (2, 1)): {("x", "x"): {"y": 1}},
        },
        name="nil2",
    )


@pytest.fixture(scope="module")
def com_free(com):
    # free commutative algebra on one generator, products beyond the
    # arity bound vanish: v^i * v^j = v^(i+j)
    tab = {}
    for i in range(1, 5):
        for j in range(1, 5):
            if i + j <= 4:
                tab[(f"v{i}", f"v{j}")] = {f"v{i+j}": 1}
    return algebra_from_table(
        com,
        [(f"v{i}", 0) for i in range(1, 5)],
        {(2, "e"): tab},
        name="ComV",
    )


def test_invalid_algebra_rejected(ass):
    # x*x = x is not associative for a one-dimensional nonunital algebra:
    # (xx)x = x but x(xx) = x, fine -- break equivariance instead with
    # asymmetric tables for the two generators
    with pytest.raises(ValueError):
        algebra_from_table(
            ass,
            [("x", 0)],
            {(2, (1, 2)): {("x", "x"): {"x": 1}}},
            name="bad",
        )


def test_nonassociative_rejected(ass):
    # x*x = y, y*x = x: ((xx)x)x = (yx)x = xx = y but (xx)(xx) = yy = 0
    with pytest.raises(ValueError):
        algebra_from_table(
            ass,
            [("x", 0), ("y", 0)],
            {
                (2, (1, 2)): {("x", "x"): {"y": 1}, ("y", "x"): {"x": 1}},
                (2, (2, 1)): {("x", "x"): {"y": 1}, ("x", "y"): {"x": 1}},
            },
        )


def test_free_module_com_trivial(com):
    A = trivial_algebra(com, 1)
    Nsp = GradedSpace([("n0", 0)])
    fm = free_module(A, Nsp)
    assert fm.dim == 2


def test_free_module_ass_nilpotent(nil2):
    Nsp = GradedSpace([("n0", 0)])
    fm = free_module(nil2, Nsp)
    assert fm.dim == 9


def test_free_module_zero_algebra(com):
    A = trivial_algebra(com, 0)
    Nsp = GradedSpace([("n0", 0), ("n1", 0)])
    fm = free_module(A, Nsp)
    assert fm.dim == 2  # A = 0 gives A (x)^P N = N


def test_enveloping_com_trivial(com):
    for d in [1, 2, 3]:
        A = trivial_algebra(com, d)
        U = enveloping_algebra(A)
        assert U.dim == d + 1


def test_enveloping_lie_abelian_pbw():
    P = op.builtin("lie", 4)
    A = trivial_algebra(P, 2)
    U = enveloping_algebra(A)
    # truncated symmetric algebra on two letters
    assert U.dim == 1 + 2 + 3 + 4


def test_enveloping_product_associative(nil2):
    U = enveloping_algebra(nil2)
    basis = [{lb: ONE} for lb in U.space.labels]
    for x in basis:
        for y in basis:
            xy = U.product(x, y)
            for z in basis:
                lhs = U.product(xy, z)
                rhs = U.product(x, U.product(y, z))
                for k, c in rhs.items():
                    lhs[k] = lhs.get(k, 0) - c
                assert not any(lhs.values()), (x, y, z)


def test_enveloping_unit(nil2):
    U = enveloping_algebra(nil2)
    one = {U.unit: ONE}
    for lb in U.space.labels:
        v = {lb: ONE}
        assert U.product(one, v) == v
        assert U.product(v, one) == v


def test_free_module_is_valid_module(nil2):
    Nsp = GradedSpace([("n0", 0)])
    fm = free_module(nil2, Nsp)
    fm.as_fin_module(validate=True)  # raises on any failure


def test_module_over_enveloping_algebra(nil2):
    # a module structure is a left module over the enveloping algebra:
    # (u1 * u2) . m = u1 . (u2 . m) for the induced action
    U = enveloping_algebra(nil2)
    M = adjoint_module(nil2)

    def uact(lb, m):
        _, k, p, aword = lb[0]
        return M.act_basis(k, p, aword + (m,), k)

    for lb1 in U.space.labels:
        for lb2 in U.space.labels:
            prod = U.product({lb1: ONE}, {lb2: ONE})
            for m in M.space.labels:
                lhs = {}
                for lb, c in prod.items():
                    for m2, c2 in uact(lb, m).items():
                        lhs[m2] = lhs.get(m2, 0) + c * c2
                rhs = {}
                for m1, c1 in uact(lb2, m).items():
                    for m2, c2 in uact(lb1, m1).items():
                        rhs[m2] = rhs.get(m2, 0) + c1 * c2
                for k, c in rhs.items():
                    lhs[k] = lhs.get(k, 0) - c
                assert not any(lhs.values()), (lb1, lb2, m)


def test_adjunction_dims(nil2):
    Nsp = GradedSpace([("n0", 0), ("n1", 0)])
    fm = free_module(nil2, Nsp).as_fin_module()
    M = adjoint_module(nil2)
    sp, _ = module_homs(nil2, fm, M)
    assert sp.dim == Nsp.dim * M.space.dim


def test_kaehler_free_algebra_weight_bounded(com, com_free):
    # Omega_P(P(V)) = P(V) (x)^P V in weights <= the arity bound; the
    # boundary class v^(N) dv is a truncation artifact on both sides
    Om = kaehler(com_free)
    fmV = free_module(com_free, GradedSpace([("v", 0)]))
    N = com.N

    def weight(lb):
        u, b = lb
        w = sum(int(a[1:]) for a in u[3])
        return w + int(b[1:] if b != "v" else 1)

    om_w = [weight(lb) for lb in Om.space.labels]
    fm_w = [
        sum(int(a[1:]) for a in lb[0][3]) + 1 for lb in fmV.space.labels
    ]
    for w in range(1, N + 1):
        assert om_w.count(w) == fm_w.count(w), w
    assert Om.dim == N


def test_kaehler_trivial_algebra(com):
    B = trivial_algebra(com, 2)
    Om = kaehler(B)
    # gamma_B = 0: only the composite-killing relations act; classes are
    # u (x) db with u in {1, x0, x1} and the arity-3 part rewritten away
    assert Om.dim == 3


def test_kaehler_universal_derivation(com_free):
    Om = kaehler(com_free)
    d2 = Om.d("v2")
    dv = Om.d("v1")
    # d(v^2) = 2 v dv: acting by v on dv gives the same class up to 2
    v_dv = Om.act(2, "e", ("v1", "*"), 2, dv)
    for k, c in v_dv.items():
        d2[k] = d2.get(k, 0) - 2 * c
    assert not any(d2.values())


def test_derivations_one_dim_square_zero(ass):
    A = algebra_from_table(ass, [("x", 0)], {}, name="Kx")
    M = adjoint_module(A)
    sp, _ = derivations(A, M)
    assert sp.dim == 1


def test_derivations_nil2(nil2):
    # d(x) = a x + b y forces d(y) = 2a y: two parameters
    M = adjoint_module(nil2)
    sp, _ = derivations(nil2, M)
    assert sp.dim == 2


def test_derivations_free_algebra(com_free):
    M = adjoint_module(com_free)
    sp, _ = derivations(com_free, M)
    assert sp.dim == M.space.dim  # dim Hom(V, M), dim V = 1


def test_derivations_representable(com_free, nil2):
    for B in [com_free, nil2]:
        M = adjoint_module(B)
        der, _ = derivations(B, M)
        Om = kaehler(B).as_fin_module()
        hom, _ = module_homs(B, Om, M)
        assert der.dim == hom.dim, B.name


def test_derivations_trivial_everything(com):
    B = trivial_algebra(com, 2)
    M = trivial_module(B, 2)
    sp, _ = derivations(B, M)
    assert sp.dim == 4  # both sides of the square vanish


def test_abelian_extension(nil2):
    M = adjoint_module(nil2)
    ext, proj = abelian_extension(nil2, M)
    assert ext.space.dim == 4
    # products of two module elements vanish
    for g in [(1, 2), (2, 1)]:
        v = ext.gamma_basis(2, g, (("e", ("ad", "x")), ("e", ("ad", "x"))))
        assert not v
    # the projection is an algebra map: pi(a*b) = pi(a)*pi(b)
    xb = ("b", "x")
    out = ext.gamma_basis(2, (1, 2), (xb, xb))
    assert out == {("b", "y"): ONE}


def test_abelian_extension_trivial(com):
    A = trivial_algebra(com, 1)
    M = trivial_module(A, 1)
    ext, _ = abelian_extension(A, M)
    assert ext.space.dim == 2
    assert not ext.gen_maps.get((2, "e"))


def test_gamma_full_arity(nil2):
    # gamma on a non-generator operation: (12)(3) association on x,x,x
    P = nil2.P
    lab3 = next(iter(P.space(3)))
    out = nil2.gamma(3, {lab3: ONE}, ("x", "x", "x"))
    # all triple products vanish: x*x = y and y kills everything
    assert not out


def test_lie_algebra_bracket():
    # 2-dim nonabelian Lie algebra [e, f] = f
    P = op.builtin("lie", 4)
    b = P.gens[2][0]
    A = algebra_from_table(
        P,
        [("e", 0), ("f", 0)],
        {(2, b): {("e", "f"): {"f": 1}, ("f", "e"): {"f": -1}}},
        name="aff",
    )
    M = adjoint_module(A)
    M.validate()
    sp, _ = derivations(A, M)
    # derivations of the affine line algebra: d(e) = a f, d(f) = c f
    assert sp.dim == 2
