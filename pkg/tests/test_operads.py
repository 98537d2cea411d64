import math
from fractions import Fraction

import pytest

from opaq import operads as op
from opaq.smodule import GradedSpace, SModule, op_compose, op_is_zero, schur_apply

ONE = Fraction(1)

N = 4


@pytest.fixture(scope="module")
def built():
    return {name: op.builtin(name, N) for name in
            ["com", "ass", "perm", "prelie", "lie", "leib"]}


def test_builtin_dimensions(built):
    for n in range(1, N + 1):
        assert built["com"].space(n).dim == 1
        assert built["ass"].space(n).dim == math.factorial(n)
        assert built["perm"].space(n).dim == n
        assert built["prelie"].space(n).dim == n ** (n - 1)
        assert built["lie"].space(n).dim == math.factorial(n - 1)
        assert built["leib"].space(n).dim == math.factorial(n)


def test_builtin_axioms(built):
    for name in ["com", "ass", "perm", "prelie", "lie"]:
        bad = op.check_operad_axioms(built[name], 4)
        assert bad == {
            "unit": 0, "sequential": 0, "parallel": 0, "equivariance": 0
        }, name


def test_unknown_builtin_rejected():
    with pytest.raises(ValueError):
        op.builtin("assoc", 3)


def test_perm_composition_traces_underline():
    # composing an underline-1 corolla into slot 1 of an underline-1
    # corolla keeps the underline at leaf 1
    P = op.builtin("perm", 5)
    assert P.comp(3, 1, 1, 3, 1) == {1: ONE}
    assert P.comp(3, 1, 1, 3, 2) == {2: ONE}
    assert P.comp(3, 2, 1, 3, 1) == {4: ONE}


def test_quadratic_matches_builtin():
    for name in ["com", "ass", "perm", "prelie"]:
        op.validate_quadratic_model(name, 4)


def test_free_operad_gamma_and_unit():
    g = SModule(
        4,
        {2: GradedSpace([("m", 0)])},
        act_basis=lambda n, s, lb: {lb: ONE},
    )
    F = op.free_operad(g, 4)
    bad = op.check_operad_axioms(F, 4)
    assert bad == {"unit": 0, "sequential": 0, "parallel": 0, "equivariance": 0}


def test_bar_dims_and_d2(built):
    bar = op.bar_construction(built["com"], 4)
    # arity 2, syzygy weight 1: one suspended binary corolla
    w1 = [t for t in bar.M.space(2) if op.syzygy_weight(t) == 1]
    assert len(w1) == 1
    for n in range(2, 5):
        d2 = bar.d2.get(n, {})
        assert op_is_zero(op_compose(d2, d2))
        assert not bar.d1.get(n), "built-ins carry no internal differential"
        tot = bar.M.diff.get(n, {})
        assert op_is_zero(op_compose(tot, tot))


def test_bar_total_differential_square_zero_ass(built):
    bar = op.bar_construction(built["ass"], 4)
    for n in range(2, 5):
        tot = bar.M.diff.get(n, {})
        assert op_is_zero(op_compose(tot, tot))


def test_koszul_dual_dimensions(built):
    expected = {
        "ass": [1, 2, 6, 24],
        "com": [1, 1, 2, 6],
        "lie": [1, 1, 1, 1],
        "perm": [1, 2, 9, 64],
    }
    for name, dims in expected.items():
        D = op.koszul_dual_cooperad(built[name], 4)
        assert [D.space(n).dim for n in range(1, 5)] == dims, name
        assert D.evidence == {}, name


def test_koszul_dual_degrees(built):
    D = op.koszul_dual_cooperad(built["ass"], 4)
    for n in range(2, 5):
        for lab in D.space(n):
            assert D.degree(n, lab) == n - 1


def test_cobar_d_square_zero(built):
    for name in ["ass", "com"]:
        D = op.koszul_dual_cooperad(built[name], 4)
        Om = op.cobar_construction(D, 4)
        for n in range(2, 5):
            dn = Om.M.diff.get(n, {})
            assert op_is_zero(op_compose(dn, dn)), (name, n)


def test_cobar_generators(built):
    D = op.koszul_dual_cooperad(built["ass"], 4)
    Om = op.cobar_construction(D, 4)
    # arity 2: one desuspended degree-0 generator per Ass!(2) element
    assert Om.M.space(2).dim == 2
    assert all(Om.degree(2, t) == 0 for t in Om.M.space(2))
    # arity 3: binary-tree pairs (degree 0) plus ternary generators (deg 1)
    degs = sorted(Om.degree(3, t) for t in Om.M.space(3))
    assert degs.count(1) == D.space(3).dim
    assert degs.count(0) == 12


def test_maurer_cartan_kappa(built):
    for name in ["com", "ass", "lie", "perm"]:
        D = op.koszul_dual_cooperad(built[name], 4)
        alpha = op.canonical_twisting("kappa", (D, built[name]))
        assert op.check_maurer_cartan(alpha) == 0, name


def test_maurer_cartan_pi_iota(built):
    for name in ["ass", "com"]:
        P = built[name]
        bar = op.bar_construction(P, 4)
        pi = op.canonical_twisting("pi", (bar, P))
        assert op.check_maurer_cartan(pi) == 0
        D = op.koszul_dual_cooperad(P, 4)
        Om = op.cobar_construction(D, 4)
        iota = op.canonical_twisting("iota", (D, Om))
        assert op.check_maurer_cartan(iota) == 0


def test_convolution_zero_map(built):
    P = built["com"]
    D = op.koszul_dual_cooperad(P, 4)
    zero = op.OperadicTwistingMorphism(D, P, {}, name="0")
    zz = op.convolution_star(zero, zero)
    assert all(not v for comp in zz.comps.values() for v in comp.values())


def test_kappa_on_binary_generator(built):
    P = built["ass"]
    D = op.koszul_dual_cooperad(P, 4)
    kap = op.canonical_twisting("kappa", (D, P))
    for lab in D.space(2):
        img = kap.apply_label(2, lab)
        assert img, "kappa nonzero on the degree-1 cogenerators"
    assert not kap.comps.get(3)


def test_dual_coproduct_counit(built):
    D = op.koszul_dual_cooperad(built["ass"], 3)
    # counit terms: outer or inner trivial part appears in every coproduct
    for n in range(2, 4):
        for lab in D.space(n):
            terms = D.cop[n][lab]
            outer_triv = [
                t for t in terms
                if len(t[2]) == 1
            ]
            assert outer_triv, (n, lab)


def test_schur_of_quadratic_lie():
    Lie = op.builtin("lie", 3)
    V = GradedSpace([("a", 0), ("b", 0)])
    LV = schur_apply(Lie.M, V)
    dims = {}
    for lb in LV.labels:
        dims[lb[1]] = dims.get(lb[1], 0) + 1
    # free Lie algebra multidegrees: dim Lie(n) (x)_{S_n} V^{(x)n}
    assert dims[1] == 2
    assert dims[2] == 1
    assert dims[3] == 2
