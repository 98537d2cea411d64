"""Twisted cotangent complexes and Andre-Quillen cohomology.

The cotangent complex of a finite-dimensional algebra A over a truncated
operad P, presented on the free module A (x)^P C(A) for a cooperad C with
an operadic twisting morphism alpha : C -> P.  The differential is
d_phi = d_base - delta_l + delta_r, where d_base is induced by the
internal differential of C, delta_r twists inside the coalgebra C(A)
(split one cooperad factor off with the partial coproduct, push it into
P with alpha and evaluate on the letters), and delta_l moves the split
factor into the enveloping side instead.

Cohomology is computed twice, on Hom(C(A), M) with the twisted hom
differential and on module maps A (x)^P C(A) -> M, and the two answers
are compared degree by degree.
"""

import itertools
from fractions import Fraction

from .algebras import (
    FinAlgebra,
    FinModule,
    FreeModule,
    KaehlerModule,
    trivial_algebra,
)
from .linalg import SolveBasis, kernel_of_columns, rank_of_columns, vec_addmul
from .operads import (
    BarCooperad,
    OperadicTwistingMorphism,
    TruncatedCooperad,
    bar_construction,
    builtin as builtin_operad,
    canonical_twisting,
    cobar_construction,
    koszul_dual_cooperad,
    syzygy_weight,
)
from .smodule import (
    GradedSpace,
    SchurSpace,
    SModule,
    build_chain_complex,
    hom_differential,
    hom_space,
    op_compose,
    op_is_zero,
    psign,
    reorder_sign,
)

ONE = Fraction(1)


# ---------------------------------------------------------------------------
# weight truncation of a bar cooperad

def restrict_by_weight(C, wmax):
    """Sub-cooperad of a bar construction spanned by the trees with at
    most wmax internal vertices.  Closed under the differential (edge
    contraction lowers the count) and under the partial coproduct (the
    two factors split the count)."""
    assert isinstance(C, BarCooperad)
    M0 = C.M
    keep = {}
    for n in M0.arities():
        kept = [t for t in M0.space(n) if syzygy_weight(t) <= wmax]
        if kept:
            keep[n] = set(kept)
    comp = {
        n: GradedSpace([(t, M0.degree(n, t)) for t in sorted(ks, key=repr)])
        for n, ks in keep.items()
    }

    def act(n, s, t):
        out = M0.act(n, s, t)
        assert all(t2 in keep[n] for t2 in out)
        return out

    diff = {}
    for n, dn in M0.diff.items():
        op = {}
        for t, img in dn.items():
            if t not in keep.get(n, ()):
                continue
            assert all(t2 in keep[n] for t2 in img)
            op[t] = img
        if op:
            diff[n] = op
    cop = {}
    for n, cn in C.cop.items():
        if n not in keep:
            continue
        op = {}
        for t, img in cn.items():
            if t not in keep[n]:
                continue
            out = {}
            for lab, c in img.items():
                _, c1, slots = lab
                sp = next(s for s in slots if s[0] == 1)
                if c1 not in keep[len(slots)] or sp[1] not in keep[len(sp[2])]:
                    raise AssertionError("coproduct leaves the truncation")
                out[lab] = c
            op[t] = out
        cop[n] = op
    M = SModule(M0.N, comp, diff=diff, act_basis=act, name=f"{M0.name}|w{wmax}")
    out = BarCooperad(M, cop, counit=C.counit, name=f"{C.name}|w{wmax}")
    out.P = C.P
    out.base = C
    return out


# ---------------------------------------------------------------------------
# the coalgebra C(A) and its twisted differential

def coalgebra_space(C, A):
    """C(A) as a graded space of coinvariant classes."""
    return SchurSpace(C.M, A.space)


def _cop_terms(C, A, n, word, mc):
    """Iterate the partial-coproduct terms of mc against a letter word.

    Yields (coeff, c1, slots, sp, c2, B, rs, E): outer label c1 on the
    slots, special slot index sp carrying c2 on the leaf block B, rs the
    Koszul sign regrouping the letters into slot-concatenation order and
    E the total letter degree in the blocks before the special one."""
    degs = [A.deg(x) for x in word]
    for term, coeff in C.cop.get(n, {}).get(mc, {}).items():
        _, c1, slots = term
        sp = next(j for j, s in enumerate(slots) if s[0] == 1)
        _, c2, B = slots[sp]
        concat = [b - 1 for s in slots for b in s[2]]
        rs = reorder_sign(degs, concat)
        E = sum(degs[b - 1] for s in slots[:sp] for b in s[2])
        yield coeff, c1, slots, sp, c2, B, rs, E


def _delta_r_label(C, alpha, A, CA, n, word, mc):
    """Right twist on a basis class of C(A): split off an inner cooperad
    factor, push it into P with alpha and evaluate it on its letters."""
    out = {}
    for coeff, c1, slots, sp, c2, B, rs, E in _cop_terms(C, A, n, word, mc):
        qv = alpha.apply_label(len(B), c2)
        if not qv:
            continue
        merged = A.gamma(len(B), qv, tuple(word[b - 1] for b in B))
        if not merged:
            continue
        dc1 = C.degree(len(slots), c1)
        dc2 = C.degree(len(B), c2)
        # alpha passes the outer factor, then its degree -1 image passes
        # the letters of the earlier blocks
        sgn = rs
        if (dc1 + (dc2 + 1) * E) % 2:
            sgn = -sgn
        for a, ca in merged.items():
            neww = tuple(
                a if j == sp else word[s[2][0] - 1]
                for j, s in enumerate(slots)
            )
            vec_addmul(
                out,
                CA.project(len(slots), {c1: ONE}, neww),
                sgn * coeff * ca,
            )
    return out


def coalgebra_twisted_differential(C, alpha, A, CA=None):
    """The differential on C(A): internal differential of C plus the
    right twist.  Returned as a sparse operator on the basis of C(A)."""
    if CA is None:
        CA = coalgebra_space(C, A)
    op = {}
    for c in CA.labels:
        _, n, word, mc = c
        img = {}
        dmc = C.M.diff.get(n, {}).get(mc)
        if dmc:
            vec_addmul(img, CA.project(n, dmc, word), ONE)
        vec_addmul(img, _delta_r_label(C, alpha, A, CA, n, word, mc), ONE)
        img = {k: v for k, v in img.items() if v}
        if img:
            op[c] = img
    return op


# ---------------------------------------------------------------------------
# algebraic twisting morphisms

class AlgebraicTwistingMorphism:
    """A degree-0 map C(A) -> A solving the Maurer-Cartan equation with
    respect to an operadic twisting morphism alpha."""

    def __init__(self, alpha, A, CA, table, name=""):
        self.alpha = alpha
        self.C = alpha.C
        self.A = A
        self.CA = CA
        self.table = table
        self.name = name
        self.dtw = None  # twisted differential on C(A), filled on demand

    def apply_label(self, c):
        return self.table.get(c, {})

    def apply(self, vec):
        out = {}
        for c, coeff in vec.items():
            vec_addmul(out, self.table.get(c, {}), coeff)
        return out

    def twisted_differential(self):
        if self.dtw is None:
            self.dtw = coalgebra_twisted_differential(
                self.C, self.alpha, self.A, self.CA
            )
        return self.dtw


def _counit_label(C):
    return C.counit


def maurer_cartan_residual(phi):
    """Nonzero entries of d_A o phi - phi o d + star(phi); the star term
    of the canonical projection keeps only the full decomposition, which
    evaluates the whole cooperad factor on the letters through alpha."""
    C, A, CA = phi.C, phi.A, phi.CA
    dtw = phi.twisted_differential()
    bad = 0
    for c in CA.labels:
        _, n, word, mc = c
        res = {}
        vec_addmul(res, phi.apply(dtw.get(c, {})), -ONE)
        av = phi.alpha.apply_label(n, mc)
        if av:
            vec_addmul(res, A.gamma(n, av, word), ONE)
        bad += sum(1 for v in res.values() if v)
    return bad


def canonical_algebraic_twisting(alpha, A, CA=None):
    """The projection of C(A) onto its arity-1 part, checked against the
    Maurer-Cartan equation."""
    C = alpha.C
    if CA is None:
        CA = coalgebra_space(C, A)
    c0 = _counit_label(C)
    table = {}
    for c in CA.labels:
        _, n, word, mc = c
        if n == 1 and mc == c0:
            table[c] = {word[0]: ONE}
    phi = AlgebraicTwistingMorphism(
        alpha, A, CA, table, name=f"proj({alpha.name})"
    )
    bad = maurer_cartan_residual(phi)
    if bad:
        raise ValueError(
            f"Maurer-Cartan residual nonzero in {bad} entries for {phi.name}"
        )
    return phi


# ---------------------------------------------------------------------------
# acyclicity of the twisted composite P o_alpha C on a point

_flat_cache = {}


def flat_decomposition(C, n, c):
    """Terms of the full decomposition C -> C o C on a basis label:
    {(outer, pieces): coeff} with pieces = ((label, block), ...) in
    block order, counit pieces on single leaves.  Built by repeatedly
    extracting one non-counit piece with the partial coproduct; a term
    with j non-counit pieces is reached in j! extraction orders."""
    key = (id(C), n, c)
    if key in _flat_cache:
        return _flat_cache[key]
    counit = C.counit
    start = (c, tuple((counit, (b,)) for b in range(1, n + 1)))
    out = {start: ONE}
    level = {start: ONE}
    j = 0
    while level:
        j += 1
        nxt = {}
        for (x, pieces), cx in level.items():
            m = len(pieces)
            for (_, c1, slots), coeff in C.cop.get(m, {}).get(x, {}).items():
                sp = next(i for i, s in enumerate(slots) if s[0] == 1)
                _, f, B = slots[sp]
                if len(B) == 1 and f == counit:
                    continue
                # the extracted piece must sit over counit pieces only,
                # otherwise the term is not flat
                if any(pieces[b - 1][0] != counit for b in B):
                    continue
                df = C.degree(len(B), f)
                E = sum(
                    C.M.degree(len(pieces[b - 1][1]), pieces[b - 1][0])
                    for s in slots[:sp]
                    for b in s[2]
                )
                sgn = coeff if (df * E) % 2 == 0 else -coeff
                newp = []
                for i2, s in enumerate(slots):
                    if i2 == sp:
                        blk = tuple(
                            sorted(b2 for b in B for b2 in pieces[b - 1][1])
                        )
                        newp.append((f, blk))
                    else:
                        b = s[2][0]
                        newp.append(pieces[b - 1])
                st = (c1, tuple(newp))
                nxt[st] = nxt.get(st, 0) + cx * sgn
        nxt = {k2: v for k2, v in nxt.items() if v}
        fac = Fraction(1)
        for t in range(1, j + 1):
            fac *= t
        for st, v in nxt.items():
            out[st] = out.get(st, 0) + v / fac
        # continue extraction from the unscaled level (order counting)
        level = nxt
        if j > n:
            break
    out = {k2: v for k2, v in out.items() if v}
    _flat_cache[key] = out
    return out


def _truncate_smodule(M, N2):
    comp = {n: M.space(n) for n in M.arities() if n <= N2}
    diff = {n: M.diff[n] for n in M.diff if n <= N2}
    return SModule(
        N2, comp, diff=diff, act_basis=M.act, name=f"{M.name}|{N2}"
    )


def resolution_acyclicity(P, C, alpha, max_arity=None):
    """Homology of the twisted composite P o_alpha C evaluated on a
    one-dimensional trivial algebra (the S_n-coinvariants of the Koszul
    complex): returns {arity: {degree: h}} of the nonzero homology.  An
    acyclic resolution leaves exactly one class, in arity 1, degree 0."""
    from .smodule import compose

    if max_arity is None:
        max_arity = min(P.N, 3 if isinstance(C, BarCooperad) else 4)
    A1 = trivial_algebra(P, 1)
    PC = compose(
        _truncate_smodule(P.M, max_arity), _truncate_smodule(C.M, max_arity)
    )
    S = SchurSpace(PC, A1.space)

    def arity_of(lb):
        return lb[1]

    op = {}
    for lb in S.labels:
        _, n, word, pc = lb
        _, p, slots = pc
        k = len(slots)
        img = {}
        # internal differential of the composite
        dpc = PC.diff.get(n, {}).get(pc)
        if dpc:
            vec_addmul(img, S.project(n, dpc, word), ONE)
        # left twist: decompose the factor in slot i, push its outer
        # part into p through alpha, keep the pieces as new factors
        run = P.degree(k, p)
        for i, (_, ci, Bi) in enumerate(slots):
            ni = len(Bi)
            sub = sorted(Bi)
            pre = run + sum(
                C.degree(len(Bj), x) for _, x, Bj in slots[:i]
            )
            for (c1, fpieces), coeff in flat_decomposition(
                C, ni, ci
            ).items():
                mm = len(fpieces)
                if k + mm - 1 > PC.N:
                    continue
                pv = alpha.apply_label(mm, c1)
                if not pv:
                    continue
                # new inner factors in composition order, global blocks
                pieces = (
                    [(x, Bj) for (_, x, Bj) in slots[:i]]
                    + [
                        (x, tuple(sub[b - 1] for b in blk))
                        for x, blk in fpieces
                    ]
                    + [(x, Bj) for (_, x, Bj) in slots[i + 1 :]]
                )
                # build the label in a local consecutive numbering where
                # it is canonical, then relabel with the S_n action
                sigma = [0] * n
                local = []
                start = 1
                for x, Bj in pieces:
                    for t, b in enumerate(sorted(Bj)):
                        sigma[start - 1 + t] = b
                    local.append(
                        (0, x, tuple(range(start, start + len(Bj))))
                    )
                    start += len(Bj)
                for pout, cp in pv.items():
                    comp = P.comp(k, p, i + 1, mm, pout)
                    if not comp:
                        continue
                    # alpha passes p and the earlier factors, then its
                    # image crosses the earlier factors back to p
                    sgn = coeff * cp
                    if (pre + P.degree(mm, pout) * (pre - run)) % 2:
                        sgn = -sgn
                    for pp, cpp in comp.items():
                        vec = PC.act_vec(
                            n, tuple(sigma), {("c", pp, tuple(local)): ONE}
                        )
                        vec_addmul(
                            img, S.project(n, vec, word), -sgn * cpp
                        )
        img = {x: c for x, c in img.items() if c}
        if img:
            op[lb] = img

    assert op_is_zero(op_compose(op, op)), "twisted composite d^2 != 0"
    out = {}
    for n in range(1, max_arity + 1):
        sub = GradedSpace(
            [(lb, S.deg[lb]) for lb in S.labels if arity_of(lb) == n]
        )
        if not sub.dim:
            continue
        sop = {lb: op.get(lb, {}) for lb in sub.labels}
        cx, by_deg, _ = build_chain_complex(sub, sop)
        hs = {}
        for d in by_deg:
            h = cx.homology_dimension(d)
            if h:
                hs[d] = h
        if hs:
            out[n] = hs
    return out


_acyclicity_cache = {}


def check_resolution(P, C, alpha):
    key = (id(P), id(C), id(alpha))
    if key not in _acyclicity_cache:
        hom = resolution_acyclicity(P, C, alpha)
        ok = hom == {1: {0: 1}}
        _acyclicity_cache[key] = (ok, hom)
    ok, hom = _acyclicity_cache[key]
    if not ok:
        raise ValueError(f"twisted composite is not a resolution: {hom}")


# ---------------------------------------------------------------------------
# the rooted-tree model for the dual of Perm

def _rt_relabel(par, sigma):
    """Relabel a rooted tree (parent tuple): vertex i becomes sigma[i-1]."""
    n = len(par)
    new = [0] * n
    for i in range(1, n + 1):
        p = par[i - 1]
        new[sigma[i - 1] - 1] = sigma[p - 1] if p else 0
    return tuple(new)


def _rt_delete(par, v):
    """Delete vertex v, reattaching its children to its parent, and close
    the label gap (labels above v shift down by one)."""
    n = len(par)
    pv = par[v - 1]
    new = []
    for i in range(1, n + 1):
        if i == v:
            continue
        p = par[i - 1]
        if p == v:
            p = pv
        new.append(p if p < v else p - 1)
    return tuple(new)


_rt_cooperad_cache = {}


def rooted_tree_cooperad(N):
    """The linear dual of the pre-Lie operad on labelled rooted trees,
    sign-twisted and shifted so an n-vertex tree sits in degree n-1; the
    partial coproduct dualizes vertex insertion."""
    hit = _rt_cooperad_cache.get(N)
    if hit is not None:
        return hit
    PL = builtin_operad("prelie", N)
    comp = {
        n: GradedSpace([(t, n - 1) for t in PL.space(n).labels])
        for n in range(1, N + 1)
    }
    cop = {}
    for n in range(1, N + 1):
        table = {}
        for m in range(1, n + 1):
            k = n - m + 1
            for B in itertools.combinations(range(1, n + 1), m):
                blocks = sorted(
                    [B] + [(x,) for x in range(1, n + 1) if x not in B]
                )
                i = blocks.index(B) + 1
                sigma = (
                    tuple(blocks[j - 1][0] for j in range(1, i))
                    + B
                    + tuple(blocks[j - 1][0] for j in range(i + 1, k + 1))
                )
                eps = _rt_cop_sign(k, m, i, sigma)
                for T1 in PL.space(k):
                    slots = None
                    for T2 in PL.space(m):
                        v = PL.comp(k, T1, i, m, T2)
                        if not v:
                            continue
                        slots = tuple(
                            (1, T2, bl) if bl == B else (0, "1", bl)
                            for bl in blocks
                        )
                        key = ("c2", T1, slots)
                        for T0, c in v.items():
                            T = _rt_relabel(T0, sigma)
                            col = table.setdefault(T, {})
                            col[key] = col.get(key, 0) + eps * c
        cop[n] = {
            T: {x: c for x, c in col.items() if c}
            for T, col in table.items()
        }

    def act(n, s, t):
        sgn = ONE if psign(s) > 0 else -ONE
        return {_rt_relabel(t, s): sgn}

    M = SModule(N, comp, act_basis=act, name="RT")
    C = TruncatedCooperad(M, cop, (0,), name="RT")
    _rt_cooperad_cache[N] = C
    return C


def _rt_cop_sign(k, m, i, sigma):
    """Koszul sign of a partial-coproduct term: the block regrouping sign
    of the suspended factors plus the inner suspension passing the slots
    after the insertion point."""
    sg = ONE if psign(sigma) > 0 else -ONE
    return -sg if ((m - 1) * (k - i)) % 2 else sg


def rooted_tree_twisting(P):
    """kappa in the rooted-tree basis: a 2-vertex tree maps to the binary
    corolla with the underline over the leaf carrying its root label."""
    C = rooted_tree_cooperad(P.N)
    comps = {2: {(0, 1): {1: -ONE}, (2, 0): {2: ONE}}}
    return OperadicTwistingMorphism(C, P, comps, name="kappa-rt")


def _rt_children(T, v):
    return sum(1 for p in T if p == v)


def _rt_dalpha(A, CA, ca, wrap, coef, out):
    """Contract an edge of the tree: the letters at its two ends multiply
    through the corolla whose underline sits over the parent vertex; the
    child vertex w contributes the sign (-1)^(w-1)."""
    _, n, word, T = ca
    for w in range(1, n + 1):
        u = T[w - 1]
        if u == 0:
            continue
        if u < w:
            ul, lets = 1, (word[u - 1], word[w - 1])
        else:
            ul, lets = 2, (word[w - 1], word[u - 1])
        prod = A.gamma_basis(2, ul, lets)
        if not prod:
            continue
        sgn = -coef if w % 2 == 0 else coef
        T2 = _rt_delete(T, w)
        upos = u if u < w else u - 1
        for a, c in prod.items():
            w2 = tuple(word[i] for i in range(n) if i != w - 1)
            w2 = w2[: upos - 1] + (a,) + w2[upos:]
            for ca2, c2 in CA.project(n - 1, {T2: ONE}, w2).items():
                key = wrap(ca2)
                out[key] = out.get(key, 0) + sgn * c * c2


def _rt_removals(T):
    """Vertices that can move to the enveloping side: a root with a
    single child (underlined letter) or a leaf (underlined tree factor),
    each with the tree left after removal and the vertex sign."""
    n = len(T)
    if n < 2:
        return
    for v in range(1, n + 1):
        if T[v - 1] == 0 and _rt_children(T, v) == 1:
            yield "root", v, _rt_delete(T, v), (-ONE if v % 2 == 0 else ONE)
        if _rt_children(T, v) == 0:
            yield "leaf", v, _rt_delete(T, v), (ONE if v % 2 == 0 else -ONE)


def perm_specialized_differential(A, element):
    """The differential of the rooted-tree cotangent complex
    RT(A) (+) A(x)RT(A) (+) RT(A)(x)A, written combinatorially: edge
    contractions inside the tree factor and the boundary-vertex moves to
    the enveloping side (root with a single child, or leaf), the latter
    merging with the enveloping letter when one is present.  Elements
    are vectors over ('t', ca), ('l', a, ca), ('r', ca, a) with ca a
    basis class of RT(A)."""
    P = A.P
    C = rooted_tree_cooperad(P.N)
    CA = coalgebra_space(C, A)
    out = {}

    def emit(key, c):
        out[key] = out.get(key, 0) + c

    def cls(T, w):
        return CA.project(len(w), {T: ONE}, w).items()

    for lb, coef in element.items():
        kind = lb[0]
        if kind == "t":
            ca = lb[1]
            _, n, word, T = ca
            _rt_dalpha(A, CA, ca, lambda ca2: ("t", ca2), coef, out)
            for shape, v, T2, sgn in _rt_removals(T):
                w2 = tuple(word[i] for i in range(n) if i != v - 1)
                a = word[v - 1]
                for ca2, c2 in cls(T2, w2):
                    if shape == "root":
                        emit(("l", a, ca2), sgn * coef * c2)
                    else:
                        emit(("r", ca2, a), sgn * coef * c2)
        elif kind == "l":
            _, a0, ca = lb
            _, n, word, T = ca
            _rt_dalpha(A, CA, ca, lambda ca2: ("l", a0, ca2), coef, out)
            for shape, v, T2, sgn in _rt_removals(T):
                w2 = tuple(word[i] for i in range(n) if i != v - 1)
                prod = A.gamma_basis(2, 1, (a0, word[v - 1]))
                for a, c in prod.items():
                    for ca2, c2 in cls(T2, w2):
                        emit(("l", a, ca2), sgn * coef * c * c2)
        else:
            _, ca, a1 = lb
            _, n, word, T = ca
            _rt_dalpha(A, CA, ca, lambda ca2: ("r", ca2, a1), coef, out)
            for shape, v, T2, sgn in _rt_removals(T):
                w2 = tuple(word[i] for i in range(n) if i != v - 1)
                prod = A.gamma_basis(2, 1, (word[v - 1], a1))
                for a, c in prod.items():
                    for ca2, c2 in cls(T2, w2):
                        if shape == "root":
                            emit(("l", a, ca2), sgn * coef * c * c2)
                        else:
                            emit(("r", ca2, a), sgn * coef * c * c2)
    return {k: c for k, c in out.items() if c}


# ---------------------------------------------------------------------------
# the planar-level model for homotopy associative algebras

_mu_c_cache = {}


def planar_cogenerators(C):
    """The planar basis mu^c_n of the dual of the associative operad:
    mu^c_2 projects to the identity-planar product and mu^c_n is the
    unique element whose reduced partial coproduct equals
    sum_{lam,k} (-1)^(lam(k+1)) mu^c_{n+1-k} (x)
    (id^lam (x) mu^c_k (x) id^(n-lam-k))."""
    key = id(C)
    if key in _mu_c_cache:
        return _mu_c_cache[key]
    P = C.P
    kappa = canonical_twisting("kappa", (C, P))
    out = {1: {C.counit: ONE}}
    labs2 = sorted(C.space(2).labels, key=repr)
    plabs = sorted(P.space(2).labels, key=repr)
    pidx = {p: i for i, p in enumerate(plabs)}
    sb2 = SolveBasis(
        [
            {pidx[q]: c for q, c in kappa.apply_label(2, lb).items()}
            for lb in labs2
        ]
    )
    ident = tuple(range(1, 3))
    coeffs = sb2.express({pidx[ident]: ONE})
    assert coeffs is not None, "no planar binary cogenerator"
    out[2] = {labs2[j]: c for j, c in coeffs.items() if c}
    for n in range(3, C.M.N + 1):
        labs = sorted(C.space(n).labels, key=repr)
        imgs = []
        for lb in labs:
            v = {}
            for term, coeff in C.cop.get(n, {}).get(lb, {}).items():
                _, c1, slots = term
                sp = next(s for s in slots if s[0] == 1)
                if len(slots) < 2 or len(sp[2]) < 2:
                    continue
                v[term] = v.get(term, 0) + coeff
            imgs.append({t: c for t, c in v.items() if c})
        target = {}
        for kk in range(2, n):
            m = n + 1 - kk
            for lam in range(0, m):
                sgn = -ONE if (lam * (kk + 1)) % 2 else ONE
                for c1, a in out[m].items():
                    for c2, b in out[kk].items():
                        slots = (
                            tuple((0, "1", (x,)) for x in range(1, lam + 1))
                            + ((1, c2, tuple(range(lam + 1, lam + kk + 1))),)
                            + tuple(
                                (0, "1", (x,))
                                for x in range(lam + kk + 1, n + 1)
                            )
                        )
                        t = ("c2", c1, slots)
                        target[t] = target.get(t, 0) + sgn * a * b
        target = {t: c for t, c in target.items() if c}
        order = sorted({t for v in imgs for t in v} | set(target), key=repr)
        tidx = {t: i for i, t in enumerate(order)}
        sb = SolveBasis([{tidx[t]: c for t, c in v.items()} for v in imgs])
        coeffs = sb.express({tidx[t]: c for t, c in target.items()})
        assert coeffs is not None, f"no planar cogenerator in arity {n}"
        out[n] = {labs[j]: c for j, c in coeffs.items() if c}
    _mu_c_cache[key] = out
    return out


def _ainf_generators(Om):
    """The planar structure operations mu_n as generator vectors of the
    cobar operad."""
    mu = planar_cogenerators(Om.C)
    return {
        n: {
            ("v", ("s", -1, c), tuple(range(1, n + 1))): a
            for c, a in mu[n].items()
        }
        for n in range(2, Om.N + 1)
        if n in mu
    }


def ainf_specialized_differential(A, element, arity_bound):
    """The differential of the cotangent complex of a homotopy
    associative algebra on its planar-level basis.  A label
    ("m", levels, bword) is a tower of corollas along the module strand:
    levels, read from the root, are pairs (left letters, right letters),
    and bword fills the bracket at the top of the strand.  The three
    parts act on the bracket (structure maps on consecutive letters),
    on the levels (structure maps on one side, or splitting a level in
    two), and by extracting a bracket block into a new innermost level."""
    Om = A.P
    gens = _ainf_generators(Om)

    def mu(k, word):
        if k > Om.N:
            raise ValueError("arity bound exceeded")
        return A.gamma(k, gens[k], word)

    def deg(x):
        return A.deg(x)

    out = {}

    def emit(lb, c):
        out[lb] = out.get(lb, 0) + c

    for lb, coef in element.items():
        _, levels, bword = lb
        l = len(bword)
        k = len(levels)
        tot = l + sum(len(a) + len(c) for a, c in levels)
        if tot > arity_bound:
            raise ValueError("arity bound exceeded")
        ia = sum(len(a) for a, _ in levels)
        ja = sum(len(c) for _, c in levels)
        atot = sum(deg(x) for a, _ in levels for x in a)
        btot = sum(deg(b) for b in bword)
        # structure maps inside the bracket
        for kk in range(2, l + 1):
            for lam in range(0, l - kk + 1):
                db = sum(deg(b) for b in bword[:lam])
                e = l + lam + kk + db + k + ia + ja + atot + lam * kk
                s = -coef if e % 2 else coef
                for a2, ca in mu(kk, bword[lam : lam + kk]).items():
                    emit(
                        ("m", levels, bword[:lam] + (a2,) + bword[lam + kk :]),
                        s * ca,
                    )
        # the free-operad differential on the levels
        for t, (at, ct) in enumerate(levels):
            it, jt = len(at), len(ct)
            for kk in range(2, it + 1):
                for lam in range(0, it - kk + 1):
                    e = it + jt + lam + kk
                    s = -coef if e % 2 else coef
                    for a2, ca in mu(kk, at[lam : lam + kk]).items():
                        lev2 = (
                            levels[:t]
                            + ((at[:lam] + (a2,) + at[lam + kk :], ct),)
                            + levels[t + 1 :]
                        )
                        emit(("m", lev2, bword), s * ca)
            for lam in range(0, it + 1):
                for mc in range(0, jt + 1):
                    kk = (it - lam) + 1 + mc
                    if kk < 2 or it + jt + 2 - kk < 2:
                        continue
                    e = 1 + jt + mc + it * lam + lam * mc
                    s = -coef if e % 2 else coef
                    lev2 = (
                        levels[:t]
                        + ((at[:lam], ct[mc:]), (at[lam:], ct[:mc]))
                        + levels[t + 1 :]
                    )
                    emit(("m", lev2, bword), s)
            for kk in range(2, jt + 1):
                for lam in range(0, jt - kk + 1):
                    e = 1 + jt + lam + btot
                    s = -coef if e % 2 else coef
                    for a2, ca in mu(kk, ct[lam : lam + kk]).items():
                        lev2 = (
                            levels[:t]
                            + ((at, ct[:lam] + (a2,) + ct[lam + kk :]),)
                            + levels[t + 1 :]
                        )
                        emit(("m", lev2, bword), s * ca)
        # extract a bracket block into a new innermost level
        for kk in range(1, l):
            for lam in range(0, l - kk + 1):
                db = sum(deg(b) for b in bword[:lam])
                e = (
                    1 + lam + db + k + ia + ja
                    + l * atot + lam * kk + kk * db + kk * atot
                )
                s = -coef if e % 2 else coef
                lev2 = levels + ((bword[:lam], bword[lam + kk :]),)
                emit(("m", lev2, bword[lam : lam + kk]), s)
    return {k: c for k, c in out.items() if c}


def planar_to_general(cx, lb):
    """The image of a planar-level basis label in the general cotangent
    complex A (x)^Om Ass-dual(A)."""
    Om, fm, CA = cx.P, cx.fm, cx.CA
    gens = _ainf_generators(Om)
    mu_c = planar_cogenerators(Om.C)
    _, levels, bword = lb
    l = len(bword)
    nu_vec = CA.project(l, dict(mu_c[l]), bword)
    cur = None
    ar, strand = 1, 1
    letters = ()
    tail = ()
    for at, ct in levels:
        n_t = len(at) + len(ct) + 1
        gv = gens[n_t]
        if cur is None:
            cur = dict(gv)
            ar, strand = n_t, len(at) + 1
        else:
            new = {}
            for p, cp in cur.items():
                for q, cq in gv.items():
                    for r, cr in Om.comp(ar, p, strand, n_t, q).items():
                        new[r] = new.get(r, 0) + cp * cq * cr
            cur = new
            ar, strand = ar + n_t - 1, strand + len(at)
        letters = letters + at
        tail = ct + tail
    letters = letters + tail
    out = {}
    if cur is None:
        unit = fm._morder[1][0]
        cur, ar, strand = {unit: ONE}, 1, 1
    for nu, cn in nu_vec.items():
        vec_addmul(out, fm.element(ar, cur, letters, nu, j=strand), cn)
    return {k: c for k, c in out.items() if c}


# ---------------------------------------------------------------------------
# the cotangent complex

class CotangentComplex:
    """A (x)^P C(A) with the twisted differential; the three pieces are
    stored separately and the comparison map to the Kaehler module is
    verified to be a chain map, surjective in each degree it reaches."""

    def __init__(self, P, C, alpha, phi, A, degree_bound=None, check=True):
        self.P = P
        self.C = C
        self.alpha = alpha
        self.phi = phi
        self.A = A
        self.degree_bound = degree_bound
        CA = phi.CA
        self.CA = CA
        if check:
            check_resolution(P, C, alpha)
        self.fm = FreeModule(A, CA, name=f"{A.name}(x)C({A.name})")
        # keep the total-arity filtration piece: classes u (x) nu whose
        # combined leaf count stays within the truncation.  The partial
        # coproduct preserves the total, so this is closed under d_phi.
        fsp = self.fm.space
        keep = [
            lb for lb in fsp.labels
            if lb[0][1] + lb[1][1] - 1 <= P.N
        ]
        self.space = GradedSpace([(lb, fsp.deg[lb]) for lb in keep])

        dtw = phi.twisted_differential()
        d_int = {}
        for c in CA.labels:
            _, n, word, mc = c
            dmc = C.M.diff.get(n, {}).get(mc)
            if dmc:
                img = CA.project(n, dmc, word)
                if img:
                    d_int[c] = img
        self.d_base = self._lift(d_int)
        self.delta_r = self._lift(_sub_op(dtw, d_int))
        self.delta_l = self._delta_l()
        self.d_env = self._d_env()
        dphi = {}
        for lb in self.space.labels:
            img = {}
            vec_addmul(img, self.d_env.get(lb, {}), ONE)
            vec_addmul(img, self.d_base.get(lb, {}), ONE)
            vec_addmul(img, self.delta_l.get(lb, {}), -ONE)
            vec_addmul(img, self.delta_r.get(lb, {}), ONE)
            img = {x: c for x, c in img.items() if c}
            if img:
                dphi[lb] = img
        self.d_phi = dphi
        assert op_is_zero(op_compose(dphi, dphi)), "d_phi^2 != 0"
        self.complex, self.by_deg, self.index = build_chain_complex(
            self.space, dphi
        )
        self.kaehler = KaehlerModule(A)
        self.comparison = self._comparison()

    def _lift(self, letter_op):
        """Extend an operator on C(A) to A (x)^P C(A): it crosses the
        enveloping factor with the Koszul sign of its degree."""
        out = {}
        for (u, nu) in self.space.labels:
            img = letter_op.get(nu)
            if not img:
                continue
            sgn = -ONE if self.fm._udeg(u) % 2 else ONE
            out[(u, nu)] = {(u, nu2): sgn * c for nu2, c in img.items()}
        return out

    def _d_env(self):
        """Internal differential of the operad on the enveloping factor;
        nonzero only for dg operads (cobar constructions).  The operad
        label sits leftmost, so no Koszul crossing sign appears."""
        P, fm = self.P, self.fm
        out = {}
        for (u, nu) in self.space.labels:
            _, k, p, aword = u
            dp = P.M.diff.get(k, {}).get(p)
            if not dp:
                continue
            img = fm.element(k, dp, aword, nu, j=k)
            img = {x: c for x, c in img.items() if c}
            if img:
                out[(u, nu)] = img
        return out

    def _delta_l(self):
        P, C, A, CA, fm = self.P, self.C, self.A, self.CA, self.fm
        alpha = self.alpha
        out = {}
        for (u, nu) in self.space.labels:
            _, k, p, aword = u
            _, n, word, mc = nu
            adeg = sum(A.deg(a) for a in aword)
            usgn = -ONE if fm._udeg(u) % 2 else ONE
            img = {}
            for coeff, c1, slots, sp, c2, B, rs, E in _cop_terms(
                C, A, n, word, mc
            ):
                mm = len(slots)
                pv = alpha.apply_label(mm, c1)
                if not pv:
                    continue
                dc2 = C.degree(len(B), c2)
                package = CA.project(
                    len(B), {c2: ONE}, tuple(word[b - 1] for b in B)
                )
                if not package:
                    continue
                sgn = rs
                if (dc2 * E) % 2:
                    sgn = -sgn
                single = tuple(
                    word[s[2][0] - 1]
                    for j, s in enumerate(slots)
                    if j != sp
                )
                for pout, cp in pv.items():
                    s2 = sgn * cp * coeff
                    if P.degree(mm, pout) % 2 and adeg % 2:
                        s2 = -s2
                    # the coproduct preserves total leaf count, so the
                    # composite arity never exceeds the truncation here
                    assert k + mm - 1 <= P.N
                    comp = P.comp(k, p, k, mm, pout)
                    if not comp:
                        continue
                    for nu2, cnu in package.items():
                        vec = fm.element(
                            k + mm - 1, comp, aword + single, nu2,
                            j=k + sp,
                        )
                        vec_addmul(img, vec, s2 * cnu * usgn)
            img = {x: c for x, c in img.items() if c}
            if img:
                assert all(
                    x[0][1] + x[1][1] - 1 <= P.N for x in img
                ), "delta_l left the filtration piece"
                out[(u, nu)] = img
        return out

    def _comparison(self):
        Om = self.kaehler
        c0 = _counit_label(self.C)
        comp = {}
        for lb in self.space.labels:
            u, nu = lb
            _, n, word, mc = nu
            if n == 1 and mc == c0:
                img = Om.project({(u, word[0]): ONE})
                if img:
                    comp[lb] = img
        # the Kaehler module carries the differential induced by the
        # operad differential on its enveloping factor (zero for strict
        # operads); the comparison must commute with it
        dom = {}
        for (u, b) in Om.space.labels:
            _, k, p, aword = u
            dp = self.P.M.diff.get(k, {}).get(p)
            if dp:
                img = Om.project(
                    dict(Om.fm.element(k, dp, aword, b, j=k))
                )
                img = {x: c for x, c in img.items() if c}
                if img:
                    dom[(u, b)] = img
        for lb in self.space.labels:
            acc = {}
            for lb2, c in self.d_phi.get(lb, {}).items():
                vec_addmul(acc, comp.get(lb2, {}), c)
            for lb2, c in comp.get(lb, {}).items():
                vec_addmul(acc, dom.get(lb2, {}), -c)
            assert not any(acc.values()), (
                "comparison to the Kaehler module is not a chain map", lb
            )
        # surjectivity: the classes u (x) a generate the Kaehler quotient
        oidx = {x: i for i, x in enumerate(Om.space.labels)}
        cols = [
            {oidx[x]: c for x, c in img.items()} for img in comp.values()
        ]
        assert rank_of_columns(cols) == Om.dim, "comparison not surjective"
        return comp

    def homology(self, degree_bound=None):
        bound = degree_bound if degree_bound is not None else self.degree_bound
        degs = sorted(self.by_deg)
        out = []
        for d in degs:
            if bound is not None and d > bound:
                continue
            out.append((d, self.complex.homology_dimension(d)))
        return out


def cotangent_complex(P, C, alpha, phi, A, degree_bound=None):
    return CotangentComplex(P, C, alpha, phi, A, degree_bound=degree_bound)


def _sub_op(a, b):
    out = {}
    for lb in set(a) | set(b):
        img = {}
        vec_addmul(img, a.get(lb, {}), ONE)
        vec_addmul(img, b.get(lb, {}), -ONE)
        img = {x: c for x, c in img.items() if c}
        if img:
            out[lb] = img
    return out


# ---------------------------------------------------------------------------
# resolutions and Andre-Quillen cohomology

_dual_cache = {}


def resolution_data(P, resolution, degree_bound=None):
    """(C, alpha) for the chosen resolution of algebras over P."""
    if resolution == "koszul":
        key = ("koszul", id(P))
        if key not in _dual_cache:
            C = koszul_dual_cooperad(P, P.N)
            _dual_cache[key] = (C, canonical_twisting("kappa", (C, P)))
        return _dual_cache[key]
    if resolution == "bar":
        key = ("bar", id(P), degree_bound)
        if key not in _dual_cache:
            full = bar_construction(P, P.N)
            alpha = canonical_twisting("pi", (full, P))
            C = full
            if degree_bound is not None:
                C = restrict_by_weight(full, degree_bound + 2)
                from .operads import OperadicTwistingMorphism

                alpha = OperadicTwistingMorphism(
                    C, P, alpha.comps, name=alpha.name
                )
            _dual_cache[key] = (C, alpha)
        return _dual_cache[key]
    if resolution == "cobar":
        assert hasattr(P, "C"), "cobar resolution needs a cobar operad"
        key = ("cobar", id(P))
        if key not in _dual_cache:
            C = P.C
            _dual_cache[key] = (C, canonical_twisting("iota", (C, P)))
        return _dual_cache[key]
    raise ValueError(resolution)


_homotopy_cache = {}


def homotopy_operad(P):
    """Omega(P-dual): the quasi-free resolution of P, with .C holding
    the dual cooperad so the cobar resolution path can recover it."""
    key = id(P)
    if key not in _homotopy_cache:
        C, _ = resolution_data(P, "koszul")
        _homotopy_cache[key] = cobar_construction(C, P.N)
    return _homotopy_cache[key]


def as_homotopy_algebra(A):
    """A strict algebra viewed over Omega(P-dual): binary generators act
    through the canonical projection onto P, higher generators by zero."""
    P = A.P
    C, kappa = resolution_data(P, "koszul")
    Om = homotopy_operad(P)
    maps = {}
    for g in Om.gens.get(2, []):
        c = g[1][2]
        table = {}
        for word in itertools.product(
            sorted(A.space.labels, key=repr), repeat=2
        ):
            img = A.gamma(2, kappa.apply_label(2, c), word)
            if img:
                table[word] = img
        if table:
            maps[(2, g)] = table
    return FinAlgebra(Om, A.space, maps, name=f"{A.name}~", validate=True)


def as_homotopy_module(M, Ah):
    """An A-module viewed over Omega(P-dual), along the same projection."""
    A = M.A
    _, kappa = resolution_data(A.P, "koszul")
    Om = Ah.P
    acts = {}
    alab = sorted(A.space.labels, key=repr)
    for g in Om.gens.get(2, []):
        c = g[1][2]
        table = {}
        for j in (1, 2):
            for b in alab:
                for m in M.space.labels:
                    word = (m, b) if j == 1 else (b, m)
                    img = M.act(2, kappa.apply_label(2, c), word, j)
                    if img:
                        table[(word, j)] = img
        if table:
            acts[(2, g)] = table
    return FinModule(Ah, M.space, acts, name=f"{M.name}~", validate=True)


def _alpha_bracket_op(cx, M):
    """The operator alpha[phi, -] on Hom(C(A), M) for the canonical phi:
    split the source class, push the outer factor into P through alpha,
    feed the letters of the unit slots straight to the module action and
    the kept factor to the argument map."""
    C, A, CA, P, alpha = cx.C, cx.A, cx.CA, cx.P, cx.alpha
    mlab = sorted(M.space.labels, key=repr)
    out = {}
    for cpr in CA.labels:
        _, n, word, mc = cpr
        for coeff, c1, slots, sp, c2, B, rs, E in _cop_terms(
            C, A, n, word, mc
        ):
            mm = len(slots)
            if mm > P.N:
                continue
            pv = alpha.apply_label(mm, c1)
            if not pv:
                continue
            dc1 = C.degree(mm, c1)
            dc2 = C.degree(len(B), c2)
            package = CA.project(
                len(B), {c2: ONE}, tuple(word[b - 1] for b in B)
            )
            if not package:
                continue
            base = rs
            if (dc2 * E) % 2:
                base = -base
            single = [
                word[s[2][0] - 1] for j, s in enumerate(slots) if j != sp
            ]
            for ctgt, cc in package.items():
                for m in mlab:
                    gdeg = M.space.deg[m] - CA.deg[ctgt]
                    sgn = base * cc * coeff
                    if (gdeg * (dc1 + E)) % 2:
                        sgn = -sgn
                    mw = tuple(single[: sp] + [m] + single[sp:])
                    act = M.act(mm, pv, mw, sp + 1)
                    for m2, c2c in act.items():
                        col = out.setdefault((ctgt, m), {})
                        key = (cpr, m2)
                        col[key] = col.get(key, 0) + sgn * c2c
    for g in list(out):
        out[g] = {k: c for k, c in out[g].items() if c}
        if not out[g]:
            del out[g]
    return out


def _hom_side_complex(cx, M):
    CA = cx.CA
    dtw = cx.phi.twisted_differential()
    sp = hom_space(CA, M.space)
    op = hom_differential(CA, dtw, M.space, {})
    extra = _alpha_bracket_op(cx, M)
    for g, img in extra.items():
        acc = dict(op.get(g, {}))
        vec_addmul(acc, img, ONE)
        acc = {k: c for k, c in acc.items() if c}
        if acc:
            op[g] = acc
        else:
            op.pop(g, None)
    return build_chain_complex(sp, op)


def _restricted_module_homs(cx, M):
    """Linear maps from the filtration piece of A (x)^P C(A) to M
    commuting with every generator action that stays inside the
    filtration; actions crossing the truncation boundary give no
    constraint.  Returns (GradedSpace, basis vectors over (m1, m2))."""
    A, fm = cx.A, cx.fm
    P = A.P
    alab = sorted(A.space.labels, key=repr)
    l1 = sorted(cx.space.labels, key=repr)
    l2 = sorted(M.space.labels, key=repr)
    hom = [(x, z) for x in l1 for z in l2]
    constraints = {}

    def add(key, hm, c):
        col = constraints.setdefault(hm, {})
        col[key] = col.get(key, 0) + c
        if not col[key]:
            del col[key]

    for l in sorted(P.gens):
        for g in P.gens[l]:
            for j in range(1, l + 1):
                for aw in itertools.product(alab, repeat=l - 1):
                    bword = aw[: j - 1] + ("*",) + aw[j - 1 :]
                    for x in l1:
                        if x[0][1] + x[1][1] + l - 2 > P.N:
                            continue
                        key = (l, g, aw, j, x)
                        # phi(g . x) - g . phi(x) = 0, rows indexed by
                        # the output basis label of M
                        for y, c in fm.act(l, g, bword, j, {x: ONE}).items():
                            for z in l2:
                                add(key + (z,), (y, z), c)
                        for z in l2:
                            w2 = aw[: j - 1] + (z,) + aw[j - 1 :]
                            for z2, c in M.act_basis(l, g, w2, j).items():
                                add(key + (z2,), (x, z), -c)
    allkeys = sorted(
        {k for col in constraints.values() for k in col}, key=repr
    )
    kidx = {k: i for i, k in enumerate(allkeys)}
    cols = [
        {kidx[k]: c for k, c in constraints.get(hm, {}).items()}
        for hm in hom
    ]
    ker = kernel_of_columns(cols, len(hom))
    space = []
    basis = []
    for j, kv in enumerate(ker):
        vec = {hom[i]: c for i, c in kv.items()}
        some = next(iter(vec))
        d = M.space.deg[some[1]] - cx.space.deg[some[0]]
        space.append((("hom", j), d))
        basis.append(vec)
    return GradedSpace(space), basis


def _module_side_complex(cx, M):
    hsp, basis = _restricted_module_homs(cx, M)
    # del(f) = -(-1)^{|f|} f o d_phi, expressed in the module-map basis
    allpairs = [
        (m1, m2)
        for m1 in sorted(cx.space.labels, key=repr)
        for m2 in sorted(M.space.labels, key=repr)
    ]
    pidx = {x: i for i, x in enumerate(allpairs)}
    sb = SolveBasis([{pidx[k]: c for k, c in vec.items()} for vec in basis])
    labels = list(hsp.labels)
    op = {}
    for j, lb in enumerate(labels):
        fvec = basis[j]
        fmap = {}
        for (m1, m2), c in fvec.items():
            fmap.setdefault(m1, {})[m2] = c
        img = {}
        for m1 in cx.space.labels:
            for m1p, c in cx.d_phi.get(m1, {}).items():
                for m2, cf in fmap.get(m1p, {}).items():
                    key = (m1, m2)
                    img[key] = img.get(key, 0) + c * cf
        sgn = ONE if hsp.deg[lb] % 2 else -ONE
        img = {k: sgn * c for k, c in img.items() if c}
        coeffs = sb.express({pidx[k]: c for k, c in img.items()})
        assert coeffs is not None, "d_phi does not preserve module maps"
        vec = {labels[i]: c for i, c in coeffs.items() if c}
        if vec:
            op[lb] = vec
    return build_chain_complex(hsp, op)


def _cohomology_dims(cx_data, degree_bound):
    cx, by_deg, _ = cx_data
    out = {}
    for d in by_deg:
        k = -d
        if 0 <= k <= degree_bound:
            out[k] = cx.homology_dimension(d)
    for k in range(degree_bound + 1):
        out.setdefault(k, 0)
    return out


def aq_cohomology(A, M, resolution="koszul", degree_bound=3, cx=None):
    """Cohomology dimensions [(degree, dim)], computed on Hom(C(A), M)
    and on module maps from the cotangent complex; the two computations
    must agree in every degree."""
    if cx is None:
        P = A.P
        C, alpha = resolution_data(P, resolution, degree_bound=degree_bound)
        phi = canonical_algebraic_twisting(alpha, A)
        cx = CotangentComplex(P, C, alpha, phi, A, degree_bound=degree_bound)
    hs = _cohomology_dims(_hom_side_complex(cx, M), degree_bound)
    ms = _cohomology_dims(_module_side_complex(cx, M), degree_bound)
    if hs != ms:
        raise ArithmeticError(
            f"hom-side and module-side cohomology disagree: {hs} vs {ms}"
        )
    return sorted(hs.items())


# ---------------------------------------------------------------------------
# comparison with the Kaehler module

def kaehler_comparison(A, degree_bound=3, resolution="koszul"):
    """Mapping-cone homology of the comparison map onto the Kaehler
    module.  Returns [(degree, cone homology dim, acyclic?)]."""
    P = A.P
    C, alpha = resolution_data(P, resolution, degree_bound=degree_bound)
    phi = canonical_algebraic_twisting(alpha, A)
    cx = CotangentComplex(P, C, alpha, phi, A, degree_bound=degree_bound)
    Om = cx.kaehler
    sp = GradedSpace(
        [(("x", lb), cx.space.deg[lb] + 1) for lb in cx.space.labels]
        + [(("y", lb), Om.space.deg[lb]) for lb in Om.space.labels]
    )
    op = {}
    for lb in cx.space.labels:
        img = {}
        for lb2, c in cx.d_phi.get(lb, {}).items():
            img[("x", lb2)] = -c
        for lb2, c in cx.comparison.get(lb, {}).items():
            img[("y", lb2)] = img.get(("y", lb2), 0) + c
        img = {k: c for k, c in img.items() if c}
        if img:
            op[("x", lb)] = img
    cone, by_deg, _ = build_chain_complex(sp, op)
    out = []
    for d in range(degree_bound + 1):
        h = cone.homology_dimension(d) if d in by_deg or d - 1 in by_deg else 0
        out.append((d, h, h == 0))
    return out


# ---------------------------------------------------------------------------
# classical oracles, built from first principles

def _cohomology_from_matrices(sizes, mats, degree_bound):
    dims = []
    for n in range(0, degree_bound + 1):
        rk_out = rank_of_columns(mats[n])
        rk_in = rank_of_columns(mats[n - 1]) if n - 1 in mats else 0
        dims.append((n, sizes[n] - rk_out - rk_in))
    return dims


def hochschild_oracle(A, M, degree_bound):
    """Hochschild cohomology dims of an associative algebra with
    coefficients in a bimodule: C^n = Hom(A^n, M), the standard cochain
    differential written out directly."""
    alab = sorted(A.space.labels, key=repr)
    mlab = sorted(M.space.labels, key=repr)

    def mul(a, b):
        # the planar product is the identity-permutation binary operation
        return A.gamma_basis(2, (1, 2), (a, b))

    def lact(a, m):
        return M.act_basis(2, (1, 2), (a, m), 2)

    def ract(m, a):
        return M.act_basis(2, (1, 2), (m, a), 1)

    def cochain_basis(n):
        return [
            (w, m)
            for w in itertools.product(alab, repeat=n)
            for m in mlab
        ]

    def dmatrix(n):
        """d : C^n -> C^{n+1} as columns over the target basis, built by
        evaluating df on every target word:
        (df)(a_1..a_{n+1}) = a_1 f(a_2..) + sum (-1)^i f(..a_i a_{i+1}..)
                             + (-1)^{n+1} f(..a_n) a_{n+1}."""
        src = cochain_basis(n)
        tgt = cochain_basis(n + 1)
        tidx = {x: i for i, x in enumerate(tgt)}
        sidx = {x: i for i, x in enumerate(src)}
        cols = [dict() for _ in src]

        def add(si, word, mvec, sign):
            for m2, c in mvec.items():
                i = tidx[(word, m2)]
                cols[si][i] = cols[si].get(i, 0) + sign * c
                if not cols[si][i]:
                    del cols[si][i]

        for word in itertools.product(alab, repeat=n + 1):
            for m in mlab:
                add(sidx[(word[1:], m)], word, lact(word[0], m), ONE)
            for i in range(1, n + 1):
                sign = -ONE if i % 2 else ONE
                for a2, ca in mul(word[i - 1], word[i]).items():
                    w2 = word[: i - 1] + (a2,) + word[i + 1 :]
                    for m in mlab:
                        add(sidx[(w2, m)], word, {m: ca}, sign)
            sign = -ONE if (n + 1) % 2 else ONE
            for m in mlab:
                add(sidx[(word[: n], m)], word, ract(m, word[n]), sign)
        return cols, len(tgt)

    mats = {}
    sizes = {0: len(mlab)}
    for n in range(0, degree_bound + 1):
        cols, tdim = dmatrix(n)
        mats[n] = cols
        sizes[n + 1] = tdim
    return _cohomology_from_matrices(sizes, mats, degree_bound)


def chevalley_eilenberg_oracle(A, M, degree_bound):
    """Chevalley-Eilenberg cohomology dims of a Lie algebra with
    coefficients in a module: C^n = Hom(Lambda^n A, M)."""
    alab = sorted(A.space.labels, key=repr)
    mlab = sorted(M.space.labels, key=repr)
    g = next(iter(A.P.gens[2]))

    def bracket(a, b):
        return A.gamma_basis(2, g, (a, b))

    def act(a, m):
        return M.act_basis(2, g, (a, m), 2)

    def basis(n):
        return [
            (w, m)
            for w in itertools.combinations(alab, n)
            for m in mlab
        ]

    def dmatrix(n):
        src = basis(n)
        tgt = basis(n + 1)
        tidx = {x: i for i, x in enumerate(tgt)}
        sidx = {x: i for i, x in enumerate(src)}
        cols = [dict() for _ in src]

        def add(si, word, mvec, sign):
            for m2, c in mvec.items():
                i = tidx[(word, m2)]
                cols[si][i] = cols[si].get(i, 0) + sign * c
                if not cols[si][i]:
                    del cols[si][i]

        for word in itertools.combinations(alab, n + 1):
            for i in range(n + 1):
                sign = -ONE if i % 2 else ONE
                rest = word[: i] + word[i + 1 :]
                for m in mlab:
                    si = sidx[(rest, m)]
                    add(si, word, act(word[i], m), sign)
            for i in range(n + 1):
                for jj in range(i + 1, n + 1):
                    sign = -ONE if (i + jj) % 2 else ONE
                    rest = tuple(
                        x
                        for t, x in enumerate(word)
                        if t != i and t != jj
                    )
                    for a2, ca in bracket(word[i], word[jj]).items():
                        if a2 in rest:
                            continue
                        merged = tuple(sorted(rest + (a2,), key=repr))
                        # sign of moving the bracket into sorted position
                        pos = merged.index(a2)
                        s2 = -ONE if pos % 2 else ONE
                        for m in mlab:
                            add(sidx[(merged, m)], word, {m: ca * s2}, sign)
        return cols, len(tgt)

    mats = {}
    sizes = {0: len(mlab)}
    for n in range(0, degree_bound + 1):
        cols, tdim = dmatrix(n)
        mats[n] = cols
        sizes[n + 1] = tdim
    return _cohomology_from_matrices(sizes, mats, degree_bound)
