"""Truncated operads and cooperads.

Operads carry partial compositions o_i : P(k) (x) P(l) -> P(k+l-1) as
structure constants on explicit bases; cooperads carry the partial
coproduct Delta_p : C -> C o_(1) C.  Built-in classical operads use their
standard combinatorial bases (words, underlined corollas, rooted trees);
everything else is built from trees: free operads, quadratic quotients,
bar and cobar constructions, and Koszul dual cooperads extracted from the
bar complex as kernels of d_2 in top syzygy degree.
"""

import itertools
from fractions import Fraction

from . import trees as tr
from .linalg import SolveBasis, kernel_of_columns, rank_of_columns, vec_addmul
from .smodule import (
    GradedSpace,
    SModule,
    Suspension,
    identity_perm,
    op_apply,
    pcompose,
    perm_group,
    pinv,
    transposition,
    unit_smodule,
)

ONE = Fraction(1)


class TruncatedOperad:
    def __init__(self, M, unit, comp_fn, gens=None, name=""):
        """M: underlying SModule (M.space(1) must be spanned by `unit`);
        comp_fn(k, m, i, l, x) -> sparse vector over M.space(k+l-1);
        gens: dict arity -> list of labels generating P under composition."""
        self.M = M
        self.unit = unit
        self._comp_fn = comp_fn
        self._cache = {}
        self.gens = gens or {}
        self.name = name or M.name

    @property
    def N(self):
        return self.M.N

    def space(self, n):
        return self.M.space(n)

    def degree(self, n, lb):
        return self.M.degree(n, lb)

    def comp(self, k, m, i, l, x):
        key = (k, m, i, l, x)
        out = self._cache.get(key)
        if out is None:
            assert k + l - 1 <= self.N, "truncation bound exceeded"
            out = self._comp_fn(k, m, i, l, x)
            self._cache[key] = out
        return out

    def comp_vec(self, k, vec1, i, l, vec2):
        out = {}
        for m, c1 in vec1.items():
            for x, c2 in vec2.items():
                vec_addmul(out, self.comp(k, m, i, l, x), c1 * c2)
        return out


def operad_gamma(P, k, m, slots):
    """Full composition gamma(m; x_1..x_k) where slots is a tuple of
    (inner label, block) ordered by block minimum, blocks partitioning
    {1..n}.  Slots are consumed left to right (no Koszul signs), then the
    result is relabeled by the concatenation order of the blocks."""
    assert len(slots) == k
    cur = {m: ONE}
    cur_ar = k
    pos = 1
    for x, B in slots:
        l = len(B)
        new = {}
        for lab, c in cur.items():
            vec_addmul(new, P.comp(cur_ar, lab, pos, l, x), c)
        cur = new
        cur_ar += l - 1
        pos += l
    concat = [b for _, B in slots for b in B]
    n = len(concat)
    sigma = tuple(concat)
    if sigma == identity_perm(n):
        return cur
    return P.M.act_vec(n, sigma, cur)


def check_operad_axioms(P, max_arity=None):
    """Exhaustive axiom check on basis elements up to the truncation bound.

    Returns a dict of violation counts for unit, sequential associativity,
    parallel associativity (with the Koszul sign) and equivariance of the
    partial compositions."""
    N = max_arity or P.N
    bad = {"unit": 0, "sequential": 0, "parallel": 0, "equivariance": 0}

    def diff_vecs(u, v):
        w = dict(u)
        vec_addmul(w, v, -ONE)
        return w

    for k in range(1, N + 1):
        for m in P.space(k):
            for i in range(1, k + 1):
                if P.comp(k, m, i, 1, P.unit) != {m: ONE}:
                    bad["unit"] += 1
            if P.comp(1, P.unit, 1, k, m) != {m: ONE}:
                bad["unit"] += 1

    for k in range(1, N + 1):
        for l in range(1, N + 1):
            for mm in range(1, N + 1):
                n = k + l + mm - 2
                if n > N or (k == 1 and l == 1 and mm == 1):
                    continue
                for lam in P.space(k):
                    for mu in P.space(l):
                        for nu in P.space(mm):
                            smu = P.degree(l, mu)
                            snu = P.degree(mm, nu)
                            for i in range(1, k + 1):
                                lm = P.comp(k, lam, i, l, mu)
                                # nested: compose nu into the mu part
                                for j in range(1, l + 1):
                                    lhs = P.comp_vec(
                                        k + l - 1, lm, i + j - 1, mm, {nu: ONE}
                                    )
                                    rhs = P.comp_vec(
                                        k,
                                        {lam: ONE},
                                        i,
                                        l + mm - 1,
                                        P.comp(l, mu, j, mm, nu),
                                    )
                                    if diff_vecs(lhs, rhs):
                                        bad["sequential"] += 1
                                # disjoint: compose nu into a later lam slot
                                for j in range(i + 1, k + 1):
                                    lhs = P.comp_vec(
                                        k + l - 1, lm, j + l - 1, mm, {nu: ONE}
                                    )
                                    rhs = P.comp_vec(
                                        k + mm - 1,
                                        P.comp(k, lam, j, mm, nu),
                                        i,
                                        l,
                                        {mu: ONE},
                                    )
                                    if smu % 2 and snu % 2:
                                        rhs = {x: -c for x, c in rhs.items()}
                                    if diff_vecs(lhs, rhs):
                                        bad["parallel"] += 1

    # equivariance: the composite-module action commutes with gamma
    from .smodule import compose

    PP = compose(P.M, P.M)
    for n in range(2, N + 1):
        for lab in PP.space(n):
            base = gamma_of_composite(P, lab)
            for t in range(1, n):
                s = transposition(n, t)
                lhs = P.M.act_vec(n, s, base)
                rhs = {}
                for lab2, c in PP.act(n, s, lab).items():
                    vec_addmul(rhs, gamma_of_composite(P, lab2), c)
                if diff_vecs(lhs, rhs):
                    bad["equivariance"] += 1
    return bad


def gamma_of_composite(P, label):
    """Evaluate gamma on a basis label of P o P or P o (I, P)."""
    tag, m, slots = label
    plain = []
    for slot in slots:
        it, x, B = slot
        if it == 0 and tag == "c2":
            # unit of I in a non-special slot
            plain.append((P.unit, B))
        else:
            plain.append((x, B))
    return operad_gamma(P, len(slots), m, plain)


# ---------------------------------------------------------------------------
# built-in operads

def _ass_smodule(N):
    comp = {
        n: GradedSpace([(w, 0) for w in perm_group(n)]) for n in range(1, N + 1)
    }
    return SModule(
        N,
        comp,
        act_basis=lambda n, s, w: {tuple(s[x - 1] for x in w): ONE},
        name="Ass",
    )


def _ass_comp(k, w1, i, l, w2):
    out = []
    for x in w1:
        if x < i:
            out.append(x)
        elif x > i:
            out.append(x + l - 1)
        else:
            out.extend(i + y - 1 for y in w2)
    return {tuple(out): ONE}


def _com_smodule(N):
    comp = {n: GradedSpace([("e", 0)]) for n in range(1, N + 1)}
    return SModule(N, comp, act_basis=lambda n, s, lb: {lb: ONE}, name="Com")


def _perm_smodule(N):
    comp = {n: GradedSpace([(j, 0) for j in range(1, n + 1)]) for n in range(1, N + 1)}
    return SModule(
        N, comp, act_basis=lambda n, s, j: {s[j - 1]: ONE}, name="Perm"
    )


def _perm_comp(k, a, i, l, b):
    # underlined corollas: composition traces through the upper underlined
    # leaf when the composition site carries the underline
    if a < i:
        return {a: ONE}
    if a > i:
        return {a + l - 1: ONE}
    return {i + b - 1: ONE}


def _rooted_trees(n):
    """Labeled rooted trees on {1..n} as parent tuples (0 = root)."""
    if n == 1:
        return [(0,)]
    out = []
    for root in range(1, n + 1):
        others = [v for v in range(1, n + 1) if v != root]
        for parents in itertools.product(range(1, n + 1), repeat=n - 1):
            par = [0] * n
            ok = True
            for v, p in zip(others, parents):
                par[v - 1] = p
            # acyclicity: walk up from each vertex
            for v in range(1, n + 1):
                seen = set()
                w = v
                while w != root:
                    if w in seen:
                        ok = False
                        break
                    seen.add(w)
                    w = par[w - 1]
                    if w == 0:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.append(tuple(par))
    return sorted(set(out))


def _prelie_smodule(N):
    comp = {n: GradedSpace([(t, 0) for t in _rooted_trees(n)]) for n in range(1, N + 1)}

    def act(n, s, par):
        new = [0] * n
        for v in range(1, n + 1):
            p = par[v - 1]
            new[s[v - 1] - 1] = s[p - 1] if p else 0
        return {tuple(new): ONE}

    return SModule(N, comp, act_basis=act, name="PreLie")


def _prelie_comp(k, par1, i, l, par2):
    # Chapoton-Livernet grafting: vertex i is replaced by the second tree;
    # children of i reattach to any vertex of it (sum over all choices)
    def f1(v):
        return v if v < i else v + l - 1

    def f2(j):
        return i + j - 1

    children_i = [v for v in range(1, k + 1) if par1[v - 1] == i]
    root2 = next(j for j in range(1, l + 1) if par2[j - 1] == 0)
    n = k + l - 1
    base = [0] * n
    for v in range(1, k + 1):
        if v == i:
            continue
        p = par1[v - 1]
        if p == i or p == 0:
            continue
        base[f1(v) - 1] = f1(p)
    for j in range(1, l + 1):
        p = par2[j - 1]
        if p:
            base[f2(j) - 1] = f2(p)
    if par1[i - 1] != 0:
        base[f2(root2) - 1] = f1(par1[i - 1])
    out = {}
    for assignment in itertools.product(range(1, l + 1), repeat=len(children_i)):
        par = list(base)
        for c, target in zip(children_i, assignment):
            par[f1(c) - 1] = f2(target)
        t = tuple(par)
        out[t] = out.get(t, 0) + ONE
    return out


def builtin(name, N):
    if name == "com":
        return TruncatedOperad(
            _com_smodule(N), "e", lambda k, m, i, l, x: {"e": ONE},
            gens={2: ["e"]}, name="Com",
        )
    if name == "ass":
        return TruncatedOperad(
            _ass_smodule(N), (1,), _ass_comp,
            gens={2: [(1, 2), (2, 1)]}, name="Ass",
        )
    if name == "perm":
        return TruncatedOperad(
            _perm_smodule(N), 1, _perm_comp, gens={2: [1, 2]}, name="Perm",
        )
    if name == "prelie":
        return TruncatedOperad(
            _prelie_smodule(N), (0,), _prelie_comp,
            gens={2: [(0, 1), (2, 0)]}, name="PreLie",
        )
    if name == "lie":
        return quadratic_operad(lie_presentation(N), N, name="Lie")
    if name == "leib":
        return quadratic_operad(leib_presentation(N), N, name="Leib")
    raise ValueError(f"unknown operad {name!r}")


# ---------------------------------------------------------------------------
# free and quadratic operads

def free_operad(gens, N, diff_op=None, name="F(V)"):
    """Free operad on an S-module of generators (arities >= 2)."""
    M = tr.free_operad_smodule(gens, N, diff_op=diff_op)
    M.name = name

    def comp(k, t1, i, l, t2):
        return tr.graft(gens, t1, i, t2)

    gdict = {}
    for n in gens.arities():
        if n <= N:
            gdict[n] = [
                ("v", g, tuple(range(1, n + 1))) for g in gens.space(n)
            ]
    return TruncatedOperad(M, 1, comp, gens=gdict, name=name)


class OperadPresentation:
    def __init__(self, gens, relations):
        """gens: SModule of generators; relations: list of sparse vectors
        over weight-2 free-operad tree labels (S-closure is computed)."""
        self.gens = gens
        self.relations = relations


def quadratic_operad(pres, N, name="P"):
    gens = pres.gens
    F = free_operad(gens, N)
    M = F.M
    # arity-indexed ideal, echelonized over a deterministic label order
    label_order = {}
    for n in range(2, N + 1):
        labels = sorted(M.space(n).labels, key=repr)
        label_order[n] = {lb: j for j, lb in enumerate(labels)}
    from .linalg import Quotient, SparseEchelon

    ideal = {}
    for n in range(2, N + 1):
        ech = SparseEchelon()
        vecs = []
        # relations of this arity, closed under the S_n action
        for r in pres.relations:
            some = next(iter(r))
            ar = len(tr.leaves(some))
            if ar != n:
                continue
            vecs.append(r)
        # ideal from lower arities: x o_i g and g o_j x
        for n1 in sorted(ideal):
            l = n - n1 + 1
            if l < 1:
                continue
            for x in ideal[n1]:
                for i in range(1, n1 + 1):
                    for g in M.space(l):
                        vecs.append(F.comp_vec(n1, x, i, l, {g: ONE}))
            for x in ideal[n1]:
                for g in M.space(l):
                    for j in range(1, l + 1):
                        vecs.append(F.comp_vec(l, {g: ONE}, j, n1, x))
        # S_n closure
        frontier = vecs
        basis = []
        while frontier:
            newfrontier = []
            for v in frontier:
                iv = {label_order[n][lb]: c for lb, c in v.items()}
                if ech.add(iv) is not None:
                    basis.append(v)
                    for t in range(1, n):
                        s = transposition(n, t)
                        newfrontier.append(M.act_vec(n, s, v))
            frontier = newfrontier
        ideal[n] = basis

    inv_order = {n: {j: lb for lb, j in d.items()} for n, d in label_order.items()}
    quots = {}
    for n in range(2, N + 1):
        rels = [
            {label_order[n][lb]: c for lb, c in v.items()} for v in ideal[n]
        ]
        quots[n] = Quotient(len(label_order[n]), rels)

    def project(n, vec):
        if n == 1:
            return vec
        iv = {label_order[n][lb]: c for lb, c in vec.items()}
        pr = quots[n].project(iv)
        return {inv_order[n][j]: c for j, c in pr.items()}

    comp = {1: M.space(1)}
    for n in range(2, N + 1):
        kept = [inv_order[n][j] for j in quots[n].kept]
        if kept:
            comp[n] = GradedSpace([(lb, M.degree(n, lb)) for lb in kept])

    Q = SModule(
        N, comp,
        act_basis=lambda n, s, lb: project(n, M.act(n, s, lb)),
        name=name,
    )

    def qcomp(k, m, i, l, x):
        return project(k + l - 1, F.comp(k, m, i, l, x))

    gdict = {}
    for n in gens.arities():
        if n <= N:
            gdict[n] = [lb for lb in
                        [("v", g, tuple(range(1, n + 1))) for g in gens.space(n)]]
    P = TruncatedOperad(Q, 1, qcomp, gens=gdict, name=name)
    P.free = F
    P.project = project
    P.presentation = pres
    # section: every quotient basis label is itself a free-operad tree
    return P


def lie_presentation(N):
    def act(n, s, lb):
        return {lb: -ONE} if s != identity_perm(2) else {lb: ONE}

    gens = SModule(N, {2: GradedSpace([("b", 0)])}, act_basis=act, name="V")
    t0 = ("v", "b", (("v", "b", (1, 2)), 3))
    F = tr.free_operad_smodule(gens, 3)
    jac = {}
    for s in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
        vec_addmul(jac, F.act(3, s, t0), ONE)
    return OperadPresentation(gens, [jac])


def leib_presentation(N):
    def act(n, s, lb):
        if s == identity_perm(2):
            return {lb: ONE}
        return {("c" if lb == "cop" else "cop"): ONE}

    gens = SModule(
        N, {2: GradedSpace([("c", 0), ("cop", 0)])}, act_basis=act, name="V"
    )
    F = tr.free_operad_smodule(gens, 3)
    # [[x,y],z] = [[x,z],y] + [x,[y,z]]
    t1 = ("v", "c", (("v", "c", (1, 2)), 3))
    t3 = ("v", "c", (1, ("v", "c", (2, 3))))
    rel = {}
    vec_addmul(rel, {t1: ONE}, ONE)
    vec_addmul(rel, F.act(3, (1, 3, 2), t1), -ONE)
    vec_addmul(rel, {t3: ONE}, -ONE)
    return OperadPresentation(gens, [rel])


def derived_presentation(P, gen_labels):
    """Presentation of a binary quadratic operad read off numerically:
    relations = kernel of the evaluation F(V)(3) -> P(3)."""
    N = P.N

    def act(n, s, lb):
        return P.M.act(2, s, lb)

    gens = SModule(N, {2: GradedSpace([(lb, 0) for lb in gen_labels])}, act_basis=act)
    F = tr.free_operad_smodule(gens, 3)
    labels3 = sorted(F.space(3).labels, key=repr)
    target = sorted(P.space(3).labels, key=repr)
    tindex = {lb: i for i, lb in enumerate(target)}

    def evaluate(t):
        if tr.is_leaf(t):
            return None
        _, g, children = t
        slots = []
        for c in children:
            if tr.is_leaf(c):
                slots.append((P.unit, (c,)))
            else:
                _, g2, leaves2 = c
                slots.append((g2, tuple(sorted(tr.leaves(c)))))
        return operad_gamma(P, 2, g, tuple(slots))

    cols = []
    for t in labels3:
        v = evaluate(t)
        cols.append({tindex[lb]: c for lb, c in v.items()})
    ker = kernel_of_columns(cols, len(labels3))
    rels = [
        {labels3[j]: c for j, c in kv.items()} for kv in ker
    ]
    return OperadPresentation(gens, rels)


def presentation_of(name, N):
    """Quadratic presentation matching builtin(name, N)."""
    if name == "lie":
        return lie_presentation(N)
    if name == "leib":
        return leib_presentation(N)
    B = builtin(name, N)
    return derived_presentation(B, list(B.space(2).labels))


def evaluate_tree(B, t):
    """Image of a free-operad tree in the operad B, where the generator
    labels of the tree are arity-matching basis labels of B."""
    if tr.is_leaf(t):
        return {B.unit: ONE}, (t,)
    _, g, children = t
    evs = [evaluate_tree(B, c) for c in children]
    slots_vec = [v for v, _ in evs]
    blocks = [tuple(sorted(blk)) for _, blk in evs]
    cur = {g: ONE}
    cur_ar = len(children)
    pos = 1
    for v, blk in zip(slots_vec, blocks):
        l = len(blk)
        new = {}
        for lab, c in cur.items():
            for x, c2 in v.items():
                vec_addmul(new, B.comp(cur_ar, lab, pos, l, x), c * c2)
        cur = new
        cur_ar += l - 1
        pos += l
    concat = tuple(b for blk in blocks for b in blk)
    n = len(concat)
    rank = {v: j + 1 for j, v in enumerate(sorted(concat))}
    sigma = tuple(rank[v] for v in concat)
    if sigma != identity_perm(n):
        cur = B.M.act_vec(n, sigma, cur)
    return cur, tuple(sorted(concat))


def validate_quadratic_model(name, N):
    """Check builtin(name) against its quadratic presentation: equal
    dimensions and an explicit structure-constant-preserving bijection
    (tree evaluation).  Returns the per-arity evaluation maps."""
    B = builtin(name, N)
    Q = quadratic_operad(presentation_of(name, N), N, name=f"{name}q")
    maps = {1: {1: {B.unit: ONE}}}
    for n in range(2, N + 1):
        assert Q.space(n).dim == B.space(n).dim, (name, n)
        target = sorted(B.space(n).labels, key=repr)
        tindex = {lb: i for i, lb in enumerate(target)}
        vecs = []
        ev = {}
        for t in Q.space(n):
            v, _ = evaluate_tree(B, t)
            ev[t] = v
            vecs.append({tindex[lb]: c for lb, c in v.items()})
        assert rank_of_columns(vecs) == B.space(n).dim, (name, n)
        maps[n] = ev
    # structure constants agree under evaluation
    for k in range(1, N + 1):
        for l in range(1, N + 1):
            n = k + l - 1
            if n > N or n == 1:
                continue
            for a in Q.space(k):
                for i in range(1, k + 1):
                    for b in Q.space(l):
                        lhs = {}
                        for t, c in Q.comp(k, a, i, l, b).items():
                            vec_addmul(lhs, maps[n][t], c)
                        rhs = {}
                        for x, ca in maps[k][a].items():
                            for y, cb in maps[l][b].items():
                                vec_addmul(
                                    rhs, B.comp(k, x, i, l, y), ca * cb
                                )
                        vec_addmul(lhs, rhs, -ONE)
                        assert not lhs, (name, k, i, l, a, b)
    return maps


# ---------------------------------------------------------------------------
# cooperads

class TruncatedCooperad:
    def __init__(self, M, cop, counit, name=""):
        """M: SModule with M.space(1) spanned by the coaugmentation label;
        cop: dict arity -> sparse op, label -> vector over the canonical
        labels ('c2', outer, slots) of M o (I, M)."""
        self.M = M
        self.cop = cop
        self.counit = counit
        self.name = name or M.name

    @property
    def N(self):
        return self.M.N

    def space(self, n):
        return self.M.space(n)

    def degree(self, n, lb):
        return self.M.degree(n, lb)

    def cop_vec(self, n, vec):
        return op_apply(self.cop.get(n, {}), vec)


def one_slot_labels(C, n):
    """Canonical labels of (C o_(1) C)(n): outer c1 in C(k), one special
    block B carrying c2 in C(|B|), all other slots the unit of I."""
    out = []
    labels = tuple(range(1, n + 1))
    for size in range(1, n + 1):
        k = n - size + 1
        if not C.space(k).dim:
            continue
        for B in itertools.combinations(labels, size):
            blocks = sorted([B] + [(x,) for x in labels if x not in B])
            for c1 in C.space(k):
                for c2 in C.space(size):
                    slots = tuple(
                        (1, c2, bl) if bl == B else (0, "1", bl)
                        for bl in blocks
                    )
                    out.append(("c2", c1, slots))
    return out


# ---------------------------------------------------------------------------
# bar construction

class BarCooperad(TruncatedCooperad):
    pass


def _prefix_walk(gens, t):
    """Yield (path, node, prefix_deg) for internal nodes in preorder."""
    stack = [((), t, 0)]
    out = []

    def walk(node, path, prefix):
        if tr.is_leaf(node):
            return prefix
        out.append((path, node, prefix))
        run = prefix + gens.degree(len(node[2]), node[1])
        for j, c in enumerate(node[2]):
            run = walk(c, path + (j,), run)
        return run

    walk(t, (), 0)
    return out


def _replace_at(t, path, new_node):
    if not path:
        return new_node
    j = path[0]
    return (
        "v",
        t[1],
        t[2][: j] + (_replace_at(t[2][j], path[1:], new_node),) + t[2][j + 1 :],
    )


def _bar_d2_tree(P, gens, t):
    """Edge contractions with Koszul signs; gens = s(reduced P).

    Contracting the edge from vertex u down to its child vertex v costs
    -(-1)^{C + D|gv| + |pu|}: C = degree before u in preorder, D = degree
    of the subtrees between u and v, |pu| = unsuspended degree at u.  The
    global sign makes pi (strip the suspension on single-vertex trees)
    satisfy Maurer-Cartan against the subtree-extraction coproduct."""
    out = {}
    for path, u, prefix_u in _prefix_walk(gens, t):
        _, gu, children = u
        ku = len(children)
        pu = gu[2]
        deg_pu = gens.degree(ku, gu) - 1
        degs = [tr.tree_degree(gens, c) for c in children]
        for ci, v in enumerate(children):
            if tr.is_leaf(v):
                continue
            _, gv, vchildren = v
            kv = len(vchildren)
            pv = gv[2]
            deg_gv = gens.degree(kv, gv)
            inter = sum(degs[:ci])  # vertices between u and v in preorder
            sign = -ONE
            if prefix_u % 2:
                sign = -sign
            if inter % 2 and deg_gv % 2:
                sign = -sign
            if deg_pu % 2:
                sign = -sign
            merged = P.comp(ku, pu, ci + 1, kv, pv)
            newchildren = children[:ci] + vchildren + children[ci + 1 :]
            for p2, c in merged.items():
                raw = _replace_at(t, path, ("v", ("s", 1, p2), newchildren))
                for t2, c2 in tr.canonicalize(gens, raw).items():
                    val = out.get(t2, 0) + sign * c * c2
                    if val:
                        out[t2] = val
                    else:
                        out.pop(t2, None)
    return out


def _cofree_cop_tree(gens, t, n):
    """Partial coproduct of the cofree conilpotent cooperad on tree t."""
    out = {}
    if tr.is_leaf(t):
        lab = ("c2", 1, ((1, 1, (1,)),))
        return {lab: ONE}

    def addterm(lab, c):
        val = out.get(lab, 0) + c
        if val:
            out[lab] = val
        else:
            out.pop(lab, None)

    # proper and root subtree extractions
    for outer, S, sub, sign in tr.subtree_splits(gens, t):
        # blocks: S plus singletons of the other leaves of t
        others = [b for b in range(1, n + 1) if b not in S]
        blocks = sorted([tuple(sorted(S))] + [(b,) for b in others])
        rank = {B[0]: j + 1 for j, B in enumerate(blocks)}
        mapping = {b: rank[b] for b in others}
        mapping[("hole", S)] = rank[min(S)]
        outer2 = _relabel_with_hole(outer, mapping, S)
        submap = {s: j + 1 for j, s in enumerate(sorted(S))}
        sub2 = tr.relabel_leaves(sub, submap)
        slots = tuple(
            (1, sub2, B) if B[0] == min(S) and len(B) == len(S) else (0, "1", B)
            for B in blocks
        )
        addterm(("c2", outer2, slots), sign)
    # unit extractions at each leaf
    for b in range(1, n + 1):
        blocks = [(x,) for x in range(1, n + 1)]
        slots = tuple(
            (1, 1, B) if B[0] == b else (0, "1", B) for B in blocks
        )
        addterm(("c2", t, slots), ONE)
    return out


def _relabel_with_hole(t, mapping, S):
    if tr.is_leaf(t):
        return mapping[t]
    return ("v", t[1], tuple(_relabel_with_hole(c, mapping, S) for c in t[2]))


def bar_construction(P, N):
    """B(P) = (F^c(sP^bar), d1 - d2); d1, d2 stored separately, total
    differential installed on the underlying S-module."""
    reduced = SModule(
        N,
        {n: P.space(n) for n in range(2, N + 1)},
        diff={n: P.M.diff.get(n, {}) for n in range(2, N + 1) if P.M.diff.get(n)},
        act_basis=lambda n, s, lb: P.M.act(n, s, lb),
        name=f"{P.name}bar",
    )
    gens = Suspension(1).smodule(reduced)
    gen_diff = {n: gens.diff.get(n, {}) for n in gens.arities()}
    M = tr.free_operad_smodule(gens, N, diff_op=gen_diff if any(gen_diff.values()) else None)
    M.name = f"B({P.name})"
    d1 = dict(M.diff)
    d2 = {}
    for n in range(2, N + 1):
        op = {}
        for t in M.space(n):
            img = _bar_d2_tree(P, gens, t)
            if img:
                op[t] = img
        if op:
            d2[n] = op
    total = {}
    for n in set(d1) | set(d2):
        op = {}
        for t in M.space(n):
            img = {}
            vec_addmul(img, d1.get(n, {}).get(t, {}), ONE)
            vec_addmul(img, d2.get(n, {}).get(t, {}), -ONE)
            if img:
                op[t] = img
        total[n] = op
    M.diff = total
    cop = {}
    for n in range(1, N + 1):
        op = {}
        for t in M.space(n):
            op[t] = _cofree_cop_tree(gens, t, n)
        cop[n] = op
    C = BarCooperad(M, cop, counit=1, name=f"B({P.name})")
    C.P = P
    C.gens = gens
    C.d1 = d1
    C.d2 = d2
    return C


def syzygy_weight(t):
    """Number of internal vertices of a bar-construction basis tree."""
    if tr.is_leaf(t):
        return 0
    return 1 + sum(syzygy_weight(c) for c in t[2])


# ---------------------------------------------------------------------------
# Koszul dual cooperad

class KoszulDualCooperad(TruncatedCooperad):
    pass


def koszul_dual_cooperad(P, N):
    """P^! as a sub-cooperad of B(P): per arity, the kernel of d_2 on the
    top syzygy slice.  Records the inclusion and off-diagonal homology
    evidence."""
    bar = bar_construction(P, N)
    incl = {("kd", 1, 0): {1: ONE}}
    comp = {1: GradedSpace([(("kd", 1, 0), 0)])}
    evidence = {}
    for n in range(2, N + 1):
        labels = sorted(bar.M.space(n).labels, key=repr)
        by_w = {}
        for t in labels:
            by_w.setdefault(syzygy_weight(t), []).append(t)
        top = max(by_w)
        top_labels = by_w[top]
        below = by_w.get(top - 1, [])
        bindex = {t: i for i, t in enumerate(below)}
        cols = []
        for t in top_labels:
            img = bar.d2.get(n, {}).get(t, {})
            cols.append({bindex[t2]: c for t2, c in img.items()})
        ker = kernel_of_columns(cols, len(top_labels))
        basis = []
        space = []
        for j, kv in enumerate(ker):
            lab = ("kd", n, j)
            vec = {top_labels[i]: c for i, c in kv.items()}
            deg = bar.M.degree(n, next(iter(vec)))
            incl[lab] = vec
            basis.append(lab)
            space.append((lab, deg))
        comp[n] = GradedSpace(space)
        # homology away from the diagonal (informational Koszulness check)
        from .linalg import rank_of_columns

        for w in sorted(by_w):
            if w == top:
                continue
            lab_w = by_w[w]
            lab_up = by_w.get(w + 1, [])
            idx = {t: i for i, t in enumerate(by_w.get(w - 1, []))}
            r1 = rank_of_columns(
                [
                    {idx[t2]: c for t2, c in bar.d2.get(n, {}).get(t, {}).items()}
                    for t in lab_w
                ]
            )
            idx2 = {t: i for i, t in enumerate(lab_w)}
            r2 = rank_of_columns(
                [
                    {idx2[t2]: c for t2, c in bar.d2.get(n, {}).get(t, {}).items()}
                    for t in lab_up
                ]
            )
            h = len(lab_w) - r1 - r2
            if h:
                evidence[(n, w)] = h

    solvers = {}

    def solver(n):
        if n not in solvers:
            labels = sorted(bar.M.space(n).labels, key=repr)
            index = {t: i for i, t in enumerate(labels)}
            basis = [
                {index[t]: c for t, c in incl[lab].items()}
                for lab in comp[n].labels
            ]
            solvers[n] = (SolveBasis(basis), index, list(comp[n].labels))
        return solvers[n]

    def act(n, s, lab):
        sb, index, basis_labels = solver(n)
        img = bar.M.act_vec(n, s, incl[lab])
        coeffs = sb.express({index[t]: c for t, c in img.items()})
        assert coeffs is not None, "action does not preserve the Koszul dual"
        return {basis_labels[j]: c for j, c in coeffs.items()}

    M = SModule(N, comp, act_basis=act, name=f"{P.name}!")

    # restrict the bar coproduct
    cl_solvers = {}

    def cl_solver(n):
        if n not in cl_solvers:
            sub_labels = one_slot_labels(M, n)
            vecs = []
            for lab in sub_labels:
                _, c1, slots = lab
                sp = next(s for s in slots if s[0] == 1)
                _, c2, B = sp
                v = {}
                for t1, a in incl[c1].items():
                    for t2, b in incl[c2].items():
                        newslots = tuple(
                            (1, t2, bl) if itag == 1 else (0, "1", bl)
                            for itag, _, bl in slots
                        )
                        v[("c2", t1, newslots)] = v.get(("c2", t1, newslots), 0) + a * b
                vecs.append({k: c for k, c in v.items() if c})
            order = sorted({k for v in vecs for k in v}, key=repr)
            index = {k: i for i, k in enumerate(order)}
            sb = SolveBasis([{index[k]: c for k, c in v.items()} for v in vecs])
            cl_solvers[n] = (sb, index, sub_labels)
        return cl_solvers[n]

    cop = {}
    for n in range(1, N + 1):
        if not M.space(n).dim:
            continue
        sb, index, sub_labels = cl_solver(n)
        op = {}
        for lab in M.space(n):
            img = bar.cop_vec(n, incl[lab])
            vec = {}
            for k, c in img.items():
                if k in index:
                    vec[index[k]] = c
                else:
                    assert not c, "bar coproduct leaves the Koszul dual"
            coeffs = sb.express(vec)
            assert coeffs is not None, "coproduct does not restrict"
            op[lab] = {sub_labels[j]: c for j, c in coeffs.items() if c}
        cop[n] = op

    C = KoszulDualCooperad(M, cop, counit=("kd", 1, 0), name=f"{P.name}!")
    C.P = P
    C.bar = bar
    C.inclusion = incl
    C.evidence = evidence
    return C


# ---------------------------------------------------------------------------
# cobar construction

def cobar_construction(C, N):
    """Omega(C) = (F(s^{-1} C^bar), d1 - d2)."""
    reduced = SModule(
        N,
        {n: C.space(n) for n in range(2, N + 1)},
        diff={n: C.M.diff.get(n, {}) for n in range(2, N + 1) if C.M.diff.get(n)},
        act_basis=lambda n, s, lb: C.M.act(n, s, lb),
        name=f"{C.name}red",
    )
    gens = Suspension(-1).smodule(reduced)
    gen_diff = {n: gens.diff.get(n, {}) for n in gens.arities()}
    M = tr.free_operad_smodule(
        gens, N, diff_op=gen_diff if any(gen_diff.values()) else None
    )
    M.name = f"Om({C.name})"

    # d2 on a generator vertex: split via Delta_p, keep nontrivial terms
    def gen_d2(k, c):
        out = {}
        for lab, coeff in C.cop.get(k, {}).get(c, {}).items():
            _, c1, slots = lab
            sp = next(s for s in slots if s[0] == 1)
            _, c2, B = sp
            k1 = len(slots)
            k2 = len(B)
            if k1 < 2 or k2 < 2:
                continue
            sign = -ONE if C.degree(k1, c1) % 2 else ONE
            children = []
            for itag, x, bl in slots:
                if itag == 1:
                    children.append(
                        ("v", ("s", -1, c2), tuple(bl))
                    )
                else:
                    children.append(bl[0])
            t2 = ("v", ("s", -1, c1), tuple(children))
            for tc, cc in tr.canonicalize(gens, t2).items():
                val = out.get(tc, 0) + sign * coeff * cc
                if val:
                    out[tc] = val
                else:
                    out.pop(tc, None)
        return out

    gen_d2_op = {}
    for n in range(2, N + 1):
        op = {}
        for g in gens.space(n):
            img = gen_d2(n, g[2])
            if img:
                op[g] = img
        gen_d2_op[n] = op

    d1 = dict(M.diff)
    diff = {}
    for n in range(2, N + 1):
        op = {}
        for t in M.space(n):
            img = {}
            vec_addmul(img, d1.get(n, {}).get(t, {}), ONE)
            vec_addmul(img, _tree_vertex_expand(gens, t, gen_d2_op), -ONE)
            if img:
                op[t] = img
        if op:
            diff[n] = op
    M.diff = diff

    def comp(k, t1, i, l, t2):
        return tr.graft(gens, t1, i, t2)

    gdict = {}
    for n in range(2, N + 1):
        if gens.space(n).dim:
            gdict[n] = [("v", g, tuple(range(1, n + 1))) for g in gens.space(n)]
    P = TruncatedOperad(M, 1, comp, gens=gdict, name=f"Om({C.name})")
    P.C = C
    P.cobar_gens = gens
    return P


def _tree_vertex_expand(gens, t, gen_op, _prefix=0):
    """Derivation extension of a degree -1 vertex replacement whose values
    are (possibly multi-vertex) canonical subtrees on local leaves 1..k."""
    out = {}
    if tr.is_leaf(t):
        return out
    _, g, children = t
    k = len(children)
    sgn = -ONE if _prefix % 2 else ONE
    for sub, c in gen_op.get(k, {}).get(g, {}).items():
        # local subtree on leaves 1..k: substitute actual children
        raw = _substitute_local(sub, children)
        for t2, c2 in tr.canonicalize(gens, raw).items():
            val = out.get(t2, 0) + sgn * c * c2
            if val:
                out[t2] = val
            else:
                out.pop(t2, None)
    run = _prefix + gens.degree(k, g)
    for j, ch in enumerate(children):
        subout = _tree_vertex_expand(gens, ch, gen_op, run)
        for t2, c in subout.items():
            lab = ("v", g, children[:j] + (t2,) + children[j + 1 :])
            val = out.get(lab, 0) + c
            if val:
                out[lab] = val
            else:
                out.pop(lab, None)
        run += tr.tree_degree(gens, ch)
    return out


def _substitute_local(sub, children):
    if tr.is_leaf(sub):
        return children[sub - 1]
    return ("v", sub[1], tuple(_substitute_local(c, children) for c in sub[2]))


# ---------------------------------------------------------------------------
# twisting morphisms

class OperadicTwistingMorphism:
    def __init__(self, C, P, comps, name=""):
        """comps: dict arity -> sparse op from C(n) labels to P(n) vectors,
        of homological degree -1."""
        self.C = C
        self.P = P
        self.comps = comps
        self.name = name

    def apply(self, n, vec):
        return op_apply(self.comps.get(n, {}), vec)

    def apply_label(self, n, lb):
        return self.comps.get(n, {}).get(lb, {})


def convolution_star(a, b):
    """a * b = gamma_p o (a o_(1) b) o Delta_p, arity by arity."""
    C, P = a.C, a.P
    out = {}
    for n in range(1, C.N + 1):
        op = {}
        for x in C.space(n):
            img = {}
            for lab, coeff in C.cop.get(n, {}).get(x, {}).items():
                _, c1, slots = lab
                sp = next(s for s in slots if s[0] == 1)
                _, c2, B = sp
                k1 = len(slots)
                k2 = len(B)
                av = a.apply_label(k1, c1)
                bv = b.apply_label(k2, c2)
                if not av or not bv:
                    continue
                # (a o_(1) b) evaluation sign: b passes c1
                sign = -ONE if C.degree(k1, c1) % 2 else ONE
                for p1, ca in av.items():
                    for p2, cb in bv.items():
                        plain = tuple(
                            (p2, bl) if itag == 1 else (P.unit, bl)
                            for itag, _, bl in slots
                        )
                        g = operad_gamma(P, k1, p1, plain)
                        vec_addmul(img, g, sign * coeff * ca * cb)
            if img:
                op[x] = img
        if op:
            out[n] = op
    return OperadicTwistingMorphism(C, P, out, name=f"({a.name}*{b.name})")


def twisting_boundary(a):
    """del(a) = d_P o a - (-1)^{|a|} a o d_C with |a| = -1."""
    C, P = a.C, a.P
    out = {}
    for n in range(1, C.N + 1):
        op = {}
        dC = C.M.diff.get(n, {})
        for x in C.space(n):
            img = {}
            vec_addmul(img, P.M.d_vec(n, a.apply_label(n, x)), ONE)
            vec_addmul(img, a.apply(n, dC.get(x, {})), ONE)
            if img:
                op[x] = img
        if op:
            out[n] = op
    return OperadicTwistingMorphism(C, P, out, name=f"del({a.name})")


def check_maurer_cartan(alpha):
    """Number of nonzero entries of del(alpha) + alpha * alpha."""
    da = twisting_boundary(alpha)
    aa = convolution_star(alpha, alpha)
    bad = 0
    for n in range(1, alpha.C.N + 1):
        for x in alpha.C.space(n):
            img = {}
            vec_addmul(img, da.comps.get(n, {}).get(x, {}), ONE)
            vec_addmul(img, aa.comps.get(n, {}).get(x, {}), ONE)
            bad += sum(1 for c in img.values() if c)
    return bad


def canonical_twisting(kind, data):
    """kappa: P^! -> P; pi: B(P) -> P; iota: C -> Omega(C)."""
    if kind == "kappa":
        C, P = data
        comps = {}
        op = {}
        for lab in C.space(2):
            img = {}
            for t, c in C.inclusion[lab].items():
                # weight-1 bar trees are single vertices ('v', ('s',1,p), ...)
                if not tr.is_leaf(t) and syzygy_weight(t) == 1:
                    vec_addmul(img, {t[1][2]: c}, ONE)
            if img:
                op[lab] = img
        comps[2] = op
        alpha = OperadicTwistingMorphism(C, P, comps, name="kappa")
    elif kind == "pi":
        C, P = data
        comps = {}
        for n in range(2, C.N + 1):
            op = {}
            for t in C.space(n):
                if syzygy_weight(t) == 1:
                    op[t] = {t[1][2]: ONE}
            if op:
                comps[n] = op
        alpha = OperadicTwistingMorphism(C, P, comps, name="pi")
    elif kind == "iota":
        C, Om = data
        comps = {}
        for n in range(2, C.N + 1):
            op = {}
            for c in C.space(n):
                op[c] = {("v", ("s", -1, c), tuple(range(1, n + 1))): ONE}
            if op:
                comps[n] = op
        alpha = OperadicTwistingMorphism(C, Om, comps, name="iota")
    else:
        raise ValueError(kind)
    residual = check_maurer_cartan(alpha)
    assert residual == 0, f"{kind}: Maurer-Cartan residual {residual}"
    return alpha
