"""Rooted-tree combinatorics for free operads and cofree cooperads.

A tree is either a leaf (an integer input label) or a node
('v', generator_label, children).  Canonical form: the children of every
node are ordered by the minimum leaf label of their subtree; generator
labels live in an S-module `gens` whose action resolves reorderings.
The tensor order of vertex labels is the preorder traversal; every
operation tracks the Koszul sign of reordering that sequence.
"""

import itertools
from fractions import Fraction

from .linalg import vec_addmul
from .smodule import GradedSpace, SModule, _partitions_by_min

ONE = Fraction(1)


def is_leaf(t):
    return not isinstance(t, tuple) or t[0] != "v"


def leaves(t):
    if is_leaf(t):
        return (t,)
    out = []
    for c in t[2]:
        out.extend(leaves(c))
    return tuple(out)


def min_leaf(t):
    return min(leaves(t))


def tree_degree(gens, t):
    if is_leaf(t):
        return 0
    return gens.degree(len(t[2]), t[1]) + sum(tree_degree(gens, c) for c in t[2])


def vertex_degrees(gens, t, out=None):
    """Preorder list of vertex-label degrees."""
    if out is None:
        out = []
    if not is_leaf(t):
        out.append(gens.degree(len(t[2]), t[1]))
        for c in t[2]:
            vertex_degrees(gens, c, out)
    return out


def relabel_leaves(t, mapping):
    if is_leaf(t):
        return mapping[t]
    return ("v", t[1], tuple(relabel_leaves(c, mapping) for c in t[2]))


def canonicalize(gens, t):
    """Express a raw tree (arbitrary child order) in the canonical basis.
    Returns a sparse vector {canonical tree: coefficient}."""
    if is_leaf(t):
        return {t: ONE}
    _, g, children = t
    k = len(children)
    child_vecs = [canonicalize(gens, c) for c in children]
    mins = [min_leaf(c) for c in children]
    order = sorted(range(k), key=lambda j: mins[j])
    degs = [tree_degree(gens, c) for c in children]
    sign = ONE
    for a in range(k):
        for b in range(a + 1, k):
            i, j = order[a], order[b]
            if i > j and degs[i] % 2 and degs[j] % 2:
                sign = -sign
    if order == list(range(k)):
        gvec = {g: ONE}
    else:
        pi = [0] * k
        for newpos, j in enumerate(order):
            pi[j] = newpos + 1
        gvec = gens.act(k, tuple(pi), g)
    out = {}
    for g2, cg in gvec.items():
        for combo in itertools.product(*[list(child_vecs[j].items()) for j in order]):
            coeff = sign * cg
            newchildren = []
            for sub, cs in combo:
                coeff *= cs
                newchildren.append(sub)
            lab = ("v", g2, tuple(newchildren))
            c0 = out.get(lab, 0) + coeff
            if c0:
                out[lab] = c0
            else:
                out.pop(lab, None)
    return out


def _preorder_after_leaf(gens, t, target_leaf):
    """Total degree of vertices strictly after the given leaf in preorder,
    and whether the leaf was found in this subtree."""
    if is_leaf(t):
        return 0, t == target_leaf
    deg_here = gens.degree(len(t[2]), t[1])
    found = False
    acc = 0
    for c in t[2]:
        if found:
            acc += tree_degree(gens, c)
        else:
            sub, f = _preorder_after_leaf(gens, c, target_leaf)
            if f:
                found = True
                acc += sub
    return acc, found


def _substitute_leaf(t, target_leaf, replacement):
    if is_leaf(t):
        return replacement if t == target_leaf else t
    return (
        "v",
        t[1],
        tuple(_substitute_leaf(c, target_leaf, replacement) for c in t[2]),
    )


def graft(gens, t1, i, t2):
    """Partial composition t1 o_i t2 in the free operad; returns a sparse
    vector over canonical trees."""
    n1 = len(leaves(t1))
    n2 = len(leaves(t2))
    assert 1 <= i <= n1
    m1 = {v: (v if v < i else v + n2 - 1) for v in range(1, n1 + 1)}
    m1[i] = None  # replaced
    t1r = relabel_leaves(t1, {v: (("hole",) if v == i else m1[v]) for v in range(1, n1 + 1)})
    t2r = relabel_leaves(t2, {j: i + j - 1 for j in range(1, n2 + 1)})
    raw = _substitute_leaf(t1r, ("hole",), t2r)
    # Koszul sign: t2's vertex block passes the t1-vertices that come after
    # leaf i in t1's preorder.
    after, found = _preorder_after_leaf(gens, t1, i)
    assert found or is_leaf(t1)
    d2 = tree_degree(gens, t2)
    sign = -ONE if (after % 2 and d2 % 2) else ONE
    out = canonicalize(gens, raw)
    if sign != ONE:
        out = {k: -c for k, c in out.items()}
    return out


def enumerate_trees(gens, leafset):
    """All canonical trees on the given sorted leaf tuple."""
    if len(leafset) == 1:
        return [leafset[0]]
    out = []
    for k in range(2, len(leafset) + 1):
        if not gens.space(k).dim:
            continue
        for blocks in _partitions_by_min(leafset, k):
            for children in itertools.product(
                *[enumerate_trees(gens, B) for B in blocks]
            ):
                for g in gens.space(k):
                    out.append(("v", g, children))
    return out


def free_operad_smodule(gens, N, diff_op=None):
    """S-module of the free operad on `gens` (arities >= 2), truncated at N.
    Arity 1 component is the unit leaf.  diff_op: per-arity generator
    differential {glabel: vector}, extended as a derivation."""
    comp = {1: GradedSpace([(1, 0)])}
    for n in range(2, N + 1):
        trees = enumerate_trees(gens, tuple(range(1, n + 1)))
        if trees:
            comp[n] = GradedSpace([(t, tree_degree(gens, t)) for t in trees])

    def act(n, sigma, t):
        raw = relabel_leaves(t, {v: sigma[v - 1] for v in range(1, n + 1)})
        return canonicalize(gens, raw)

    M = SModule(N, comp, act_basis=act, name="F(V)")
    if diff_op:
        diff = {}
        for n in range(2, N + 1):
            op = {}
            for t in M.space(n):
                img = _vertex_derivation(gens, t, diff_op)
                if img:
                    op[t] = img
            if op:
                diff[n] = op
        M.diff = diff
    return M


def _vertex_derivation(gens, t, gen_op, _prefix_deg=0):
    """Apply a degree -1 vertex-label operation at every vertex of t with
    the Koszul prefix sign; shape unchanged, so result stays canonical."""
    out = {}
    if is_leaf(t):
        return out
    _, g, children = t
    k = len(children)
    sgn = -ONE if _prefix_deg % 2 else ONE
    for g2, c in gen_op.get(k, {}).get(g, {}).items():
        lab = ("v", g2, children)
        vec_addmul(out, {lab: sgn * c}, ONE)
    run = _prefix_deg + gens.degree(k, g)
    for j, ch in enumerate(children):
        sub = _vertex_derivation(gens, ch, gen_op, run)
        for t2, c in sub.items():
            lab = ("v", g, children[:j] + (t2,) + children[j + 1 :])
            vec_addmul(out, {lab: c}, ONE)
        run += tree_degree(gens, ch)
    return out


# ---------------------------------------------------------------------------
# subtree extraction: the partial coproduct of the cofree cooperad

def subtree_splits(gens, t):
    """All ways to extract a full rooted subtree at a vertex.

    Yields (outer, S, sub, sign): outer has a placeholder leaf ('hole', S);
    sign = Koszul sign of moving the subtree block past the vertices that
    follow it in preorder."""
    out = []

    def walk(node, after_deg):
        # after_deg: total degree of vertices strictly after `node`'s subtree
        # in the preorder of t
        if is_leaf(node):
            return
        S = leaves(node)
        dsub = tree_degree(gens, node)
        sign = -ONE if (dsub % 2 and after_deg % 2) else ONE
        out.append((node, S, sign))
        _, g, children = node
        tail = [tree_degree(gens, c) for c in children]
        for j, ch in enumerate(children):
            walk(ch, after_deg + sum(tail[j + 1 :]))

    walk(t, 0)
    results = []
    for sub, S, sign in out:
        outer = _substitute_leaf_subtree(t, sub, ("hole", S))
        results.append((outer, S, sub, sign))
    return results


def _substitute_leaf_subtree(t, target, replacement):
    if t == target:
        return replacement
    if is_leaf(t):
        return t
    return (
        "v",
        t[1],
        tuple(_substitute_leaf_subtree(c, target, replacement) for c in t[2]),
    )
