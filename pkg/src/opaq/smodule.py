"""Differential graded S-modules with explicit bases.

An S-module is an arity-indexed family of graded spaces with symmetric
group actions (left actions by input relabeling) and a degree -1
equivariant differential.  The composition products built here carry
canonical bases: inner factors are attached to blocks of input labels
and slots are sorted by the minimum of their block, which fixes a coset
representative for every induced-representation basis element.

Conventions.  A permutation of {1..n} is a tuple ``s`` with ``s[i-1] =
s(i)``.  Vectors are sparse dicts {basis label: Fraction}.  Signs follow
the Koszul-Quillen rule: permuting graded tensor factors x, y costs
(-1)^{|x||y|}.
"""

import itertools
from fractions import Fraction

from .linalg import vec_addmul

ONE = Fraction(1)


# ---------------------------------------------------------------------------
# permutations

def pcompose(s, t):
    """(s o t)(i) = s(t(i))."""
    return tuple(s[t[i] - 1] for i in range(len(t)))


def pinv(s):
    out = [0] * len(s)
    for i, v in enumerate(s):
        out[v - 1] = i + 1
    return tuple(out)


def psign(s):
    seen = [False] * len(s)
    sign = 1
    for i in range(len(s)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = s[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def identity_perm(n):
    return tuple(range(1, n + 1))


def transposition(n, i):
    """Adjacent transposition (i, i+1) in S_n, 1 <= i <= n-1."""
    s = list(range(1, n + 1))
    s[i - 1], s[i] = s[i], s[i - 1]
    return tuple(s)


def perm_group(n):
    return [tuple(p) for p in itertools.permutations(range(1, n + 1))]


def reorder_sign(degs, new_order):
    """Koszul sign of rearranging factors (given by original 0-based
    indices) into the sequence new_order."""
    sign = 1
    for a in range(len(new_order)):
        for b in range(a + 1, len(new_order)):
            i, j = new_order[a], new_order[b]
            if i > j and degs[i] % 2 and degs[j] % 2:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# graded spaces and sparse operators

class GradedSpace:
    def __init__(self, basis):
        """basis: iterable of (label, degree)."""
        self.labels = tuple(lb for lb, _ in basis)
        self.deg = {lb: d for lb, d in basis}
        assert len(self.labels) == len(self.deg), "duplicate labels"

    @property
    def dim(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, lb):
        return lb in self.deg


EMPTY_SPACE = GradedSpace([])


def op_apply(op, vec):
    out = {}
    for lb, c in vec.items():
        img = op.get(lb)
        if img:
            vec_addmul(out, img, c)
    return out


def op_compose(op2, op1):
    """op2 after op1, both sparse {label: vector}."""
    out = {}
    for lb, img in op1.items():
        r = op_apply(op2, img)
        if r:
            out[lb] = r
    return out


def op_is_zero(op):
    return all(not v for v in op.values())


# ---------------------------------------------------------------------------
# S-modules

class SModule:
    def __init__(self, N, comp, diff=None, act_basis=None, name=""):
        """comp: dict arity -> GradedSpace (arity 0 must be absent/empty);
        diff: dict arity -> sparse op (degree -1);
        act_basis: callable(n, sigma, label) -> vector (left action)."""
        self.N = N
        self.comp = {n: sp for n, sp in comp.items() if sp.dim}
        assert 0 not in self.comp, "arity 0 components unsupported"
        self.diff = diff or {}
        self._act_basis = act_basis
        self._act_cache = {}
        self.name = name

    def space(self, n):
        return self.comp.get(n, EMPTY_SPACE)

    def arities(self):
        return sorted(self.comp)

    def act(self, n, sigma, label):
        if sigma == identity_perm(n):
            return {label: ONE}
        key = (n, sigma)
        cache = self._act_cache.setdefault(key, {})
        if label not in cache:
            cache[label] = self._act_basis(n, sigma, label)
        return cache[label]

    def act_vec(self, n, sigma, vec):
        out = {}
        for lb, c in vec.items():
            vec_addmul(out, self.act(n, sigma, lb), c)
        return out

    def d_vec(self, n, vec):
        return op_apply(self.diff.get(n, {}), vec)

    def degree(self, n, label):
        return self.space(n).deg[label]


def unit_smodule(N):
    """The monoidal unit I = (0, K, 0, ...)."""
    return SModule(
        N,
        {1: GradedSpace([("1", 0)])},
        act_basis=lambda n, s, lb: {lb: ONE},
        name="I",
    )


class Suspension:
    """Degree shift s (shift=+1) or s^{-1} (shift=-1)."""

    def __init__(self, shift):
        assert shift in (1, -1)
        self.shift = shift

    def label(self, lb):
        return ("s", self.shift, lb)

    def space(self, sp):
        return GradedSpace([(self.label(lb), sp.deg[lb] + self.shift) for lb in sp])

    def smodule(self, M):
        comp = {n: self.space(M.space(n)) for n in M.arities()}
        sh = self.shift

        def act(n, sigma, lb):
            return {self.label(l2): c for l2, c in M.act(n, sigma, lb[2]).items()}

        # d anticommutes with the (odd) suspension symbol: d(sx) = -s(dx)
        diff = {}
        for n, dn in M.diff.items():
            diff[n] = {
                self.label(lb): {self.label(l2): -c for l2, c in img.items()}
                for lb, img in dn.items()
            }
        return SModule(M.N, comp, diff=diff, act_basis=act, name=f"s{M.name}")


# ---------------------------------------------------------------------------
# composition products

def _partitions_by_min(elements, k):
    """Partitions of the sorted tuple `elements` into k nonempty blocks,
    yielded as tuples of blocks ordered by their minima."""
    n = len(elements)
    if k == 0:
        if n == 0:
            yield ()
        return
    if n < k:
        return
    first, rest = elements[0], elements[1:]
    # choose companions of the global minimum
    for r in range(0, n - k + 1):
        for comp in itertools.combinations(rest, r):
            block = (first,) + comp
            remaining = tuple(x for x in rest if x not in comp)
            for tail in _partitions_by_min(remaining, k - 1):
                yield (block,) + tail


def _slot_transforms(slots_blocks, sigma):
    """Common action bookkeeping: returns (new blocks, per-slot inner
    permutations, slot reordering as list of old indices in new order)."""
    k = len(slots_blocks)
    newblocks = []
    taus = []
    for B in slots_blocks:
        imgs = [sigma[b - 1] for b in B]
        Bp = tuple(sorted(imgs))
        rank = {v: t + 1 for t, v in enumerate(Bp)}
        taus.append(tuple(rank[v] for v in imgs))
        newblocks.append(Bp)
    order = sorted(range(k), key=lambda j: newblocks[j][0])
    return newblocks, taus, order


def _slot_perm(order):
    """S_k element pi with pi(old slot) = new position."""
    k = len(order)
    pi = [0] * k
    for newpos, j in enumerate(order):
        pi[j] = newpos + 1
    return tuple(pi)


class _CompositeBase(SModule):
    """Shared machinery for M o N and M o (N, N2).

    Basis labels: (tag, outer label, slots) with slots a tuple of
    (inner tag, inner label, block); blocks partition {1..n} and are
    ordered by minimum.  Tensor order is (outer, inner_1, ..., inner_k).
    """

    def __init__(self, M, inners, tag, N, name):
        self.M = M
        self.inners = inners  # tuple of SModules, indexed by inner tag
        self.tag = tag
        comp = {}
        for n in range(1, N + 1):
            basis = []
            for lab, deg in self._enumerate(n):
                basis.append((lab, deg))
            if basis:
                comp[n] = GradedSpace(basis)
        super().__init__(N, comp, act_basis=self._act_composite, name=name)
        self.diff = {n: self._diff_arity(n) for n in self.comp}

    def _slot_degree(self, itag, arity, lb):
        return self.inners[itag].degree(arity, lb)

    def _enumerate(self, n):
        raise NotImplementedError

    def _act_composite(self, n, sigma, label):
        _, m, slots = label
        k = len(slots)
        blocks = [B for (_, _, B) in slots]
        newblocks, taus, order = _slot_transforms(blocks, sigma)
        pi = _slot_perm(order)
        degs = [self._slot_degree(it, len(B), x) for (it, x, B) in slots]
        sign = reorder_sign(degs, order)
        outer_vec = self.M.act(k, pi, m)
        inner_vecs = []
        for j, (it, x, B) in enumerate(slots):
            inner_vecs.append(self.inners[it].act(len(B), taus[j], x))
        out = {}
        for m2, cm in outer_vec.items():
            for combo in itertools.product(
                *[list(inner_vecs[j].items()) for j in order]
            ):
                coeff = sign * cm
                newslots = []
                for pos, (x2, cx) in enumerate(combo):
                    j = order[pos]
                    coeff *= cx
                    newslots.append((slots[j][0], x2, newblocks[j]))
                lab = (self.tag, m2, tuple(newslots))
                c0 = out.get(lab, 0) + coeff
                if c0:
                    out[lab] = c0
                else:
                    out.pop(lab, None)
        return out

    def _diff_arity(self, n):
        op = {}
        for label in self.space(n):
            _, m, slots = label
            k = len(slots)
            img = {}
            dm = self.M.d_vec(k, {m: ONE})
            for m2, c in dm.items():
                img[(self.tag, m2, slots)] = img.get((self.tag, m2, slots), 0) + c
            degs = [self._slot_degree(it, len(B), x) for (it, x, B) in slots]
            run = self.M.degree(k, m)
            for j, (it, x, B) in enumerate(slots):
                sgn = -1 if run % 2 else 1
                dx = self.inners[it].d_vec(len(B), {x: ONE})
                for x2, c in dx.items():
                    newslots = list(slots)
                    newslots[j] = (it, x2, B)
                    lab = (self.tag, m, tuple(newslots))
                    img[lab] = img.get(lab, 0) + sgn * c
                run += degs[j]
            img = {lb: c for lb, c in img.items() if c}
            if img:
                op[label] = img
        return op


class ComposeSModule(_CompositeBase):
    def __init__(self, M, N_):
        assert M.N == N_.N
        super().__init__(M, (N_,), "c", M.N, f"({M.name}o{N_.name})")

    def _enumerate(self, n):
        Ninner = self.inners[0]
        labels = tuple(range(1, n + 1))
        for k in range(1, n + 1):
            Mk = self.M.space(k)
            if not Mk.dim:
                continue
            for blocks in _partitions_by_min(labels, k):
                if any(not Ninner.space(len(B)).dim for B in blocks):
                    continue
                for m in Mk:
                    dm = Mk.deg[m]
                    for combo in itertools.product(
                        *[Ninner.space(len(B)).labels for B in blocks]
                    ):
                        slots = tuple(
                            (0, x, B) for x, B in zip(combo, blocks)
                        )
                        deg = dm + sum(
                            Ninner.degree(len(B), x) for x, B in zip(combo, blocks)
                        )
                        yield ("c", m, slots), deg


class ComposeLinearSModule(_CompositeBase):
    """M o (N, N2): exactly one inner slot carries N2 (inner tag 1)."""

    def __init__(self, M, N_, N2):
        assert M.N == N_.N == N2.N
        super().__init__(
            M, (N_, N2), "c2", M.N, f"({M.name}o({N_.name},{N2.name}))"
        )

    def _enumerate(self, n):
        N_, N2 = self.inners
        labels = tuple(range(1, n + 1))
        for k in range(1, n + 1):
            Mk = self.M.space(k)
            if not Mk.dim:
                continue
            for blocks in _partitions_by_min(labels, k):
                for special in range(k):
                    ok = True
                    spaces = []
                    for j, B in enumerate(blocks):
                        sp = (N2 if j == special else N_).space(len(B))
                        if not sp.dim:
                            ok = False
                            break
                        spaces.append(sp)
                    if not ok:
                        continue
                    for m in Mk:
                        dm = Mk.deg[m]
                        for combo in itertools.product(
                            *[sp.labels for sp in spaces]
                        ):
                            slots = tuple(
                                (1 if j == special else 0, x, B)
                                for j, (x, B) in enumerate(zip(combo, blocks))
                            )
                            deg = dm + sum(
                                spaces[j].deg[x] for j, x in enumerate(combo)
                            )
                            yield ("c2", m, slots), deg


def compose(M, N_):
    return ComposeSModule(M, N_)


def compose_linear(M, N_, N2):
    return ComposeLinearSModule(M, N_, N2)


def infinitesimal_compose(M, N_):
    """M o_(1) N = M o (I, N)."""
    return compose_linear(M, unit_smodule(M.N), N_)


# ---------------------------------------------------------------------------
# Schur functor: coinvariants M(V)

class SchurSpace(GradedSpace):
    """M(V) = (+)_n M(n) (x)_{S_n} V^{(x)n} with an explicit basis.

    Basis labels ("sch", n, word, m): word a sorted tuple of V labels, m a
    kept label of the quotient of M(n) by the word stabilizer (adjacent
    transpositions of equal letters, with the Koszul sign of the letters).
    project(n, m_vec, word) expresses m (x) word for an arbitrary word."""

    def __init__(self, M, V):
        from .linalg import Quotient

        self.M = M
        self.V = V
        self._vorder = sorted(V.labels, key=repr)
        self._quots = {}
        self._morder = {}
        basis = []
        for n in M.arities():
            labels = sorted(M.space(n).labels, key=repr)
            self._morder[n] = labels
            index = {m: i for i, m in enumerate(labels)}
            for word in itertools.combinations_with_replacement(
                self._vorder, n
            ):
                rels = []
                for i in range(n - 1):
                    if word[i] != word[i + 1]:
                        continue
                    eps = -ONE if V.deg[word[i]] % 2 else ONE
                    tau = transposition(n, i + 1)
                    for m in labels:
                        r = {index[m]: ONE}
                        for m2, c in M.act(n, tau, m).items():
                            r[index[m2]] = r.get(index[m2], 0) - eps * c
                        rels.append({k: c for k, c in r.items() if c})
                q = Quotient(len(labels), rels)
                self._quots[(n, word)] = q
                wdeg = sum(V.deg[x] for x in word)
                for j in q.kept:
                    m = labels[j]
                    basis.append(
                        (("sch", n, word, m), M.degree(n, m) + wdeg)
                    )
        super().__init__(basis)

    def project(self, n, m_vec, word):
        """Image of m (x) (x_{word_1} .. x_{word_n}) in the basis; the word
        may be unsorted, sorting acts on m with Koszul letter signs."""
        order = sorted(range(n), key=lambda i: (repr(word[i]), i))
        sw = tuple(word[i] for i in order)
        degs = [self.V.deg[x] for x in word]
        sign = reorder_sign(degs, order)
        if order != list(range(n)):
            # letter i moves to position order.index(i): relabel inputs
            pi = [0] * n
            for newpos, i in enumerate(order):
                pi[i] = newpos + 1
            m_vec = self.M.act_vec(n, tuple(pi), m_vec)
        q = self._quots[(n, sw)]
        labels = self._morder[n]
        index = {m: i for i, m in enumerate(labels)}
        pr = q.project({index[m]: c for m, c in m_vec.items()})
        out = {}
        for j, c in pr.items():
            out[("sch", n, sw, labels[j])] = sign * c
        return out


def schur_apply(M, V):
    return SchurSpace(M, V)


# ---------------------------------------------------------------------------
# Hom complexes

def hom_differential(src, d_src, dst, d_dst):
    """Differential on Hom(src, dst): basis (x, m) is the elementary map
    x -> m; del(f) = d_dst o f - (-1)^{|f|} f o d_src."""
    # transpose of d_src: for each x, which y have x in d_src(y)
    d_src_t = {}
    for y, img in d_src.items():
        for x, c in img.items():
            d_src_t.setdefault(x, {})[y] = c
    op = {}
    for x in src:
        for m in dst:
            fdeg = dst.deg[m] - src.deg[x]
            img = {}
            for m2, c in d_dst.get(m, {}).items():
                img[(x, m2)] = img.get((x, m2), 0) + c
            sgn = -1 if fdeg % 2 else 1
            for y, c in d_src_t.get(x, {}).items():
                img[(y, m)] = img.get((y, m), 0) - sgn * c
            img = {k: c for k, c in img.items() if c}
            if img:
                op[(x, m)] = img
    return op


def hom_space(src, dst):
    return GradedSpace(
        [((x, m), dst.deg[m] - src.deg[x]) for x in src for m in dst]
    )


def build_chain_complex(space, op):
    """Organize a graded space with a degree -1 sparse operator into a
    linalg.ChainComplex (checks d^2 = 0 eagerly)."""
    from .linalg import ChainComplex, RationalMatrix

    by_deg = {}
    for lb in space:
        by_deg.setdefault(space.deg[lb], []).append(lb)
    index = {}
    for d, labels in by_deg.items():
        labels.sort(key=repr)
        for i, lb in enumerate(labels):
            index[lb] = i
    spaces = {d: len(labels) for d, labels in by_deg.items()}
    diffs = {}
    for d, labels in sorted(by_deg.items()):
        if d - 1 not in spaces and not any(op.get(lb) for lb in labels):
            continue
        ent = {}
        for j, lb in enumerate(labels):
            for lb2, c in op.get(lb, {}).items():
                assert space.deg[lb2] == d - 1, "operator is not degree -1"
                ent[(index[lb2], j)] = c
        diffs[d] = RationalMatrix(spaces.get(d - 1, 0), spaces[d], ent)
    return ChainComplex(spaces, diffs), by_deg, index


def hom_complex(src, dst, differential_data):
    """Spec surface: Hom(src, dst) with del(f) = d_dst f - (-1)^{|f|} f d_src,
    returned as a ChainComplex.  differential_data = (d_src, d_dst)."""
    d_src, d_dst = differential_data
    sp = hom_space(src, dst)
    op = hom_differential(src, d_src, dst, d_dst)
    cx, _, _ = build_chain_complex(sp, op)
    return cx
