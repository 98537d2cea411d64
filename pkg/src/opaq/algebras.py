"""Finite-dimensional algebras over a truncated operad, their modules,
free modules, enveloping algebras, Kahler differentials and derivations.

An algebra structure is supplied on the operad generators only (tables
word -> vector); the full structure map gamma : P(n) (x)_{S_n} A^{(x)n} -> A
is derived by expressing every basis operation as a combination of
partial composites with a generator and recursing.  Everything is
validated eagerly: compatibility with operad composition and
equivariance, on all basis tuples up to the truncation bound.

Free modules use the canonical identification A (x)^P N = (A (x)^P K) (x) N:
the special letter is inert under the coequalizer relations, so the
quotient is computed once on the enveloping part.
"""

import itertools
from fractions import Fraction

from .linalg import Quotient, SolveBasis, SparseEchelon, kernel_of_columns, vec_addmul
from .smodule import (
    GradedSpace,
    identity_perm,
    perm_group,
    pinv,
    reorder_sign,
    transposition,
)

ONE = Fraction(1)


def unact_word(sigma, word, degs, modpos=None):
    """gamma(sigma.x; word) = sign * gamma(x; w); returns (sign, w, pos)
    where pos tracks a marked letter originally at input modpos."""
    n = len(word)
    w = tuple(word[sigma[i] - 1] for i in range(n))
    inv = pinv(sigma)
    order = [inv[t] - 1 for t in range(n)]
    wdegs = [degs[sigma[i] - 1] for i in range(n)]
    sign = reorder_sign(wdegs, order)
    return sign, w, (inv[modpos - 1] if modpos is not None else None)


# ---------------------------------------------------------------------------
# algebras

class FinAlgebra:
    def __init__(self, P, space, gen_maps, name="", validate=True):
        """P: TruncatedOperad with P.gens; space: GradedSpace of A;
        gen_maps: dict (arity, generator label) -> {word: vector over A},
        missing words act as zero.  Homological differential on A is not
        supported (all fixtures are complexes via the operad side)."""
        self.P = P
        self.space = space
        self.gen_maps = gen_maps
        self.name = name
        self._gamma_cache = {}
        self._expr_cache = {}
        self._gen_set = {
            (l, g) for l, gl in P.gens.items() for g in gl
        }
        assert P.space(1).dim == 1
        if validate:
            self.validate()

    def deg(self, a):
        return self.space.deg[a]

    def _gen_apply(self, l, g, word):
        table = self.gen_maps.get((l, g))
        if not table:
            return {}
        return dict(table.get(word, {}))

    def expressions(self, n):
        """Each P(n) basis label as a combination of sigma.(m o_i g) with
        g a generator; plain products first, acted ones only as needed."""
        if n in self._expr_cache:
            return self._expr_cache[n]
        P = self.P
        labels = sorted(P.space(n).labels, key=repr)
        index = {lb: i for i, lb in enumerate(labels)}
        prods = []
        vecs = []
        ech = SparseEchelon()
        ident = identity_perm(n)
        for sigma in itertools.chain([ident], perm_group(n)):
            for l in sorted(P.gens):
                k = n - l + 1
                if k < 1 or not P.space(k).dim:
                    continue
                for g in P.gens[l]:
                    for m in sorted(P.space(k).labels, key=repr):
                        for i in range(1, k + 1):
                            v = P.comp(k, m, i, l, g)
                            if sigma != ident:
                                v = P.M.act_vec(n, sigma, v)
                            iv = {index[x]: c for x, c in v.items()}
                            if ech.add(dict(iv)) is not None:
                                prods.append((sigma, k, m, i, l, g))
                                vecs.append(iv)
            if ech.rank() == len(labels):
                break
        assert ech.rank() == len(labels), f"arity {n} not generated"
        sb = SolveBasis(vecs)
        expr = {}
        for p in labels:
            coeffs = sb.express({index[p]: ONE})
            expr[p] = [(c, prods[j]) for j, c in coeffs.items() if c]
        self._expr_cache[n] = expr
        return expr

    def gamma_basis(self, n, p, word):
        """gamma(p (x) a_{word_1} .. a_{word_n}), input i fed word[i-1]."""
        assert len(word) == n
        key = (n, p, word)
        out = self._gamma_cache.get(key)
        if out is not None:
            return out
        if n == 1:
            out = {word[0]: ONE}
        elif (n, p) in self._gen_set:
            out = self._gen_apply(n, p, word)
        else:
            out = {}
            gdeg = self.P.degree
            ident = identity_perm(n)
            degs = [self.deg(x) for x in word]
            for c, (sigma, k, m, i, l, g) in self.expressions(n)[p]:
                if sigma != ident:
                    s, w, _ = unact_word(sigma, word, degs)
                    c = c * s
                else:
                    w = word
                pre = sum(self.deg(w[t]) for t in range(i - 1))
                sgn = -ONE if (gdeg(l, g) % 2 and pre % 2) else ONE
                inner = self.gamma_basis(l, g, w[i - 1 : i + l - 1])
                for a, ca in inner.items():
                    sub = w[: i - 1] + (a,) + w[i + l - 1 :]
                    vec_addmul(out, self.gamma_basis(k, m, sub), c * ca * sgn)
        self._gamma_cache[key] = out
        return out

    def gamma(self, n, p_vec, word):
        out = {}
        for p, c in p_vec.items():
            vec_addmul(out, self.gamma_basis(n, p, word), c)
        return out

    def words(self, n):
        return itertools.product(sorted(self.space.labels, key=repr), repeat=n)

    def validate(self, max_arity=None):
        N = max_arity or self.P.N
        P = self.P
        # compatibility: gamma(p o_i g) = gamma(p; .. gamma(g; block) ..)
        for l in sorted(P.gens):
            for g in P.gens[l]:
                for k in range(1, N + 1):
                    n = k + l - 1
                    if n > N:
                        continue
                    for p in P.space(k):
                        for i in range(1, k + 1):
                            pg = P.comp(k, p, i, l, g)
                            for word in self.words(n):
                                lhs = self.gamma(n, pg, word)
                                pre = sum(
                                    self.deg(word[t]) for t in range(i - 1)
                                )
                                sgn = (
                                    -ONE
                                    if (P.degree(l, g) % 2 and pre % 2)
                                    else ONE
                                )
                                rhs = {}
                                inner = self.gamma_basis(
                                    l, g, word[i - 1 : i + l - 1]
                                )
                                for a, ca in inner.items():
                                    sub = (
                                        word[: i - 1] + (a,) + word[i + l - 1 :]
                                    )
                                    vec_addmul(
                                        rhs,
                                        self.gamma_basis(k, p, sub),
                                        ca * sgn,
                                    )
                                vec_addmul(lhs, rhs, -ONE)
                                if lhs:
                                    raise ValueError(
                                        f"algebra incompatible with composition"
                                        f" at {(k, p, i, l, g, word)}"
                                    )
        # equivariance: gamma(sigma p; word o sigma) with letter signs
        for n in range(2, N + 1):
            for p in P.space(n):
                for t in range(1, n):
                    s = transposition(n, t)
                    for word in self.words(n):
                        ws = tuple(word[s[i] - 1] for i in range(n))
                        d1 = self.deg(word[t - 1])
                        d2 = self.deg(word[t])
                        eps = -ONE if (d1 % 2 and d2 % 2) else ONE
                        lhs = self.gamma(n, P.M.act(n, s, p), ws)
                        rhs = {
                            a: eps * c
                            for a, c in self.gamma_basis(n, p, word).items()
                        }
                        vec_addmul(lhs, rhs, -ONE)
                        if lhs:
                            raise ValueError(
                                f"algebra not equivariant at {(n, p, s, word)}"
                            )


def trivial_algebra(P, dim, name="trivial", degrees=None):
    degrees = degrees or [0] * dim
    sp = GradedSpace([(f"x{i}", degrees[i]) for i in range(dim)])
    return FinAlgebra(P, sp, {}, name=name, validate=False)


def algebra_from_table(P, basis, tables, name="", validate=True):
    """basis: list of (label, degree); tables: {(arity, gen): {word: {label: coeff}}}."""
    sp = GradedSpace(basis)
    maps = {}
    for key, table in tables.items():
        maps[key] = {
            tuple(w): {a: Fraction(c) for a, c in v.items() if Fraction(c)}
            for w, v in table.items()
        }
    return FinAlgebra(P, sp, maps, name=name, validate=validate)


# ---------------------------------------------------------------------------
# modules

class FinModule:
    def __init__(self, A, space, gen_acts, name="", validate=True):
        """gen_acts: dict (arity, generator) -> {(word, j): vector over M}
        where word is a letter tuple whose j-th entry (1-based) is an M
        label and the rest are A labels."""
        self.A = A
        self.space = space
        self.gen_acts = gen_acts
        self.name = name
        self._cache = {}
        if validate:
            self.validate()

    def deg(self, x, is_module):
        return self.space.deg[x] if is_module else self.A.deg(x)

    def _letter_deg(self, word, j):
        return [
            self.space.deg[x] if t == j - 1 else self.A.deg(x)
            for t, x in enumerate(word)
        ]

    def _gen_act(self, l, g, word, j):
        table = self.gen_acts.get((l, g))
        if not table:
            return {}
        return dict(table.get((word, j), {}))

    def act_basis(self, n, p, word, j):
        """gamma_M(p (x) letters), the j-th letter from M."""
        key = (n, p, word, j)
        out = self._cache.get(key)
        if out is not None:
            return out
        A = self.A
        if n == 1:
            out = {word[0]: ONE}
        elif (n, p) in A._gen_set and self.gen_acts.get((n, p)) is not None:
            out = self._gen_act(n, p, word, j)
        elif (n, p) in A._gen_set:
            out = {}
        else:
            out = {}
            degs0 = self._letter_deg(word, j)
            ident = identity_perm(n)
            for c, (sigma, k, m, i, l, g) in A.expressions(n)[p]:
                if sigma != ident:
                    s, w, jw = unact_word(sigma, word, degs0, modpos=j)
                    c = c * s
                else:
                    w, jw = word, j
                degs = [degs0[sigma[t] - 1] for t in range(n)]
                pre = sum(degs[: i - 1])
                sgn = -ONE if (A.P.degree(l, g) % 2 and pre % 2) else ONE
                if i <= jw <= i + l - 1:
                    inner = self.act_basis(
                        l, g, w[i - 1 : i + l - 1], jw - i + 1
                    )
                    for x, cx in inner.items():
                        sub = w[: i - 1] + (x,) + w[i + l - 1 :]
                        vec_addmul(
                            out, self.act_basis(k, m, sub, i), c * cx * sgn
                        )
                else:
                    inner = A.gamma_basis(l, g, w[i - 1 : i + l - 1])
                    j2 = jw if jw < i else jw - l + 1
                    for a, ca in inner.items():
                        sub = w[: i - 1] + (a,) + w[i + l - 1 :]
                        vec_addmul(
                            out, self.act_basis(k, m, sub, j2), c * ca * sgn
                        )
        self._cache[key] = out
        return out

    def act(self, n, p_vec, word, j):
        out = {}
        for p, c in p_vec.items():
            vec_addmul(out, self.act_basis(n, p, word, j), c)
        return out

    def validate(self, max_arity=None):
        A = self.A
        P = A.P
        N = max_arity or P.N
        alab = sorted(A.space.labels, key=repr)
        mlab = sorted(self.space.labels, key=repr)

        def mwords(n):
            for j in range(1, n + 1):
                for aw in itertools.product(alab, repeat=n - 1):
                    for m in mlab:
                        yield aw[: j - 1] + (m,) + aw[j - 1 :], j

        for l in sorted(P.gens):
            for g in P.gens[l]:
                for k in range(1, N + 1):
                    n = k + l - 1
                    if n > N:
                        continue
                    for p in P.space(k):
                        for i in range(1, k + 1):
                            pg = P.comp(k, p, i, l, g)
                            for word, j in mwords(n):
                                lhs = self.act(n, pg, word, j)
                                degs = self._letter_deg(word, j)
                                pre = sum(degs[: i - 1])
                                sgn = (
                                    -ONE
                                    if (P.degree(l, g) % 2 and pre % 2)
                                    else ONE
                                )
                                rhs = {}
                                if i <= j <= i + l - 1:
                                    inner = self.act_basis(
                                        l, g, word[i - 1 : i + l - 1], j - i + 1
                                    )
                                    for x, cx in inner.items():
                                        sub = (
                                            word[: i - 1]
                                            + (x,)
                                            + word[i + l - 1 :]
                                        )
                                        vec_addmul(
                                            rhs,
                                            self.act_basis(k, p, sub, i),
                                            cx * sgn,
                                        )
                                else:
                                    inner = A.gamma_basis(
                                        l, g, word[i - 1 : i + l - 1]
                                    )
                                    j2 = j if j < i else j - l + 1
                                    for a, ca in inner.items():
                                        sub = (
                                            word[: i - 1]
                                            + (a,)
                                            + word[i + l - 1 :]
                                        )
                                        vec_addmul(
                                            rhs,
                                            self.act_basis(k, p, sub, j2),
                                            ca * sgn,
                                        )
                                vec_addmul(lhs, rhs, -ONE)
                                if lhs:
                                    raise ValueError(
                                        f"module incompatible at"
                                        f" {(k, p, i, l, g, word, j)}"
                                    )


def trivial_module(A, dim, name="trivial", degrees=None):
    degrees = degrees or [0] * dim
    sp = GradedSpace([(f"m{i}", degrees[i]) for i in range(dim)])
    return FinModule(A, sp, {}, name=name, validate=False)


def adjoint_module(A, name="adjoint"):
    """M = A acting on itself; module labels are tagged to stay disjoint."""
    sp = GradedSpace(
        [(("ad", a), A.space.deg[a]) for a in A.space.labels]
    )
    acts = {}
    for (l, g), table in A.gen_maps.items():
        t2 = {}
        for word, vec in table.items():
            for j in range(1, l + 1):
                w2 = word[: j - 1] + (("ad", word[j - 1]),) + word[j:]
                t2[(w2, j)] = {("ad", a): c for a, c in vec.items()}
        acts[(l, g)] = t2
    return FinModule(A, sp, acts, name=name, validate=False)


def module_from_table(A, basis, tables, name="", validate=True):
    sp = GradedSpace(basis)
    acts = {}
    for key, table in tables.items():
        acts[key] = {
            (tuple(w), j): {m: Fraction(c) for m, c in v.items() if Fraction(c)}
            for (w, j), v in table.items()
        }
    return FinModule(A, sp, acts, name=name, validate=validate)


def abelian_extension(A, M, validate=True):
    """Square-zero extension A (+) M; labels tagged ("b", -) and ("e", -)."""
    basis = [(("b", a), A.space.deg[a]) for a in A.space.labels]
    basis += [(("e", m), M.space.deg[m]) for m in M.space.labels]
    maps = {}
    for (l, g) in A._gen_set:
        table = {}
        labels = [lb for lb, _ in basis]
        for word in itertools.product(labels, repeat=l):
            mpos = [t for t, x in enumerate(word) if x[0] == "e"]
            if len(mpos) >= 2:
                continue
            if not mpos:
                aw = tuple(x[1] for x in word)
                vec = A._gen_apply(l, g, aw)
                img = {("b", a): c for a, c in vec.items()}
            else:
                j = mpos[0] + 1
                w = tuple(
                    x[1] for x in word
                )
                vec = M._gen_act(l, g, w, j)
                img = {("e", m): c for m, c in vec.items()}
            if img:
                table[word] = img
        maps[(l, g)] = table
    ext = FinAlgebra(
        A.P,
        GradedSpace(basis),
        maps,
        name=f"{A.name}+{M.name}",
        validate=validate,
    )
    projection = {lb: ({lb[1]: ONE} if lb[0] == "b" else {}) for lb, _ in basis}
    return ext, projection


# ---------------------------------------------------------------------------
# the canonical space P(A, N) and the free module A (x)^P N

class FreeModule:
    """A (x)^P N presented as U (x) N, U = quotient of the enveloping part.

    Enveloping-part labels ("u", k, p, aword): outer p in P(k), sorted
    A-word on inputs 1..k-1, the module letter canonically on input k;
    p runs over a quotient basis modulo the word stabilizer.  U is then
    cut by the coequalizer relations with arity-descending rewriting."""

    def __init__(self, A, Nsp, name=""):
        self.A = A
        self.Nsp = Nsp
        self.name = name or f"{A.name}(x){getattr(Nsp, 'name', 'N')}"
        P = A.P
        alab = sorted(A.space.labels, key=repr)
        self._stab = {}
        self._morder = {}
        pan = []
        for k in range(1, P.N + 1):
            if not P.space(k).dim:
                continue
            labels = sorted(P.space(k).labels, key=repr)
            self._morder[k] = labels
            index = {m: i for i, m in enumerate(labels)}
            for aword in itertools.combinations_with_replacement(alab, k - 1):
                rels = []
                for i in range(k - 2):
                    if aword[i] != aword[i + 1]:
                        continue
                    eps = -ONE if A.deg(aword[i]) % 2 else ONE
                    tau = transposition(k, i + 1)
                    for m in labels:
                        r = {index[m]: ONE}
                        for m2, c in P.M.act(k, tau, m).items():
                            r[index[m2]] = r.get(index[m2], 0) - eps * c
                        rels.append({x: c for x, c in r.items() if c})
                q = Quotient(len(labels), rels)
                self._stab[(k, aword)] = q
                for j in q.kept:
                    pan.append(("u", k, labels[j], aword))
        self._pan = pan
        self._pan_index = {lb: i for i, lb in enumerate(pan)}
        # coequalizer relations: one generator block inside the A-letters
        rels = []
        for k in range(2, P.N + 1):
            for l in sorted(P.gens):
                n = k + l - 1
                if n > P.N or not P.space(k).dim:
                    continue
                for g in P.gens[l]:
                    gdeg = P.degree(l, g)
                    for p in P.space(k):
                        for bword in itertools.combinations_with_replacement(
                            alab, l
                        ):
                            for aword in itertools.combinations_with_replacement(
                                alab, k - 2
                            ):
                                r = self._relation(
                                    k, p, l, g, gdeg, bword, aword
                                )
                                if r:
                                    rels.append(r)
        prio = sorted(
            range(len(pan)),
            key=lambda i: (-pan[i][1], repr(pan[i])),
        )
        irels = [
            {self._pan_index[lb]: c for lb, c in r.items()} for r in rels
        ]
        self.quot = Quotient(len(pan), irels, order=prio)
        self.u_basis = [pan[j] for j in self.quot.kept]
        self.space = GradedSpace(
            [
                (
                    (u, nu),
                    self._udeg(u) + Nsp.deg[nu],
                )
                for u in self.u_basis
                for nu in sorted(Nsp.labels, key=repr)
            ]
        )
        self.dim = self.space.dim

    def _udeg(self, u):
        _, k, p, aword = u
        return self.A.P.degree(k, p) + sum(self.A.deg(a) for a in aword)

    def _relation(self, k, p, l, g, gdeg, bword, aword):
        """project(p o_1 g; b-block then a's, slot last) minus the
        gamma_A-merged term."""
        P = self.A.P
        letters = bword + aword
        lhs = self.pan_project(
            k + l - 1, P.comp(k, p, 1, l, g), letters
        )
        rhs = {}
        merged = self.A.gamma_basis(l, g, bword)
        for a, ca in merged.items():
            vec_addmul(
                rhs, self.pan_project(k, {p: ONE}, (a,) + aword), ca
            )
        vec_addmul(lhs, rhs, -ONE)
        return lhs

    def pan_project(self, k, p_vec, letters, j=None, mdeg=0):
        """p (x) letters with the module letter in input slot j (default:
        last); letters are the k-1 algebra labels in input order with slot
        j skipped.  Sorting moves the module letter last and acts on p."""
        assert len(letters) == k - 1
        if j is None:
            j = k
        A = self.A
        P = A.P
        apos = [t for t in range(k) if t != j - 1]
        order = sorted(range(k - 1), key=lambda i: (repr(letters[i]), i))
        full_order = [apos[i] for i in order] + [j - 1]
        degs = [0] * k
        for i, t in enumerate(apos):
            degs[t] = A.deg(letters[i])
        degs[j - 1] = mdeg
        sign = reorder_sign(degs, full_order)
        sw = tuple(letters[i] for i in order)
        if full_order != list(range(k)):
            pi = [0] * k
            for newpos, t in enumerate(full_order):
                pi[t] = newpos + 1
            p_vec = P.M.act_vec(k, tuple(pi), p_vec)
        q = self._stab[(k, sw)]
        labels = self._morder[k]
        index = {m: i for i, m in enumerate(labels)}
        pr = q.project({index[m]: c for m, c in p_vec.items()})
        return {("u", k, labels[j2], sw): sign * c for j2, c in pr.items()}

    def project_u(self, vec):
        """Image of a vector over pan labels in the quotient U."""
        iv = {self._pan_index[lb]: c for lb, c in vec.items()}
        pr = self.quot.project(iv)
        return {self._pan[j]: c for j, c in pr.items()}

    def element(self, k, p_vec, letters, nu, j=None):
        """Class of p (x) (A-letters, nu in slot j, default last)."""
        u = self.project_u(
            self.pan_project(k, p_vec, letters, j=j, mdeg=self.Nsp.deg[nu])
        )
        return {(x, nu): c for x, c in u.items()}

    def act(self, l, g, bword, j, elem, strict=True):
        """Module action of a generator: letters bword with the module
        element in slot j.  elem is a vector over self.space labels.
        With strict=False, components beyond the arity bound are zero
        (the truncated-module convention)."""
        A = self.A
        P = A.P
        pre = sum(A.deg(b) for b in bword[: j - 1])
        out = {}
        for (u, nu), c in elem.items():
            _, k, p, aword = u
            # gamma(g; .., p(aw, nu), ..) = +-(g o_j p)(letters): p moves
            # past the letters before slot j
            sgn = ONE
            if P.degree(k, p) % 2 and pre % 2:
                sgn = -sgn
            n = l + k - 1
            if n > P.N:
                if not strict:
                    continue
                raise ValueError("truncation bound exceeded")
            comp = P.comp(l, g, j, k, p)
            letters = bword[: j - 1] + aword + bword[j:]
            vec = self.element(n, comp, letters, nu, j=j + k - 1)
            vec_addmul(out, vec, c * sgn)
        return out

    def as_fin_module(self, validate=False):
        return _module_from_action(
            self.A, self.space, self.act, self.name, validate
        )


def _module_from_action(A, space, act, name, validate):
    """Tabulate generator actions from act(l, g, bword, j, elem) and wrap
    as a FinModule; beyond-bound components are zero."""
    acts = {}
    P = A.P
    alab = sorted(A.space.labels, key=repr)
    for l in sorted(P.gens):
        for g in P.gens[l]:
            table = {}
            for j in range(1, l + 1):
                for bw in itertools.product(alab, repeat=l - 1):
                    for mlab in space.labels:
                        word = bw[: j - 1] + (mlab,) + bw[j - 1 :]
                        img = act(
                            l, g, bw[: j - 1] + ("*",) + bw[j - 1 :],
                            j,
                            {mlab: ONE},
                            strict=False,
                        )
                        if img:
                            table[(word, j)] = img
            acts[(l, g)] = table
    return FinModule(A, space, acts, name=name, validate=validate)


def free_module(A, Nsp, name=""):
    return FreeModule(A, Nsp, name=name)


class EnvelopingAlgebra:
    def __init__(self, A):
        self.A = A
        unitsp = GradedSpace([("1", 0)])
        self.fm = FreeModule(A, unitsp, name=f"U({A.name})")
        self.space = self.fm.space
        self.dim = self.space.dim
        self.unit = (("u", 1, self._unit_outer(), ()), "1")

    def _unit_outer(self):
        return self.fm._morder[1][0]

    def product(self, x, y):
        """(x * y): substitute y into the module slot of x."""
        P = self.A.P
        out = {}
        for (u1, _), c1 in x.items():
            _, k1, p1, aw1 = u1
            for (u2, _), c2 in y.items():
                _, k2, p2, aw2 = u2
                n = k1 + k2 - 1
                if n > P.N:
                    raise ValueError("truncation bound exceeded")
                comp = P.comp(k1, p1, k1, k2, p2)
                vec = self.fm.element(n, comp, aw1 + aw2, "1")
                sgn = ONE
                d2 = P.degree(k2, p2)
                pre = sum(self.A.deg(a) for a in aw1)
                if d2 % 2 and pre % 2:
                    sgn = -sgn
                vec_addmul(out, vec, c1 * c2 * sgn)
        return out


def enveloping_algebra(A):
    return EnvelopingAlgebra(A)


# ---------------------------------------------------------------------------
# Kahler differentials and derivations

class KaehlerModule:
    """Omega_P(B) as a quotient of the free module B (x)^P B."""

    def __init__(self, B):
        self.B = B
        self.fm = FreeModule(B, B.space, name=f"Omega({B.name})")
        P = B.P
        alab = sorted(B.space.labels, key=repr)
        idx = {lb: i for i, lb in enumerate(self.fm.space.labels)}
        rels = []
        for u in self.fm.u_basis:
            _, k, p, aword = u
            adeg = sum(B.deg(a) for a in aword)
            for l in sorted(P.gens):
                n = k + l - 1
                if n > P.N:
                    continue
                for g in P.gens[l]:
                    # u (x) g(b-word) maps to u[nu := gamma(g; b)] and to
                    # the Leibniz expansion sum_j (p o_k g)(aw, b.. db_j ..)
                    gsgn = -ONE if (P.degree(l, g) % 2 and adeg % 2) else ONE
                    comp = P.comp(k, p, k, l, g)
                    for bword in itertools.combinations_with_replacement(
                        alab, l
                    ):
                        r = {}
                        for a, ca in B.gamma_basis(l, g, bword).items():
                            r[(u, a)] = r.get((u, a), 0) + ca
                        for j in range(1, l + 1):
                            letters = aword + bword[: j - 1] + bword[j:]
                            vec = self.fm.element(
                                n, comp, letters, bword[j - 1], j=k + j - 1
                            )
                            vec_addmul(r, vec, -gsgn)
                        r = {x: c for x, c in r.items() if c}
                        if r:
                            rels.append(r)
        labels = list(self.fm.space.labels)
        irels = [{idx[x]: c for x, c in r.items()} for r in rels]
        # keep low-arity representatives, as in the free module
        prio = sorted(
            range(len(labels)),
            key=lambda i: (-labels[i][0][1], repr(labels[i])),
        )
        self.quot = Quotient(len(labels), irels, order=prio)
        self._labels = labels
        self._idx = idx
        self.space = GradedSpace(
            [
                (labels[j], self.fm.space.deg[labels[j]])
                for j in self.quot.kept
            ]
        )
        self.dim = self.space.dim

    def project(self, vec):
        iv = {self._idx[x]: c for x, c in vec.items()}
        pr = self.quot.project(iv)
        return {self._labels[j]: c for j, c in pr.items()}

    def d(self, b):
        """The universal derivation on a basis element of B."""
        u = ("u", 1, self.fm._morder[1][0], ())
        return self.project({(u, b): ONE})

    def act(self, l, g, bword, j, elem, strict=True):
        return self.project(self.fm.act(l, g, bword, j, elem, strict=strict))

    def as_fin_module(self, validate=False):
        return _module_from_action(
            self.B, self.space, self.act, self.fm.name, validate
        )


def kaehler(B):
    return KaehlerModule(B)


def module_homs(A, M1, M2):
    """Linear maps M1 -> M2 commuting with the module action (checked on
    the operad generators).  Returns (GradedSpace, basis vectors over the
    elementary-map basis (m1, m2))."""
    P = A.P
    alab = sorted(A.space.labels, key=repr)
    l1 = sorted(M1.space.labels, key=repr)
    l2 = sorted(M2.space.labels, key=repr)
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
                    for x in l1:
                        word = aw[: j - 1] + (x,) + aw[j - 1 :]
                        key = (l, g, word, j)
                        # phi(g . x) - g . phi(x) = 0, row indexed by the
                        # output basis label of M2
                        for y, c in M1.act_basis(l, g, word, j).items():
                            for z in l2:
                                add(key + (z,), (y, z), c)
                        for z in l2:
                            w2 = aw[: j - 1] + (z,) + aw[j - 1 :]
                            for z2, c in M2.act_basis(l, g, w2, j).items():
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
        d = M2.space.deg[some[1]] - M1.space.deg[some[0]]
        space.append((("hom", j), d))
        basis.append(vec)
    return GradedSpace(space), basis


def derivations(B, M, f=None):
    """A-derivations d : B -> M for the augmentation f (default: B = base
    of M and f = id).  Returns (GradedSpace, basis vectors over the
    elementary-map basis (b, m))."""
    A = M.A
    P = B.P
    blab = sorted(B.space.labels, key=repr)
    mlab = sorted(M.space.labels, key=repr)
    if f is None:
        f = {b: {b: ONE} for b in blab}
    hom = [(b, m) for b in blab for m in mlab]
    constraints = {}

    def add_constraint(key, hm, c):
        col = constraints.setdefault(hm, {})
        col[key] = col.get(key, 0) + c
        if not col[key]:
            del col[key]

    for l in sorted(P.gens):
        for g in P.gens[l]:
            for word in itertools.product(blab, repeat=l):
                key = ("c", l, g, word)
                # d(gamma_B(g; word)) - sum_j gamma_M(g; f(w).. d(w_j) ..)
                for b2, c in B.gamma_basis(l, g, word).items():
                    for m in mlab:
                        add_constraint(key + (m,), (b2, m), c)
                for j in range(1, l + 1):
                    for m in mlab:
                        choices = []
                        for t in range(l):
                            if t == j - 1:
                                choices.append([(m, ONE)])
                            else:
                                choices.append(list(f.get(word[t], {}).items()))
                        for combo in itertools.product(*choices):
                            coeff = ONE
                            letters = []
                            for x, c in combo:
                                coeff *= c
                                letters.append(x)
                            img = M.act_basis(l, g, tuple(letters), j)
                            for m2, c2 in img.items():
                                add_constraint(
                                    key + (m2,), (word[j - 1], m), -coeff * c2
                                )
    allkeys = sorted({k for col in constraints.values() for k in col}, key=repr)
    kidx = {k: i for i, k in enumerate(allkeys)}
    cols = []
    for hm in hom:
        col = constraints.get(hm, {})
        cols.append({kidx[k]: c for k, c in col.items()})
    ker = kernel_of_columns(cols, len(hom))
    basis = []
    space = []
    for j, kv in enumerate(ker):
        vec = {hom[i]: c for i, c in kv.items()}
        some = next(iter(vec))
        d = M.space.deg[some[1]] - B.space.deg[some[0]]
        space.append((("der", j), d))
        basis.append(vec)
    return GradedSpace(space), basis
