"""Exact linear algebra over the rationals.

Everything downstream (composition products, bar homology, twisted
differentials) reduces to rank / kernel / cokernel computations here.
Vectors are sparse dicts {column index: Fraction}; matrices are kept
column-wise.  Elimination is exact with deterministic leftmost-lowest
pivoting so every derived basis is reproducible.
"""

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def vec_add(u, v):
    w = dict(u)
    for k, c in v.items():
        s = w.get(k, ZERO) + c
        if s:
            w[k] = s
        else:
            w.pop(k, None)
    return w


def vec_addmul(u, v, c):
    # u += c*v, in place; returns u
    if not c:
        return u
    for k, cv in v.items():
        s = u.get(k, ZERO) + c * cv
        if s:
            u[k] = s
        else:
            u.pop(k, None)
    return u


def vec_scale(v, c):
    if not c:
        return {}
    return {k: c * cv for k, cv in v.items()}


class SparseEchelon:
    """Row echelon form over sparse dict-vectors with integer column keys.

    Pivot of a row is its minimal column index, so feeding rows in any
    order yields the same echelonized span; `back_substitute` upgrades to
    fully reduced form.
    """

    def __init__(self):
        self.pivots = {}  # col -> row with row[col] == 1
        self._reduced = True

    def reduce(self, vec):
        vec = dict(vec)
        while vec:
            p = min(vec)
            row = self.pivots.get(p)
            if row is None:
                return vec, p
            vec_addmul(vec, row, -vec[p])
        return vec, None

    def add(self, vec):
        """Insert a row; returns the new pivot column or None if dependent."""
        vec, p = self.reduce(vec)
        if p is None:
            return None
        c = vec[p]
        if c != ONE:
            vec = {k: cv / c for k, cv in vec.items()}
        self.pivots[p] = vec
        self._reduced = False
        return p

    def rank(self):
        return len(self.pivots)

    def back_substitute(self):
        if self._reduced:
            return
        for p in sorted(self.pivots, reverse=True):
            row = self.pivots[p]
            for q in [k for k in row if k != p and k in self.pivots]:
                vec_addmul(row, self.pivots[q], -row[q])
        self._reduced = True

    def contains(self, vec):
        return not self.reduce(vec)[0]


def rank_of_columns(cols):
    ech = SparseEchelon()
    for v in cols:
        ech.add(v)
    return ech.rank()


def kernel_of_columns(cols, ncols):
    """Kernel of the map sending basis vector j to cols[j].

    Returns a list of sparse coefficient vectors (dicts over range(ncols)),
    deterministic: one per non-pivot column, reduced echelon in the
    coefficient coordinates.
    """
    assert len(cols) == ncols
    ech = SparseEchelon()
    kernel = []
    # Track combinations: augment each column with a unit tag in a shifted
    # coordinate block that no real row index reaches.
    tag_base = 1
    for v in cols:
        for k in v:
            assert isinstance(k, int) and k >= 0
    for j, v in enumerate(cols):
        aug = dict(v)
        aug[-(j + tag_base)] = ONE  # negative keys: combination bookkeeping
        red = dict(aug)
        while True:
            real = [k for k in red if k >= 0]
            if not real:
                break
            p = min(real)
            row = ech.pivots.get(p)
            if row is None:
                break
            vec_addmul(red, row, -red[p])
        real = [k for k in red if k >= 0]
        if not real:
            coeffs = {-k - tag_base: c for k, c in red.items()}
            kernel.append(coeffs)
        else:
            p = min(real)
            c = red[p]
            if c != ONE:
                red = {k: cv / c for k, cv in red.items()}
            ech.pivots[p] = red
    # normalize kernel vectors: leading coefficient 1 on the lowest index
    out = []
    for v in kernel:
        p = min(v)
        c = v[p]
        out.append({k: cv / c for k, cv in v.items()} if c != ONE else v)
    return out


class Quotient:
    """Cokernel of a set of relation vectors inside K^ncols.

    kept: sorted list of non-pivot coordinates (the quotient basis).
    project(vec): image of a sparse vector in quotient coordinates.
    """

    def __init__(self, ncols, relations, order=None):
        # order: optional list mapping priority position -> column; pivots are
        # chosen by this priority (default: natural index order).
        self.ncols = ncols
        if order is None:
            self._to_prio = None
            ech = SparseEchelon()
            for r in relations:
                ech.add(r)
        else:
            prio = {col: i for i, col in enumerate(order)}
            self._to_prio = prio
            self._from_prio = {i: col for col, i in prio.items()}
            ech = SparseEchelon()
            for r in relations:
                ech.add({prio[k]: c for k, c in r.items()})
        ech.back_substitute()
        self._ech = ech
        if order is None:
            pivset = set(ech.pivots)
            self.kept = [j for j in range(ncols) if j not in pivset]
        else:
            pivset = {self._from_prio[p] for p in ech.pivots}
            self.kept = sorted(j for j in range(ncols) if j not in pivset)
        self.dim = len(self.kept)

    def project(self, vec):
        if self._to_prio is not None:
            vec = {self._to_prio[k]: c for k, c in vec.items()}
        # rows are fully reduced, so one substitution pass per pivot suffices
        red = dict(vec)
        for k in [k for k in vec if k in self._ech.pivots]:
            c = red.pop(k, ZERO)
            if c:
                row = dict(self._ech.pivots[k])
                row.pop(k)
                vec_addmul(red, row, -c)
        if self._to_prio is not None:
            red = {self._from_prio[k]: c for k, c in red.items()}
        return red


class SolveBasis:
    """Expresses vectors in the span of a fixed list of basis vectors."""

    def __init__(self, basis):
        self.ech = SparseEchelon()
        self.n = len(basis)
        for j, v in enumerate(basis):
            aug = dict(v)
            aug[-(j + 1)] = ONE
            red = dict(aug)
            while True:
                real = [k for k in red if k >= 0]
                if not real:
                    break
                p = min(real)
                row = self.ech.pivots.get(p)
                if row is None:
                    self.ech.pivots[p] = vec_scale(red, ONE / red[p])
                    red = None
                    break
                vec_addmul(red, row, -red[p])
            assert red is None, "SolveBasis: dependent basis vectors"

    def express(self, vec):
        """Coefficients c with sum c[j]*basis[j] == vec, or None."""
        red = dict(vec)
        coeffs = {}
        while True:
            real = [k for k in red if k >= 0]
            if not real:
                break
            p = min(real)
            row = self.ech.pivots.get(p)
            if row is None:
                return None
            vec_addmul(red, row, -red[p])
        for k, c in red.items():
            coeffs[-k - 1] = -c
        return coeffs


class RationalMatrix:
    """Dense-indexed exact matrix; thin wrapper over sparse columns."""

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (i, j), c in entries.items():
                assert 0 <= i < rows and 0 <= j < cols
                c = Fraction(c)
                if c:
                    self.entries[(i, j)] = c

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            assert len(row) == cols
            for j, c in enumerate(row):
                if c:
                    ent[(i, j)] = Fraction(c)
        return cls(rows, cols, ent)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): ONE for i in range(n)})

    def columns(self):
        cols = [dict() for _ in range(self.cols)]
        for (i, j), c in self.entries.items():
            cols[j][i] = c
        return cols

    def transpose(self):
        return RationalMatrix(
            self.cols, self.rows, {(j, i): c for (i, j), c in self.entries.items()}
        )

    def mul(self, other):
        assert self.cols == other.rows
        cols = [dict() for _ in range(other.cols)]
        mine = self.columns()
        for (i, j), c in other.entries.items():
            vec_addmul(cols[j], mine[i], c)
        ent = {}
        for j, col in enumerate(cols):
            for i, c in col.items():
                ent[(i, j)] = c
        return RationalMatrix(self.rows, other.cols, ent)

    def sub(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        ent = dict(self.entries)
        for k, c in other.entries.items():
            s = ent.get(k, ZERO) - c
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return RationalMatrix(self.rows, self.cols, ent)

    def is_zero(self):
        return not self.entries


def rank(m):
    return rank_of_columns(m.columns())


def kernel_basis(m):
    """Basis of ker(m) as lists of Fractions, deterministic ordering."""
    ker = kernel_of_columns(m.columns(), m.cols)
    out = []
    for v in ker:
        out.append([v.get(j, ZERO) for j in range(m.cols)])
    return out


def coequalizer(f, g):
    """Cokernel of f-g: returns (quotient dimension, projection matrix).

    The projection maps the common target of f, g onto the quotient;
    projection.mul(f) == projection.mul(g).
    """
    assert (f.rows, f.cols) == (g.rows, g.cols), "shape mismatch"
    h = f.sub(g)
    q = Quotient(h.rows, h.columns())
    ent = {}
    keptpos = {col: i for i, col in enumerate(q.kept)}
    for j in range(h.rows):
        for col, c in q.project({j: ONE}).items():
            ent[(keptpos[col], j)] = c
    return q.dim, RationalMatrix(q.dim, h.rows, ent)


class ChainComplex:
    """spaces: degree -> dimension; diff: degree d -> RationalMatrix d_d
    mapping space(d) -> space(d-1).  d*d == 0 checked eagerly."""

    def __init__(self, spaces, diffs):
        self.spaces = dict(spaces)
        self.diffs = {}
        for d, m in diffs.items():
            assert m.cols == self.spaces.get(d, 0), f"d_{d} source mismatch"
            assert m.rows == self.spaces.get(d - 1, 0), f"d_{d} target mismatch"
            self.diffs[d] = m
        for d, m in self.diffs.items():
            below = self.diffs.get(d - 1)
            if below is not None and not below.mul(m).is_zero():
                raise ValueError(f"d^2 != 0 at degree {d}")

    def homology_dimension(self, d):
        dim = self.spaces.get(d, 0)
        r1 = rank(self.diffs[d]) if d in self.diffs else 0
        r2 = rank(self.diffs[d + 1]) if (d + 1) in self.diffs else 0
        h = dim - r1 - r2
        assert h >= 0
        return h
