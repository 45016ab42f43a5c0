"""Exact integer linear algebra.

Arbitrary-precision integer matrices, Smith normal form with unimodular
transforms, integer kernels and linear solving, characteristic polynomials,
and abelian-invariant extraction for pairs of boundary maps.  Everything is
exact: no floating point, no modular shortcuts.

The Smith normal form is the workhorse behind every homology computation in
the package, so its elimination runs on a sparse dictionary representation
with a pivot strategy that prefers unit entries of low fill-in and otherwise
entries of minimal absolute value (integer entry growth, not asymptotics, is
the dominant cost on boundary matrices).
"""

from dataclasses import dataclass
from math import gcd

from .errors import CompositionNonzero, FormatError, ShapeMismatch


class IntMatrix:
    """Dense integer matrix, stored row-major as lists of Python ints.

    Row and column counts are kept explicitly so 0xN and Nx0 matrices
    compose correctly; such matrices occur naturally as boundary maps at
    the ends of a chain complex.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data=None):
        if data is None:
            data = [[0] * cols for _ in range(rows)]
        if len(data) != rows:
            raise ShapeMismatch("expected %d rows, got %d" % (rows, len(data)))
        for r in data:
            if len(r) != cols:
                raise ShapeMismatch("ragged row in %dx%d matrix" % (rows, cols))
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, rows)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def diagonal(cls, entries, rows=None, cols=None):
        k = len(entries)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        m = cls(rows, cols)
        for i, v in enumerate(entries):
            m.data[i][i] = v
        return m

    @classmethod
    def column(cls, entries):
        return cls(len(entries), 1, [[v] for v in entries])

    def copy(self):
        return IntMatrix(self.rows, self.cols, [row[:] for row in self.data])

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         [[self.data[i][j] for i in range(self.rows)]
                          for j in range(self.cols)])

    def col(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def is_zero(self):
        return all(v == 0 for row in self.data for v in row)

    def nonzero_count(self):
        return sum(1 for row in self.data for v in row if v)

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, [[-v for v in row] for row in self.data])

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeMismatch("add %dx%d to %dx%d" % (self.rows, self.cols,
                                                        other.rows, other.cols))
        return IntMatrix(self.rows, self.cols,
                         [[a + b for a, b in zip(r1, r2)]
                          for r1, r2 in zip(self.data, other.data)])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntMatrix(self.rows, self.cols,
                             [[other * v for v in row] for row in self.data])
        if self.cols != other.rows:
            raise ShapeMismatch("multiply %dx%d by %dx%d" % (self.rows, self.cols,
                                                             other.rows, other.cols))
        # accumulate rows of the product as combinations of rows of `other`,
        # skipping zero coefficients; boundary matrices are sparse enough that
        # this beats the naive triple loop by a wide margin
        out = []
        odata = other.data
        for arow in self.data:
            acc = [0] * other.cols
            for k, a in enumerate(arow):
                if a:
                    brow = odata[k]
                    acc = [x + a * y for x, y in zip(acc, brow)]
            out.append(acc)
        return IntMatrix(self.rows, other.cols, out)

    __rmul__ = __mul__

    def apply(self, vector):
        """Matrix times column vector, both as plain lists."""
        if len(vector) != self.cols:
            raise ShapeMismatch("apply %dx%d to vector of length %d"
                                % (self.rows, self.cols, len(vector)))
        return [sum(a * x for a, x in zip(row, vector) if a) for row in self.data]

    def hstack(self, other):
        if self.rows != other.rows:
            raise ShapeMismatch("hstack with different row counts")
        return IntMatrix(self.rows, self.cols + other.cols,
                         [r1 + r2 for r1, r2 in zip(self.data, other.data)])

    def take_columns(self, indices):
        return IntMatrix(self.rows, len(indices),
                         [[row[j] for j in indices] for row in self.data])

    def to_text(self):
        """Serialize as 'rows cols' header plus one line per row."""
        lines = ["%d %d" % (self.rows, self.cols)]
        for row in self.data:
            lines.append(" ".join(str(v) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        tokens = text.split()
        if len(tokens) < 2:
            raise FormatError("matrix text needs a 'rows cols' header")
        try:
            rows, cols = int(tokens[0]), int(tokens[1])
            entries = [int(t) for t in tokens[2:]]
        except ValueError as e:
            raise FormatError("non-integer token in matrix text: %s" % e) from None
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise FormatError("matrix text has %d entries, expected %d*%d"
                              % (len(entries), rows, cols))
        return cls(rows, cols, [entries[i * cols:(i + 1) * cols] for i in range(rows)])

    def __repr__(self):
        if self.rows * self.cols <= 36:
            return "IntMatrix(%d, %d, %r)" % (self.rows, self.cols, self.data)
        return "IntMatrix(%d, %d, <%d nonzero>)" % (self.rows, self.cols,
                                                    self.nonzero_count())


@dataclass
class SmithForm:
    """Diagonalization U*M*V = diag(d) with unimodular U, V.

    d has length min(rows, cols), entries nonnegative, each dividing the
    next; rank counts the nonzero entries.  The inverse transforms are
    tracked during elimination (cheaper than inverting afterwards) because
    lattice computations need both directions.  U, V, Uinv, Vinv are None
    when the form was computed without transforms.
    """
    d: list
    rank: int
    U: object = None
    V: object = None
    Uinv: object = None
    Vinv: object = None


@dataclass
class AbelianInvariants:
    """A finitely generated abelian group: torsion chain plus free rank.

    torsion is the list of invariant factors > 1 in divisibility order, so
    the canonical decomposition is Z/t1 + ... + Z/tk + Z^free_rank.
    """
    torsion: list
    free_rank: int

    def entries(self):
        """Invariant-factor list with one 0 per free summand (display form)."""
        return list(self.torsion) + [0] * self.free_rank

    def is_trivial(self):
        return not self.torsion and self.free_rank == 0

    def order(self):
        """Group order, or 0 if infinite."""
        if self.free_rank:
            return 0
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def __str__(self):
        if self.is_trivial():
            return "0"
        parts = ["Z/%d" % t for t in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append("Z^%d" % self.free_rank)
        return " + ".join(parts)


def _sym_div(a, b):
    """Quotient q with a - q*b the symmetric remainder in (-|b|/2, |b|/2]."""
    if b < 0:
        return -_sym_div(a, -b)
    q, r = divmod(a, b)
    if 2 * r > b:
        q += 1
    return q


def smith_normal_form(M, transforms=True):
    """Smith normal form of an integer matrix.

    Returns a SmithForm; when transforms is true, U, V, Uinv, Vinv are
    IntMatrix instances with U*M*V = diag(d).  Elimination is performed on
    a sparse copy: pivots are chosen among +-1 entries by least fill-in
    when any exist, otherwise by least absolute value, which keeps both
    fill-in and entry growth tolerable on boundary matrices.  The result is
    deterministic for a given input.
    """
    m, n = M.rows, M.cols
    row = [dict() for _ in range(m)]       # row[i][j] = nonzero entry
    colocc = [set() for _ in range(n)]     # colocc[j] = rows with entry in column j
    for i in range(m):
        src = M.data[i]
        ri = row[i]
        for j in range(n):
            v = src[j]
            if v:
                ri[j] = v
                colocc[j].add(i)

    if transforms:
        U = [[1 if a == b else 0 for b in range(m)] for a in range(m)]
        Ui = [r[:] for r in U]
        V = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        Vi = [r[:] for r in V]

    def row_swap(a, b):
        if a == b:
            return
        row[a], row[b] = row[b], row[a]
        for j in set(row[a]) | set(row[b]):
            occ = colocc[j]
            ina, inb = j in row[a], j in row[b]
            occ.add(a) if ina else occ.discard(a)
            occ.add(b) if inb else occ.discard(b)
        if transforms:
            U[a], U[b] = U[b], U[a]
            for r in Ui:
                r[a], r[b] = r[b], r[a]

    def col_swap(a, b):
        if a == b:
            return
        for i in colocc[a] | colocc[b]:
            ri = row[i]
            va, vb = ri.pop(a, None), ri.pop(b, None)
            if vb is not None:
                ri[a] = vb
            if va is not None:
                ri[b] = va
        colocc[a], colocc[b] = colocc[b], colocc[a]
        if transforms:
            for r in V:
                r[a], r[b] = r[b], r[a]
            Vi[a], Vi[b] = Vi[b], Vi[a]

    def row_addmul(dst, src, q):
        # R_dst += q * R_src
        if q == 0:
            return
        rd = row[dst]
        for j, v in row[src].items():
            w = rd.get(j, 0) + q * v
            if w:
                rd[j] = w
                colocc[j].add(dst)
            else:
                del rd[j]
                colocc[j].discard(dst)
        if transforms:
            U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]
            for r in Ui:
                r[src] -= q * r[dst]

    def col_addmul(dst, src, q):
        # C_dst += q * C_src
        if q == 0:
            return
        for i in list(colocc[src]):
            ri = row[i]
            w = ri.get(dst, 0) + q * ri[src]
            if w:
                ri[dst] = w
                colocc[dst].add(i)
            else:
                del ri[dst]
                colocc[dst].discard(i)
        if transforms:
            for r in V:
                r[dst] += q * r[src]
            Vi[src] = [x - q * y for x, y in zip(Vi[src], Vi[dst])]

    def row_negate(i):
        ri = row[i]
        for j in ri:
            ri[j] = -ri[j]
        if transforms:
            U[i] = [-x for x in U[i]]
            for r in Ui:
                r[i] = -r[i]

    def col_transform2(a, b, p, q, r, s):
        # (C_a, C_b) <- (p*C_a + q*C_b, r*C_a + s*C_b), with p*s - q*r = 1
        assert p * s - q * r == 1
        for i in list(colocc[a] | colocc[b]):
            ri = row[i]
            va, vb = ri.get(a, 0), ri.get(b, 0)
            for col, w in ((a, p * va + q * vb), (b, r * va + s * vb)):
                if w:
                    ri[col] = w
                    colocc[col].add(i)
                else:
                    ri.pop(col, None)
                    colocc[col].discard(i)
        if transforms:
            for rw in V:
                va, vb = rw[a], rw[b]
                rw[a], rw[b] = p * va + q * vb, r * va + s * vb
            ra = [s * x - r * y for x, y in zip(Vi[a], Vi[b])]
            rb = [-q * x + p * y for x, y in zip(Vi[a], Vi[b])]
            Vi[a], Vi[b] = ra, rb

    limit = min(m, n)
    k = 0
    while k < limit:
        # pivot search over the active block (rows >= k; cleared columns
        # < k hold no entries in those rows)
        best = None
        for i in range(k, m):
            for j, v in row[i].items():
                a = -v if v < 0 else v
                if a == 1:
                    key = (0, (len(row[i]) - 1) * (len(colocc[j]) - 1), i, j)
                else:
                    key = (1, a, i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        row_swap(k, best[2])
        col_swap(k, best[3])

        while True:
            if row[k][k] < 0:
                row_negate(k)
            p = row[k][k]
            for i in [i for i in colocc[k] if i != k]:
                row_addmul(i, k, -_sym_div(row[i][k], p))
            leftover = [i for i in colocc[k] if i != k]
            if leftover:
                # a division left a remainder smaller than the pivot; swap it in
                row_swap(k, min(leftover, key=lambda i: (abs(row[i][k]), i)))
                continue
            for j in [j for j in row[k] if j != k]:
                col_addmul(j, k, -_sym_div(row[k][j], p))
            leftover = [j for j in row[k] if j != k]
            if leftover:
                col_swap(k, min(leftover, key=lambda j: (abs(row[k][j]), j)))
                continue
            break
        k += 1

    rank = k
    d = [row[i].get(i, 0) for i in range(limit)]
    assert all(v > 0 for v in d[:rank]) and not any(d[rank:])

    # enforce the divisibility chain d_i | d_j for i < j on the diagonal
    i = 0
    while i < rank:
        fixed_any = False
        for j in range(i + 1, rank):
            if d[j] % d[i]:
                a, b = d[i], d[j]
                g = gcd(a, b)
                # extended euclid: pa + qb = g
                p0, p1, q0, q1, x, y = 1, 0, 0, 1, a, b
                while y:
                    t, x, y = x // y, y, x % y
                    p0, p1 = p1, p0 - t * p1
                    q0, q1 = q1, q0 - t * q1
                pp, qq = p0, q0
                assert pp * a + qq * b == g
                row_addmul(i, j, 1)
                col_transform2(i, j, pp, qq, -b // g, a // g)
                row_addmul(j, i, -(qq * b) // g)
                d[i], d[j] = g, a * b // g
                assert row[i].get(i) == d[i] and row[j].get(j) == d[j]
                assert len(row[i]) == 1 and len(row[j]) == 1
                fixed_any = True
        if not fixed_any:
            i += 1

    if transforms:
        return SmithForm(d, rank,
                         U=IntMatrix(m, m, U), V=IntMatrix(n, n, V),
                         Uinv=IntMatrix(m, m, Ui), Vinv=IntMatrix(n, n, Vi))
    return SmithForm(d, rank)


def rank(M):
    return smith_normal_form(M, transforms=False).rank


def solve_with_form(M_form, b):
    """Solve M*x = b given the SmithForm of M (with transforms).

    b is a list; returns a list x with M*x = b, or None when no integer
    solution exists.  With U*M*V = D the system becomes D*y = U*b, x = V*y.
    """
    sf = M_form
    ub = sf.U.apply(b)
    n = sf.V.rows
    y = [0] * n
    for i, v in enumerate(ub):
        di = sf.d[i] if i < len(sf.d) else 0
        if di:
            if v % di:
                return None
            y[i] = v // di
        elif v:
            return None
    return sf.V.apply(y)


def solve(M, b):
    """One integer solution x of M*x = b (lists), or None."""
    return solve_with_form(smith_normal_form(M), b)


def solve_matrix(M, B):
    """Solve M*X = B column by column; X as IntMatrix, or None."""
    if M.rows != B.rows:
        raise ShapeMismatch("solve %dx%d against %dx%d right-hand side"
                            % (M.rows, M.cols, B.rows, B.cols))
    sf = smith_normal_form(M)
    cols = []
    for j in range(B.cols):
        x = solve_with_form(sf, B.col(j))
        if x is None:
            return None
        cols.append(x)
    return IntMatrix(B.cols, M.cols, cols).transpose()


def integer_kernel(M):
    """Basis of the integer kernel of M, as matrix columns.

    With U*M*V = D, the columns of V beyond the rank map to zero and span
    the kernel; since V is unimodular the basis is automatically saturated
    (the quotient by the kernel is torsion free).
    """
    sf = smith_normal_form(M)
    return sf.V.take_columns(list(range(sf.rank, M.cols)))


def column_span_basis(M):
    """Basis (as columns) of the lattice spanned by the columns of M.

    Column-operations-only echelon reduction, so the span is preserved
    exactly; used to extract honest bases from redundant generating sets.
    """
    n = M.cols
    cols = [[M.data[i][j] for i in range(M.rows)] for j in range(n)]
    lead = 0
    for i in range(M.rows):
        # gcd-reduce all active columns against each other in row i
        while True:
            live = [j for j in range(lead, n) if cols[j][i]]
            if len(live) <= 1:
                break
            live.sort(key=lambda j: (abs(cols[j][i]), j))
            piv = live[0]
            p = cols[piv][i]
            for j in live[1:]:
                q = _sym_div(cols[j][i], p)
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[piv])]
        live = [j for j in range(lead, n) if cols[j][i]]
        if live:
            j = live[0]
            cols[lead], cols[j] = cols[j], cols[lead]
            lead += 1
    basis = cols[:lead]
    return IntMatrix(len(basis), M.rows, basis).transpose() if basis \
        else IntMatrix.zeros(M.rows, 0)


def homology_of_pair(d_n, d_next):
    """Abelian invariants of ker(d_n) / im(d_next).

    Convention: d_n maps degree n to degree n-1 and d_next maps degree n+1
    to degree n, both acting on column vectors, so composability means
    d_n.cols == d_next.rows and the product d_n * d_next must vanish.

    The kernel of d_n is a saturated sublattice (the quotient embeds into
    the codomain, hence is torsion free), so the invariant factors of
    d_next are unchanged by viewing it as a map into that kernel.  The
    torsion of the quotient is therefore the set of invariant factors > 1
    of d_next, and the free rank is nullity(d_n) - rank(d_next).
    """
    if d_n.cols != d_next.rows:
        raise ShapeMismatch("chain group has dimension %d as source, %d as target"
                            % (d_n.cols, d_next.rows))
    if not (d_n * d_next).is_zero():
        raise CompositionNonzero("boundary maps do not compose to zero")
    r_n = rank(d_n)
    sf = smith_normal_form(d_next, transforms=False)
    free = d_n.cols - r_n - sf.rank
    assert free >= 0
    return AbelianInvariants(torsion=[v for v in sf.d if v > 1], free_rank=free)


def determinant(M):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if M.rows != M.cols:
        raise ShapeMismatch("determinant of a %dx%d matrix" % (M.rows, M.cols))
    n = M.rows
    if n == 0:
        return 1
    a = [r[:] for r in M.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact division: the Bareiss identity keeps entries integral
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def charpoly(M):
    """Characteristic polynomial det(xI - M), coefficients highest degree first.

    Division-free Berkowitz iteration over principal submatrices; returns a
    list of length n+1 starting with 1.
    """
    if M.rows != M.cols:
        raise ShapeMismatch("charpoly of a %dx%d matrix" % (M.rows, M.cols))
    n = M.rows
    a = M.data
    poly = [1]
    for r in range(1, n + 1):
        # first column of the (r+1) x r Toeplitz factor:
        # 1, -a_rr, -(R C), -(R A C), ..., with A the leading (r-1) block
        vec = [1, -a[r - 1][r - 1]]
        w = [a[i][r - 1] for i in range(r - 1)]
        for _ in range(r - 1):
            vec.append(-sum(a[r - 1][j] * w[j] for j in range(r - 1)))
            w = [sum(a[i][j] * w[j] for j in range(r - 1)) for i in range(r - 1)]
        # multiply by the Toeplitz factor: new[i] = sum vec[i-j] * poly[j]
        new = [0] * (r + 1)
        for j, pj in enumerate(poly):
            if pj:
                for i in range(j, min(j + len(vec), r + 1)):
                    new[i] += vec[i - j] * pj
        poly = new
    return poly


def integer_roots(poly):
    """Integer roots (with multiplicity) of a monic integer polynomial.

    poly lists coefficients highest degree first.  Returns (roots, residual)
    where residual is the monic factor with no integer roots; for a monic
    polynomial every rational root is an integer, so the residual has no
    rational roots either.  Roots are returned in ascending order.
    """
    assert poly and poly[0] == 1
    coeffs = list(poly)
    roots = []
    while len(coeffs) > 1:
        # strip zero roots first
        if coeffs[-1] == 0:
            roots.append(0)
            coeffs = coeffs[:-1]
            continue
        c0 = abs(coeffs[-1])
        divisors = [k for k in range(1, c0 + 1) if c0 % k == 0]
        candidates = sorted({s * k for k in divisors for s in (1, -1)})
        found = None
        for r in candidates:
            acc = 0
            for c in coeffs:
                acc = acc * r + c
            if acc == 0:
                found = r
                break
        if found is None:
            break
        roots.append(found)
        # synthetic division by (x - found)
        out = []
        acc = 0
        for c in coeffs[:-1]:
            acc = acc * found + c
            out.append(acc)
        coeffs = out
    return sorted(roots), coeffs


class QuotientLattice:
    """A quotient Z/B of nested sublattices of Z^n, with coordinates.

    Z and B are matrices whose columns are bases of the two lattices, with
    span(B) contained in span(Z).  The constructor computes an adapted
    basis of Z in which B is diagonal, which exhibits the quotient as a
    direct sum of cyclic groups; project/lift translate between ambient
    vectors and coordinates on the nontrivial cyclic components.  This is
    how operators acting on cocycles are pushed down to cohomology.
    """

    def __init__(self, Z, B):
        if Z.rows != B.rows:
            raise ShapeMismatch("lattices live in different ambient dimensions")
        Y = solve_matrix(Z, B)
        if Y is None:
            raise ValueError("columns of B do not lie in the span of Z")
        sf = smith_normal_form(Y)
        # with U Y V = D: new basis Z' = Z U^-1 satisfies B V = Z' D,
        # so span(B) = span(Z' D) and the component orders are the d_i
        self.ambient_dim = Z.rows
        self.basis = Z * sf.Uinv
        orders = list(sf.d) + [0] * (Z.cols - len(sf.d))
        self.orders_full = orders
        # components of order 1 are trivial and dropped from coordinates
        self.components = [(i, orders[i]) for i in range(Z.cols) if orders[i] != 1]
        self._solve_form = smith_normal_form(self.basis)

    def invariants(self):
        torsion = sorted(o for _, o in self.components if o > 1)
        free = sum(1 for _, o in self.components if o == 0)
        return AbelianInvariants(torsion=torsion, free_rank=free)

    def rank(self):
        return len(self.components)

    def project(self, vector):
        """Coordinates of an ambient vector on the nontrivial components.

        The vector must lie in span(Z); torsion coordinates are reduced to
        canonical residues.
        """
        c = solve_with_form(self._solve_form, vector)
        if c is None:
            raise ValueError("vector does not lie in the lattice")
        out = []
        for i, o in self.components:
            out.append(c[i] % o if o > 1 else c[i])
        return tuple(out)

    def lift(self, coords):
        """An ambient representative of the class with the given coordinates."""
        if len(coords) != len(self.components):
            raise ShapeMismatch("expected %d coordinates" % len(self.components))
        v = [0] * self.ambient_dim
        for (i, _), c in zip(self.components, coords):
            if c:
                col = self.basis.col(i)
                v = [x + c * y for x, y in zip(v, col)]
        return v

    def zero_class(self):
        return tuple([0] * len(self.components))
