"""Free resolutions over group rings, with contracting homotopies.

The objects here are free left ZG-resolutions of the trivial module Z,
carried around together with enough extra structure to actually compute:
an augmentation, a section of it, and a Z-linear contracting homotopy h
with d h + h d = 1 - section.augmentation in degree 0 and d h + h d = 1
above.  Everything downstream (group cohomology, Hecke operators, the
cuspidal subspace) reduces to evaluating these maps on basis elements.

Constructions provided:

  * cyclic_resolution     -- the periodic resolution for a finite cyclic
                             group, optionally twisted by the order-2
                             character on an even cyclic group;
  * sl2z_resolution       -- a resolution for SL2(Z) built from its action
                             on the trivalent tree, assembled by hand as
                             the total complex of a two-column double
                             complex (edge stabilizer <S>, vertex
                             stabilizer <U>);
  * wall_resolution       -- the general assembly for a group acting on a
                             contractible cell complex with finitely many
                             orbits and finite cyclic stabilizers;
  * borel_serre_complex   -- the equivariant cell structure on the
                             compactified upper half plane whose quotient
                             is the compactified modular curve, with its
                             horocycle boundary marked;
  * tree_cell_complex     -- the tree itself as a one-dimensional cell
                             complex (a small cross-check input for
                             wall_resolution);
  * restrict_resolution   -- restriction of a ZG-resolution to a finite
                             index subgroup, along a chosen transversal;
  * tensor_with_z         -- the integral chain complex Z tensor_ZG R.

Conventions.  A chain in degree n is a dict {generator index:
GroupRingElement}; zero group-ring values are dropped.  The boundary is
stored one row per source generator, as {target index: GroupRingElement},
and acts by d(xi . e_j) = sum_i (xi * row_j[i]) . e_i, i.e. module
coefficients multiply the stored row from the left.  Homotopies are only
Z-linear; they are evaluated termwise through canonical coset
representatives, which is what makes them effective.
"""

from functools import lru_cache

from .chaincx import FreeChainComplexZ
from .congruence import CongruenceSubgroup, transversal
from .errors import (
    CompositionNonzero,
    DegreeOutOfRange,
    FormatError,
    MissingHomotopy,
    ShapeMismatch,
)
from .exactlin import IntMatrix
from .sl2z import (
    I,
    S,
    SL2ZMatrix,
    T,
    TreeChain,
    U,
    coset_normal_form,
    tree_homotopy,
)


class GroupRingElement:
    """A finitely supported formal Z-linear combination of group elements.

    The group elements only need hashable equality, multiplication and
    inverse(); SL2ZMatrix and CyclicElement both qualify.  Sums are kept
    with zero coefficients dropped, so is_zero is just emptiness.

    Multiplication: gre * gre is the convolution product, gre * g and
    g-on-the-left via left_mul(g) translate the support, int scaling works
    on either side.  (left_mul exists because g * gre would dispatch into
    the matrix class, which does not know about us.)
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for g, c in items:
                if not c:
                    continue
                new = self.terms.get(g, 0) + c
                if new:
                    self.terms[g] = new
                else:
                    del self.terms[g]

    @classmethod
    def unit(cls, g, coeff=1):
        out = cls()
        if coeff:
            out.terms[g] = coeff
        return out

    @classmethod
    def zero(cls):
        return cls()

    def items(self):
        return self.terms.items()

    def is_zero(self):
        return not self.terms

    def coefficient(self, g):
        return self.terms.get(g, 0)

    def support(self):
        return list(self.terms)

    def augmentation(self):
        """Sum of coefficients (the image under ZG -> Z)."""
        return sum(self.terms.values())

    def left_mul(self, g):
        """The product g * self (g a group element)."""
        out = GroupRingElement()
        for k, c in self.terms.items():
            out.terms[g * k] = c
        return out

    def __add__(self, other):
        out = GroupRingElement(dict(self.terms))
        for g, c in other.terms.items():
            new = out.terms.get(g, 0) + c
            if new:
                out.terms[g] = new
            else:
                out.terms.pop(g, None)
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = GroupRingElement()
        for g, c in self.terms.items():
            out.terms[g] = -c
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            out = GroupRingElement()
            if other:
                for g, c in self.terms.items():
                    out.terms[g] = c * other
            return out
        if isinstance(other, GroupRingElement):
            out = GroupRingElement()
            for g1, c1 in self.terms.items():
                for g2, c2 in other.terms.items():
                    k = g1 * g2
                    new = out.terms.get(k, 0) + c1 * c2
                    if new:
                        out.terms[k] = new
                    else:
                        del out.terms[k]
            return out
        # other is a bare group element: translate the support on the right
        out = GroupRingElement()
        for g, c in self.terms.items():
            out.terms[g * other] = c
        return out

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __ne__(self, other):
        return not self == other

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return "GroupRingElement(%s)" % self.to_str()

    def to_str(self):
        """Deterministic text form: 'c*g + c*g + ...', '0' when empty."""
        if not self.terms:
            return "0"
        parts = sorted((repr(g), c) for g, c in self.terms.items())
        return " + ".join("%d*%s" % (c, gs) for gs, c in parts)

    @classmethod
    def from_str(cls, text):
        """Inverse of to_str for matrix-supported elements."""
        text = text.strip()
        if text == "0":
            return cls()
        out = cls()
        for part in text.split(" + "):
            coeff, _, mat = part.partition("*")
            try:
                c = int(coeff)
            except ValueError:
                raise FormatError("bad coefficient in %r" % part)
            if not _:
                raise FormatError("missing '*' in %r" % part)
            g = SL2ZMatrix.from_str(mat)
            new = out.terms.get(g, 0) + c
            if new:
                out.terms[g] = new
            else:
                out.terms.pop(g, None)
        return out


class CyclicElement:
    """An element of an abstract cyclic group of given order.

    Used as the default coefficient group for cyclic_resolution when no
    concrete matrix generator is supplied.
    """

    __slots__ = ("order", "power")

    def __init__(self, order, power):
        assert order >= 1
        self.order = order
        self.power = power % order

    def __mul__(self, other):
        assert self.order == other.order
        return CyclicElement(self.order, self.power + other.power)

    def inverse(self):
        return CyclicElement(self.order, -self.power)

    def __eq__(self, other):
        return (
            isinstance(other, CyclicElement)
            and self.order == other.order
            and self.power == other.power
        )

    def __hash__(self):
        return hash((self.order, self.power))

    def __repr__(self):
        return "x^%d" % self.power


# ---------------------------------------------------------------------------
# chains: dict {generator index: GroupRingElement}


def chain_add(a, b):
    out = dict(a)
    for i, gre in b.items():
        cur = out.get(i)
        new = gre if cur is None else cur + gre
        if new.is_zero():
            out.pop(i, None)
        else:
            out[i] = new
    return out


def chain_neg(a):
    return {i: -gre for i, gre in a.items()}


def chain_sub(a, b):
    return chain_add(a, chain_neg(b))


def chain_scale(a, c):
    if not c:
        return {}
    return {i: gre * c for i, gre in a.items()}


def chain_is_zero(a):
    return all(gre.is_zero() for gre in a.values())


def chains_equal(a, b):
    return chain_is_zero(chain_sub(a, b))


def _chain_clean(a):
    return {i: gre for i, gre in a.items() if not gre.is_zero()}


class FreeZGResolution:
    """A free ZG-resolution of Z carried with its contracting homotopy.

    ranks[n] is the rank of the degree-n module.  boundaries[n] (n >= 1)
    is a list of rows, one per source generator, each a dict
    {target index: GroupRingElement}.  The homotopy is given on basis
    elements by homotopy_basis(n, gen, g) -> chain in degree n+1; h is its
    Z-linear termwise extension.  augmentation maps degree-0 chains to Z
    and section(c) produces a degree-0 chain with augmentation c.

    group is an identification tag (a CongruenceSubgroup, or a tuple for
    abstract groups); consumers compare it to detect mismatched inputs.
    """

    def __init__(self, group, ranks, boundaries, homotopy_basis=None,
                 augmentation=None, section=None):
        assert len(boundaries) == len(ranks), "one boundary table per degree"
        assert boundaries[0] == [] or boundaries[0] == [{}] * ranks[0]
        self.group = group
        self.ranks = list(ranks)
        self._rows = boundaries
        self._homotopy_basis = homotopy_basis
        self._augmentation = augmentation
        self._section = section

    def top_degree(self):
        return len(self.ranks) - 1

    def rank(self, n):
        if 0 <= n <= self.top_degree():
            return self.ranks[n]
        return 0

    def boundary_rows(self, n):
        if not 1 <= n <= self.top_degree():
            raise DegreeOutOfRange("no boundary stored in degree %d" % n)
        return self._rows[n]

    def d(self, n, chain):
        """Boundary of a degree-n chain (degree 0 maps to zero)."""
        if n == 0:
            return {}
        rows = self.boundary_rows(n)
        out = {}
        for j, xi in chain.items():
            if xi.is_zero():
                continue
            for i, row in rows[j].items():
                term = xi * row
                cur = out.get(i)
                new = term if cur is None else cur + term
                if new.is_zero():
                    out.pop(i, None)
                else:
                    out[i] = new
        return out

    def h(self, n, chain):
        """Contracting homotopy on a degree-n chain, termwise Z-linear."""
        if self._homotopy_basis is None:
            raise MissingHomotopy("resolution carries no homotopy")
        if not 0 <= n < self.top_degree():
            raise DegreeOutOfRange("homotopy defined in degrees 0..%d"
                                   % (self.top_degree() - 1))
        out = {}
        for j, xi in chain.items():
            for g, c in xi.items():
                piece = self._homotopy_basis(n, j, g)
                if c != 1:
                    piece = chain_scale(piece, c)
                out = chain_add(out, piece)
        return out

    def aug(self, chain):
        if self._augmentation is None:
            raise MissingHomotopy("resolution carries no augmentation")
        return self._augmentation(chain)

    def section(self, c=1):
        if self._section is None:
            raise MissingHomotopy("resolution carries no section")
        return self._section(c)


# ---------------------------------------------------------------------------
# cyclic groups


def _cyclic_powers(x):
    """[x^0, x^1, ..., x^(q-1)] for x of finite order q."""
    ident = x * x.inverse()
    powers = [ident]
    cur = x
    while cur != ident:
        powers.append(cur)
        cur = cur * x
        assert len(powers) <= 10000, "element does not look finite order"
    return powers


def cyclic_resolution(q, twisted=False, generator=None, max_degree=12):
    """The periodic free resolution for a cyclic group of order q.

    Over Z[C_q] the trivial module has the standard period-2 resolution:
    odd boundaries multiply by x - 1, even ones by the norm
    1 + x + ... + x^(q-1).  With twisted=True (q must be even) the
    resolution is of the sign module Z^- instead: odd boundaries use
    x + 1, even ones the alternating norm sum (-1)^k x^k, and the
    augmentation picks up the sign character.  generator may be a
    concrete group element of order q (e.g. an SL2ZMatrix); by default an
    abstract CyclicElement is used.

    q = 1 is degenerate: the trivial group needs no resolving, so ranks
    are (1, 0, 0, ...).
    """
    if q < 1:
        raise FormatError("cyclic order must be positive")
    if twisted and q % 2:
        raise FormatError("the sign character needs an even cyclic group")
    x = generator if generator is not None else CyclicElement(q, 1)
    powers = _cyclic_powers(x)
    if len(powers) != q:
        raise FormatError("generator has order %d, not %d" % (len(powers), q))
    ident = powers[0]
    tag = ("cyclic", q, twisted, x)

    if q == 1:
        ranks = [1] + [0] * max_degree
        boundaries = [[]] + [[] for _ in range(max_degree)]

        def homotopy_basis(n, j, g):
            return {}

        def augmentation(chain):
            return sum(c for gre in chain.values() for _, c in gre.items())

        def section(c=1):
            return {0: GroupRingElement.unit(ident, c)}

        return FreeZGResolution(tag, ranks, boundaries, homotopy_basis,
                                augmentation, section)

    def chi(k):
        return -1 if (twisted and k % 2) else 1

    odd_mult = GroupRingElement([(x, 1), (ident, 1 if twisted else -1)])
    even_mult = GroupRingElement((powers[k], chi(k)) for k in range(q))

    # Partial norm sums used by the homotopy out of even degrees:
    # h(x^k) = sum_{i<k} x^i, with signs (-1)^(k-1-i) in the twisted case.
    even_h = []
    for k in range(q):
        if twisted:
            even_h.append(GroupRingElement(
                (powers[i], (-1) ** (k - 1 - i)) for i in range(k)))
        else:
            even_h.append(GroupRingElement(
                (powers[i], 1) for i in range(k)))
    # Homotopy out of odd degrees: only the top power maps anywhere.
    odd_h = [GroupRingElement.zero() for _ in range(q)]
    odd_h[q - 1] = GroupRingElement.unit(ident, -1 if twisted else 1)

    ranks = [1] * (max_degree + 1)
    boundaries = [[]]
    for n in range(1, max_degree + 1):
        boundaries.append([{0: odd_mult if n % 2 else even_mult}])

    index_of = {p: k for k, p in enumerate(powers)}

    def homotopy_basis(n, j, g):
        k = index_of[g]
        gre = even_h[k] if n % 2 == 0 else odd_h[k]
        if gre.is_zero():
            return {}
        return {0: gre}

    def augmentation(chain):
        total = 0
        for gre in chain.values():
            for g, c in gre.items():
                total += c * chi(index_of[g])
        return total

    def section(c=1):
        return {0: GroupRingElement.unit(ident, c)}

    return FreeZGResolution(tag, ranks, boundaries, homotopy_basis,
                            augmentation, section)


# ---------------------------------------------------------------------------
# induced columns: ZG tensored over a finite cyclic subgroup


class _InducedColumn:
    """Computational face of ZG (x)_{ZH} (periodic resolution), H = <s> cyclic.

    The induced module in each vertical degree is free of rank one over
    ZG; the vertical boundary is right multiplication by the stabilizer
    resolution's multiplier, and the contracting homotopy extends the
    subgroup one termwise through canonical coset representatives
    g = t * s^k.  cell_sign exposes the character sign picked up at the
    augmentation-to-cells level.
    """

    def __init__(self, s, order, twisted, res=None, max_degree=14):
        self.s = s
        self.order = order
        self.twisted = twisted
        self.powers = tuple(_cyclic_powers(s))
        if len(self.powers) != order:
            raise FormatError("stabilizer generator order mismatch")
        if res is None:
            res = cyclic_resolution(order, twisted=twisted, generator=s,
                                    max_degree=max_degree)
        if any(res.rank(n) > 1 for n in range(res.top_degree() + 1)):
            raise ShapeMismatch("stabilizer resolution must have rank one")
        self.res = res

    def mult(self, m):
        """Right multiplier of the vertical boundary out of degree m >= 1."""
        rows = self.res.boundary_rows(m)
        if not rows:
            return GroupRingElement.zero()
        return rows[0].get(0, GroupRingElement.zero())

    def decompose(self, g):
        """g = t * s^k with t the canonical coset representative."""
        return coset_normal_form(g, self.powers)

    def hv(self, m, gre):
        """Induced contracting homotopy, vertical degree m -> m + 1."""
        out = GroupRingElement.zero()
        for g, c in gre.items():
            t, k = self.decompose(g)
            piece = self.res.h(m, {0: GroupRingElement.unit(self.powers[k], c)})
            if piece:
                out = out + piece[0].left_mul(t)
        return out

    def cell_sign(self, k):
        return -1 if (self.twisted and k % 2) else 1

    def canon(self, g):
        """Canonical cell representative and character sign: g H = sign * t H."""
        t, k = self.decompose(g)
        return t, self.cell_sign(k)


# ---------------------------------------------------------------------------
# the SL2(Z) resolution


def sl2z_resolution(max_degree):
    """A free resolution of Z over Z[SL2(Z)] with contracting homotopy.

    Built from the action on the trivalent tree: the quotient is a single
    edge, so the resolution is the total complex of a two-column double
    complex, one column induced from the edge stabilizer <S> (order 4,
    with the orientation character) and one from the vertex stabilizer
    <U> (order 6, untwisted).  Ranks are (1, 2, 2, 2, ...): in degree
    n >= 1 generator 0 sits over the edge and generator 1 over the
    vertex.

    The horizontal boundary over the edge column is transported up degree
    by degree with the vertex column's homotopy; the contracting homotopy
    combines the tree's geodesic contraction with the columns' periodic
    homotopies.
    """
    if max_degree < 1:
        raise DegreeOutOfRange("need max_degree >= 1")
    edge_col = _InducedColumn(S, 4, True, max_degree=max_degree + 2)
    vert_col = _InducedColumn(U, 6, False, max_degree=max_degree + 2)

    v0 = GroupRingElement([(T, 1), (I, -1)])
    # v[q] intertwines the columns: v[q] * u_mult(q) == s_mult(q) * v[q-1].
    v = [v0]
    for q in range(1, max_degree):
        w = edge_col.mult(q) * v[q - 1]
        vq = vert_col.hv(q - 1, w)
        assert vq * vert_col.mult(q) == w, "column intertwiner failed at %d" % q
        v.append(vq)

    ranks = [1] + [2] * max_degree
    boundaries = [[]]
    for n in range(1, max_degree + 1):
        if n == 1:
            row_edge = {0: -v[0]}
            row_vert = {0: vert_col.mult(1)}
        else:
            sign = 1 if n % 2 == 0 else -1
            row_edge = {0: edge_col.mult(n - 1), 1: v[n - 1] * sign}
            row_vert = {1: vert_col.mult(n)}
        boundaries.append([_chain_clean(row_edge), _chain_clean(row_vert)])

    def tree_part(g):
        """Geodesic contraction of the vertex g<U>, as edge-column terms."""
        walk = tree_homotopy(TreeChain.vertex(g))
        return GroupRingElement(walk.items())

    def homotopy_basis(n, j, g):
        one = GroupRingElement.unit(g)
        if n == 0:
            hh = tree_part(g)
            x_part = -hh
            y_part = vert_col.hv(0, one) - vert_col.hv(0, hh * v[0])
            return _chain_clean({0: x_part, 1: y_part})
        if j == 0:
            p = edge_col.hv(n - 1, one)
            if p.is_zero():
                return {}
            q_part = vert_col.hv(n, p * v[n])
            if n % 2:
                q_part = -q_part
            return _chain_clean({0: p, 1: q_part})
        return _chain_clean({1: vert_col.hv(n, one)})

    def augmentation(chain):
        total = 0
        for gre in chain.values():
            total += gre.augmentation()
        return total

    def section(c=1):
        return {0: GroupRingElement.unit(I, c)}

    group = CongruenceSubgroup.gamma0(1)
    return FreeZGResolution(group, ranks, boundaries, homotopy_basis,
                            augmentation, section)


# ---------------------------------------------------------------------------
# equivariant cell complexes


class CellOrbit:
    """One orbit of cells: stabilizer data and the attaching words.

    stabilizer_generator generates the (finite cyclic) stabilizer of the
    chosen orbit representative; twisted says whether the stabilizer
    reverses the cell's orientation (the orientation character sends the
    generator to -1).  boundary lists (target orbit index, word) pairs
    with words in the group ring; 0-cells have an empty list.
    """

    def __init__(self, name, stabilizer_generator, stabilizer_order,
                 twisted, boundary):
        self.name = name
        self.stabilizer_generator = stabilizer_generator
        self.stabilizer_order = stabilizer_order
        self.twisted = twisted
        self.boundary = boundary


class CellChain:
    """A Z-linear combination of cells of one dimension.

    Terms are kept canonical: each cell g.e is stored under its canonical
    coset representative with the orientation sign folded into the
    coefficient, so chains equal in the cell complex compare equal here.
    """

    __slots__ = ("cx", "dim", "terms")

    def __init__(self, cx, dim):
        self.cx = cx
        self.dim = dim
        self.terms = {}

    def add(self, orbit, g, coeff=1):
        if not coeff:
            return self
        rep, sign = self.cx.canon(self.dim, orbit, g)
        key = (orbit, rep)
        new = self.terms.get(key, 0) + sign * coeff
        if new:
            self.terms[key] = new
        else:
            del self.terms[key]
        return self

    def items(self):
        return self.terms.items()

    def is_zero(self):
        return not self.terms

    def coefficient_sum(self):
        return sum(self.terms.values())

    def __add__(self, other):
        assert self.cx is other.cx and self.dim == other.dim
        out = CellChain(self.cx, self.dim)
        out.terms = dict(self.terms)
        for (orbit, rep), c in other.terms.items():
            key = (orbit, rep)
            new = out.terms.get(key, 0) + c
            if new:
                out.terms[key] = new
            else:
                del out.terms[key]
        return out

    def __neg__(self):
        out = CellChain(self.cx, self.dim)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return (isinstance(other, CellChain) and self.dim == other.dim
                and self.terms == other.terms)

    def __repr__(self):
        return "CellChain(dim=%d, %r)" % (self.dim, self.terms)


class EquivariantCellComplex:
    """A finite-orbit G-cell complex with cyclic stabilizers.

    cells[p] lists the CellOrbits of dimension p.  homotopy, when present,
    is a Z-linear map CellChain -> CellChain raising dimension by one and
    contracting the complex to the basepoint 0-cell orbit: it must satisfy
    d h + h d = 1 - (coefficient sum) . basepoint.  boundary_orbits marks
    a subcomplex (dimension -> orbit indices), used for the horocycle
    boundary of the compactified complex.
    """

    def __init__(self, cells, homotopy=None, basepoint=0,
                 boundary_orbits=None):
        self.cells = cells
        self.homotopy = homotopy
        self.basepoint = basepoint  # orbit index among 0-cells
        self.boundary_orbits = boundary_orbits or {}
        self._powers = {}
        for p, orbits in enumerate(cells):
            for i, orb in enumerate(orbits):
                powers = tuple(_cyclic_powers(orb.stabilizer_generator))
                if len(powers) != orb.stabilizer_order:
                    raise FormatError("stabilizer order mismatch on %s"
                                      % orb.name)
                if orb.twisted and orb.stabilizer_order % 2:
                    raise FormatError("orientation character needs even order")
                self._powers[(p, i)] = powers

    def dim(self):
        return len(self.cells) - 1

    def orbit(self, p, i):
        return self.cells[p][i]

    def stab_powers(self, p, i):
        return self._powers[(p, i)]

    def canon(self, p, i, g):
        """Canonical representative and orientation sign of the cell g.e."""
        powers = self._powers[(p, i)]
        rep, k = coset_normal_form(g, powers)
        orb = self.cells[p][i]
        sign = -1 if (orb.twisted and k % 2) else 1
        return rep, sign

    def chain(self, dim):
        return CellChain(self, dim)

    def boundary_chain(self, x):
        """The cellular boundary of a CellChain."""
        out = CellChain(self, x.dim - 1)
        if x.dim == 0:
            return out
        for (i, rep), c in x.items():
            for j, word in self.cells[x.dim][i].boundary:
                for g, cg in word.items():
                    out.add(j, rep * g, c * cg)
        return out

    def verify(self):
        """Check the two assembly preconditions.

        (1) the attaching words compose to zero over ZG exactly, and
        (2) each attaching word is stabilizer compatible: the cell image
            of (s - chi(s)) . word vanishes for the stabilizer generator s.
        Raises CompositionNonzero / FormatError on failure.
        """
        for p in range(2, self.dim() + 1):
            for i, orb in enumerate(self.cells[p]):
                acc = {}
                for j, word in orb.boundary:
                    for k, word2 in self.cells[p - 1][j].boundary:
                        term = word * word2
                        cur = acc.get(k)
                        new = term if cur is None else cur + term
                        acc[k] = new
                for k, gre in acc.items():
                    if not gre.is_zero():
                        raise CompositionNonzero(
                            "attaching words of %s do not compose to zero"
                            % orb.name)
        for p in range(1, self.dim() + 1):
            for i, orb in enumerate(self.cells[p]):
                s = orb.stabilizer_generator
                chi = -1 if orb.twisted else 1
                for j, word in orb.boundary:
                    moved = word.left_mul(s) - word * chi
                    img = self.chain(p - 1)
                    for g, c in moved.items():
                        img.add(j, g, c)
                    if not img.is_zero():
                        raise FormatError(
                            "attaching word of %s is not stabilizer "
                            "compatible" % orb.name)

    def sub_complex(self, keep):
        """The subcomplex spanned by keep = {dim: [orbit indices]}.

        Orbits are reindexed; no homotopy or basepoint carries over (the
        subcomplex is usually not contractible).
        """
        top = max(keep) if keep else 0
        new_cells = []
        remap = {}
        for p in range(top + 1):
            chosen = sorted(keep.get(p, []))
            for new_i, old_i in enumerate(chosen):
                remap[(p, old_i)] = new_i
            row = []
            for old_i in chosen:
                orb = self.cells[p][old_i]
                bnd = []
                for j, word in orb.boundary:
                    if (p - 1, j) not in remap:
                        raise FormatError(
                            "kept orbit %s attaches outside the subcomplex"
                            % orb.name)
                    bnd.append((remap[(p - 1, j)], word))
                row.append(CellOrbit(orb.name, orb.stabilizer_generator,
                                     orb.stabilizer_order, orb.twisted, bnd))
            new_cells.append(row)
        return EquivariantCellComplex(new_cells)

    def boundary_subcomplex(self):
        if not self.boundary_orbits:
            raise FormatError("complex has no marked boundary")
        return self.sub_complex(self.boundary_orbits)


def borel_serre_complex():
    """The equivariant cell structure on the bordified upper half plane.

    Two orbits of 0-cells: the corner point (stabilizer <U> of order 6)
    and a horocycle vertex (stabilizer <-1>).  Three orbits of 1-cells:
    the arc between corners (stabilizer <S> of order 4, orientation
    reversing), the vertical segment joining corner to horocycle, and the
    horocycle edge itself.  One orbit of 2-cells (the strip between
    consecutive verticals).  The horocycle orbits form the marked
    boundary; collapsing them recovers the tree.

    The returned complex carries a contracting homotopy built from the
    tree's geodesic contraction, so wall_resolution can produce a full
    resolution with homotopy from it.
    """
    minus_i = SL2ZMatrix(-1, 0, 0, -1)
    t_minus_1 = GroupRingElement([(T, 1), (I, -1)])
    one = GroupRingElement.unit(I)

    corner = CellOrbit("corner", U, 6, False, [])
    horo_v = CellOrbit("horo_vertex", minus_i, 2, False, [])
    arc = CellOrbit("arc", S, 4, True, [(0, t_minus_1)])
    vertical = CellOrbit("vertical", minus_i, 2, False,
                         [(0, -one), (1, one)])
    horo_e = CellOrbit("horo_edge", minus_i, 2, False, [(1, t_minus_1)])
    strip = CellOrbit("strip", minus_i, 2, False,
                      [(0, one), (1, t_minus_1), (2, -one)])

    cells = [[corner, horo_v], [arc, vertical, horo_e], [strip]]
    cx = EquivariantCellComplex(cells, basepoint=0,
                                boundary_orbits={0: [1], 1: [2]})

    def add_tree_part(out, rep, c):
        # geodesic contraction of the corner vertex rep<U> to the base
        # corner, written in arc cells
        walk = tree_homotopy(TreeChain.vertex(rep, c))
        for g, cc in walk.items():
            out.add(0, g, cc)

    def homotopy(x):
        out = cx.chain(x.dim + 1)
        if x.dim == 0:
            for (i, rep), c in x.items():
                if i == 1:
                    # slide the horocycle vertex down its vertical, then
                    # contract the corner below it
                    out.add(1, rep, c)
                add_tree_part(out, rep, c)
        elif x.dim == 1:
            for (i, rep), c in x.items():
                if i == 2:
                    # a horocycle edge is swept to the arcs by its strip
                    out.add(0, rep, -c)
        return out

    cx.homotopy = homotopy
    cx.verify()
    return cx


def tree_cell_complex():
    """The trivalent tree as a G-cell complex: one vertex and one edge orbit.

    A minimal contractible input for wall_resolution; the assembled
    resolution has ranks (1, 2, 2, ...) and the same homology as
    sl2z_resolution.
    """
    vertex = CellOrbit("vertex", U, 6, False, [])
    edge = CellOrbit("edge", S, 4, True,
                     [(0, GroupRingElement([(T, 1), (I, -1)]))])
    cx = EquivariantCellComplex([[vertex], [edge]], basepoint=0)

    def homotopy(x):
        out = cx.chain(x.dim + 1)
        if x.dim == 0:
            for (i, rep), c in x.items():
                walk = tree_homotopy(TreeChain.vertex(rep, c))
                for g, cc in walk.items():
                    out.add(0, g, cc)
        return out

    cx.homotopy = homotopy
    cx.verify()
    return cx


# ---------------------------------------------------------------------------
# the assembly: resolution from a contractible cell complex


# The correction series of the transferred contraction alternates sign:
# tail term k is (-H delta)^k applied to the leading part.  Verified
# degree by degree against d h + h d = 1 in the test suite.
_PERTURBATION_SIGN = -1


def wall_resolution(X, max_degree, stabilizers=None, check=True):
    """Assemble a free ZG-resolution from a contractible G-cell complex.

    X is an EquivariantCellComplex with finite cyclic stabilizers; the
    degree-n module has one generator per orbit pair (p, q) with
    p + q = n, p the cell dimension and q the vertical degree in the
    stabilizer's periodic resolution.  The differential is d0 + d1 + d2:
    d0 is the vertical boundary, d1 transports the attaching words up the
    columns, and d2 is the correction making the square zero; both are
    produced degree by degree with the column homotopies.

    stabilizers may override the per-orbit stabilizer resolutions as a
    dict {(p, i): FreeZGResolution}.  The contracting homotopy needs
    X.homotopy; without one the resolution is still built, but calling
    h() raises MissingHomotopy.

    check=True verifies the assembly preconditions on X first.
    """
    if check:
        X.verify()
    dim = X.dim()
    cols = {}
    for p in range(dim + 1):
        for i, orb in enumerate(X.cells[p]):
            res = None if stabilizers is None else stabilizers.get((p, i))
            cols[(p, i)] = _InducedColumn(
                orb.stabilizer_generator, orb.stabilizer_order, orb.twisted,
                res=res, max_degree=max_degree + 2)

    # generator tables: degree n lists (p, i) with q = n - p implied
    gens = []
    index = []
    for n in range(max_degree + 1):
        table = [(p, i) for p in range(min(n, dim) + 1)
                 for i in range(len(X.cells[p]))]
        gens.append(table)
        index.append({pi: k for k, pi in enumerate(table)})

    # d1[(p, i, q)]: {target orbit j in dim p-1: GroupRingElement}, the
    # transported attaching word at vertical degree q; d2 likewise two
    # dimensions down.
    d1 = {}
    d2 = {}

    for q in range(max_degree + 1):
        for p in range(1, dim + 1):
            for i, orb in enumerate(X.cells[p]):
                if q == 0:
                    row = {}
                    for j, word in orb.boundary:
                        cur = row.get(j)
                        row[j] = word if cur is None else cur + word
                    d1[(p, i, 0)] = {j: w for j, w in row.items()
                                     if not w.is_zero()}
                else:
                    m = cols[(p, i)].mult(q)
                    acc = {}
                    for j, a in d1[(p, i, q - 1)].items():
                        term = m * a
                        if not term.is_zero():
                            acc[j] = term
                    row = {}
                    for j, w in acc.items():
                        lifted = -cols[(p - 1, j)].hv(q - 1, w)
                        if not lifted.is_zero():
                            row[j] = lifted
                    d1[(p, i, q)] = row
        for p in range(2, dim + 1):
            for i, orb in enumerate(X.cells[p]):
                acc = {}

                def accum(j, gre):
                    cur = acc.get(j)
                    new = gre if cur is None else cur + gre
                    if new.is_zero():
                        acc.pop(j, None)
                    else:
                        acc[j] = new

                for j, a in d1[(p, i, q)].items():
                    for k, b in d1[(p - 1, j, q)].items():
                        accum(k, a * b)
                if q > 0:
                    m = cols[(p, i)].mult(q)
                    for k, b in d2[(p, i, q - 1)].items():
                        accum(k, m * b)
                row = {}
                for k, w in acc.items():
                    lifted = -cols[(p - 2, k)].hv(q, w)
                    if not lifted.is_zero():
                        row[k] = lifted
                d2[(p, i, q)] = row

    ranks = [len(t) for t in gens]
    boundaries = [[]]
    for n in range(1, max_degree + 1):
        rows = []
        for (p, i) in gens[n]:
            q = n - p
            row = {}
            if q >= 1:
                m = cols[(p, i)].mult(q)
                if not m.is_zero():
                    row[index[n - 1][(p, i)]] = m
            for j, w in d1.get((p, i, q), {}).items():
                row[index[n - 1][(p - 1, j)]] = w
            for k, w in d2.get((p, i, q), {}).items():
                row[index[n - 1][(p - 2, k)]] = w
            rows.append(row)
        boundaries.append(rows)

    ident = I if isinstance(X.cells[0][0].stabilizer_generator, SL2ZMatrix) \
        else _cyclic_powers(X.cells[0][0].stabilizer_generator)[0]

    def apply_H(chain, deg):
        """Column homotopies on a degree-deg pq-chain {(p, i): gre}."""
        out = {}
        for (p, i), gre in chain.items():
            lifted = cols[(p, i)].hv(deg - p, gre)
            if not lifted.is_zero():
                out[(p, i)] = lifted
        return out

    def apply_P(chain, deg):
        """Per-column augmentation onto the cells of dimension deg."""
        out = X.chain(deg)
        for (p, i), gre in chain.items():
            if p != deg:
                continue
            for g, c in gre.items():
                out.add(i, g, c)
        return out

    def apply_I(cell_chain):
        out = {}
        for (i, rep), c in cell_chain.items():
            key = (cell_chain.dim, i)
            cur = out.get(key)
            term = GroupRingElement.unit(rep, c)
            out[key] = term if cur is None else cur + term
        return out

    def apply_delta(chain, deg):
        """The d1 + d2 part of the boundary on a pq-chain."""
        out = {}

        def accum(key, gre):
            cur = out.get(key)
            new = gre if cur is None else cur + gre
            if new.is_zero():
                out.pop(key, None)
            else:
                out[key] = new

        for (p, i), xi in chain.items():
            q = deg - p
            for j, w in d1.get((p, i, q), {}).items():
                accum((p - 1, j), xi * w)
            for k, w in d2.get((p, i, q), {}).items():
                accum((p - 2, k), xi * w)
        return out

    def homotopy_basis(n, gen_idx, g):
        if X.homotopy is None:
            raise MissingHomotopy("cell complex carries no contraction")
        p, i = gens[n][gen_idx]
        start = {(p, i): GroupRingElement.unit(g)}
        base = apply_H(start, n)
        for key, gre in apply_I(X.homotopy(apply_P(start, n))).items():
            cur = base.get(key)
            new = gre if cur is None else cur + gre
            if new.is_zero():
                base.pop(key, None)
            else:
                base[key] = new
        total = dict(base)
        z = base
        for _ in range(dim + 2):
            z = apply_H(apply_delta(z, n + 1), n)
            if _PERTURBATION_SIGN != 1:
                z = {k: gre * _PERTURBATION_SIGN for k, gre in z.items()}
            if not z:
                break
            for key, gre in z.items():
                cur = total.get(key)
                new = gre if cur is None else cur + gre
                if new.is_zero():
                    total.pop(key, None)
                else:
                    total[key] = new
        else:
            raise CompositionNonzero("homotopy tail failed to terminate")
        out = {}
        for (p2, i2), gre in total.items():
            if not gre.is_zero():
                out[index[n + 1][(p2, i2)]] = gre
        return out

    def augmentation(chain):
        pq = {gens[0][idx]: gre for idx, gre in chain.items()}
        return apply_P(pq, 0).coefficient_sum()

    base_idx = index[0][(0, X.basepoint)]

    def section(c=1):
        return {base_idx: GroupRingElement.unit(ident, c)}

    group = (CongruenceSubgroup.gamma0(1)
             if isinstance(ident, SL2ZMatrix) else ("cell", id(X)))
    return FreeZGResolution(group, ranks, boundaries, homotopy_basis,
                            augmentation, section)


# ---------------------------------------------------------------------------
# boundary components of the quotient


def boundary_components(X, gamma):
    """Connected components of the quotient of X's marked boundary by gamma.

    For the compactified complex this is the number of cusps of the
    subgroup.  Works with the dimension-0 and dimension-1 boundary orbits
    and a union-find over their gamma-orbits.
    """
    if not X.boundary_orbits:
        raise FormatError("complex has no marked boundary")
    trans = transversal(gamma)

    def cell_id(dim, orbit, g):
        powers = X.stab_powers(dim, orbit)
        return (orbit, min(trans.index_of(g * p) for p in powers))

    verts = set()
    for i in X.boundary_orbits.get(0, []):
        for t in range(len(trans)):
            verts.add(cell_id(0, i, trans.rep(t)))
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for j in X.boundary_orbits.get(1, []):
        ends_words = X.cells[1][j].boundary
        for t in range(len(trans)):
            rep = trans.rep(t)
            ends = []
            for tgt, word in ends_words:
                for g, c in word.items():
                    ends.append(cell_id(0, tgt, rep * g))
            for a, b in zip(ends, ends[1:]):
                union(a, b)
    return sum(1 for v in verts if find(v) == v)


# ---------------------------------------------------------------------------
# restriction to finite index subgroups


def restrict_resolution(resolution, gamma, trans=None):
    """View a ZG-resolution as a Z[gamma]-resolution along a transversal.

    Each rank-r module restricts to rank r * [G : gamma]; the generator
    (b, t) corresponds to e_b tensored with the t-th coset representative.
    Boundary entries are rewritten through the transversal's lookup, and
    the homotopy is conjugated through the same unfolding, so the
    restricted resolution again carries d, h, augmentation and section.
    """
    if trans is None:
        trans = transversal(gamma)
    nt = len(trans)
    top = resolution.top_degree()
    ranks = [resolution.rank(n) * nt for n in range(top + 1)]

    boundaries = [[]]
    for n in range(1, top + 1):
        rows_g = resolution.boundary_rows(n)
        rows = []
        for b in range(resolution.rank(n)):
            base_row = rows_g[b]
            for t in range(nt):
                rep = trans.rep(t)
                row = {}
                for i, gre in base_row.items():
                    for g, c in gre.items():
                        ti, gam = trans.lookup(rep * g)
                        key = i * nt + ti
                        cur = row.get(key)
                        term = GroupRingElement.unit(gam, c)
                        new = term if cur is None else cur + term
                        if new.is_zero():
                            row.pop(key, None)
                        else:
                            row[key] = new
                rows.append(row)
        boundaries.append(rows)

    def unfold(n, chain):
        out = {}
        for idx, gre in chain.items():
            b, t = divmod(idx, nt)
            rep = trans.rep(t)
            cur = out.get(b)
            moved = gre * rep
            new = moved if cur is None else cur + moved
            if new.is_zero():
                out.pop(b, None)
            else:
                out[b] = new
        return out

    def refold(chain):
        out = {}
        for b, gre in chain.items():
            for g, c in gre.items():
                ti, gam = trans.lookup(g)
                key = b * nt + ti
                cur = out.get(key)
                term = GroupRingElement.unit(gam, c)
                new = term if cur is None else cur + term
                if new.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = new
        return out

    def homotopy_basis(n, gen_idx, g):
        b, t = divmod(gen_idx, nt)
        lifted = resolution.h(
            n, {b: GroupRingElement.unit(g * trans.rep(t))})
        return refold(lifted)

    def augmentation(chain):
        return resolution.aug(unfold(0, chain))

    def section(c=1):
        return refold(resolution.section(c))

    return FreeZGResolution(gamma, ranks, boundaries, homotopy_basis,
                            augmentation, section)


# ---------------------------------------------------------------------------
# passage to integral chain complexes


def tensor_with_z(resolution):
    """Z tensored over the group ring with the resolution.

    Group elements all act as 1, so each boundary entry collapses to its
    coefficient sum; the result is a FreeChainComplexZ whose homology is
    the group homology of resolution.group with trivial Z coefficients.
    """
    top = resolution.top_degree()
    ranks = [resolution.rank(n) for n in range(top + 1)]
    diffs = []
    for n in range(1, top + 1):
        rows = resolution.boundary_rows(n)
        mat = IntMatrix.zeros(ranks[n - 1], ranks[n])
        for j, row in enumerate(rows):
            for i, gre in row.items():
                val = gre.augmentation()
                if val:
                    mat.data[i][j] = val
        diffs.append(mat)
    return FreeChainComplexZ(ranks, diffs)


def dump_resolution(resolution, out):
    """Write ranks and boundary rows in a stable text form.

    One line per (degree, source, target) triple carrying the group ring
    entry in GroupRingElement.to_str form; suitable for diffing runs
    against each other.
    """
    out.write("ranks %s\n" % " ".join(
        str(resolution.rank(n)) for n in range(resolution.top_degree() + 1)))
    for n in range(1, resolution.top_degree() + 1):
        rows = resolution.boundary_rows(n)
        for j, row in enumerate(rows):
            for i in sorted(row):
                out.write("d %d %d %d %s\n" % (n, j, i, row[i].to_str()))
