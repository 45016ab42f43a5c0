"""Coefficient modules of homogeneous forms; cochain complexes; cohomology.

P(k) is the module of integral homogeneous degree-k forms in two
variables, with the substitution action gamma . p = p(d x - b y, -c x + a y)
for gamma = [[a, b], [c, d]].  The monomial basis is ordered
x^k, x^(k-1) y, ..., y^k; on it the action is by integer matrices, and
M(gamma gamma') = M(gamma) M(gamma') (a left action; the property test in
the suite pins this convention).  The definition makes sense for any
integral 2x2 matrix of nonzero determinant, which is what the double coset
operators need; for group elements the matrices are invertible over Z.

hom_complex turns a free resolution over a matrix group into the integer
cochain complex Hom_{Z Gamma}(R_*, P(k)): one block column per resolution
generator, coboundary = boundary rows with each group ring element
replaced by its action matrix.  cohomology reads off the abelian
invariants of a single degree; as_chain_complex reverses arrows so the
reduction machinery in chaincx can be applied first when the complex is
large.
"""

from functools import lru_cache
from math import comb

from .chaincx import FreeChainComplexZ
from .congruence import CongruenceSubgroup
from .errors import (
    ActionMismatch,
    CompositionNonzero,
    DegreeOutOfRange,
    FormatError,
)
from .exactlin import AbelianInvariants, IntMatrix, homology_of_pair
from .sl2z import SL2ZMatrix


def _entries(gamma):
    """The four integer entries of a 2x2 matrix in any accepted form."""
    if isinstance(gamma, SL2ZMatrix):
        return (gamma.a, gamma.b, gamma.c, gamma.d)
    if isinstance(gamma, (tuple, list)):
        if len(gamma) == 4:
            a, b, c, d = gamma
        elif len(gamma) == 2 and len(gamma[0]) == 2 and len(gamma[1]) == 2:
            (a, b), (c, d) = gamma
        else:
            raise FormatError("expected a 2x2 integer matrix")
        if all(isinstance(v, int) for v in (a, b, c, d)):
            return (a, b, c, d)
    raise FormatError("expected a 2x2 integer matrix, got %r" % (gamma,))


@lru_cache(maxsize=1 << 14)
def _action_matrix(entries, k):
    a, b, c, d = entries
    n = k + 1
    out = IntMatrix.zeros(n, n)
    # column i: the image of x^(k-i) y^i under the substitution
    # x -> d x - b y, y -> -c x + a y, expanded binomially
    for i in range(n):
        for r in range(k - i + 1):
            cr = comb(k - i, r) * d ** (k - i - r) * (-b) ** r
            if not cr:
                continue
            for s in range(i + 1):
                cs = comb(i, s) * (-c) ** (i - s) * a ** s
                if not cs:
                    continue
                out.data[r + s][i] += cr * cs
    return out


def action_matrix(gamma, k):
    """Matrix of gamma on degree-k forms, in the monomial basis.

    Accepts an SL2ZMatrix, a 4-tuple (a, b, c, d) or a nested pair of
    rows.  The returned matrix is cached and shared: treat it as
    read-only.
    """
    if k < 0:
        raise FormatError("form degree must be nonnegative")
    return _action_matrix(_entries(gamma), k)


class PolynomialModule:
    """Degree-k integral forms with the substitution action.

    group, when set, restricts which resolutions the module may be paired
    with in hom_complex; None accepts any matrix group.  For even k the
    central -1 acts trivially, for odd k it acts by -1 (so odd-k
    cohomology of a group containing -1 is all torsion).
    """

    def __init__(self, k, group=None):
        if k < 0:
            raise FormatError("form degree must be nonnegative")
        self.k = k
        self.group = group

    @property
    def rank(self):
        return self.k + 1

    def action(self, gamma):
        return action_matrix(gamma, self.k)

    def __repr__(self):
        return "PolynomialModule(%d)" % self.k


class CochainComplexZ:
    """A finite cochain complex of free Z-modules.

    deltas[n] maps degree n to degree n + 1 (acting on column vectors of
    stacked module coordinates).  as_chain_complex reverses the grading so
    the chain-complex tooling applies.
    """

    def __init__(self, ranks, deltas):
        if len(deltas) != max(len(ranks) - 1, 0):
            raise FormatError("expected %d coboundaries, got %d"
                              % (max(len(ranks) - 1, 0), len(deltas)))
        for n, mat in enumerate(deltas):
            if mat.cols != ranks[n] or mat.rows != ranks[n + 1]:
                raise FormatError("coboundary %d has shape %dx%d, expected "
                                  "%dx%d" % (n, mat.rows, mat.cols,
                                             ranks[n + 1], ranks[n]))
        self.ranks = list(ranks)
        self.deltas = list(deltas)

    def top_degree(self):
        return len(self.ranks) - 1

    def as_chain_complex(self):
        """The same maps with the grading reversed (degree n -> top - n)."""
        return FreeChainComplexZ(list(reversed(self.ranks)),
                                 list(reversed(self.deltas)))


def hom_complex(resolution, module):
    """Hom over the group ring from a free resolution into P(k).

    A ZG-map out of a rank-r free module is determined by the images of
    the r generators, so the degree-n cochains are M^(r_n); the coboundary
    substitutes action matrices for group elements in the boundary rows.
    Raises ActionMismatch when the resolution is not over a matrix group
    or the module is pinned to a different group.
    """
    if not isinstance(resolution.group, CongruenceSubgroup):
        raise ActionMismatch("resolution is not over a matrix group: %r"
                             % (resolution.group,))
    if module.group is not None and module.group != resolution.group:
        raise ActionMismatch("module is pinned to %s, resolution is over %s"
                             % (module.group, resolution.group))
    m = module.rank
    top = resolution.top_degree()
    ranks = [resolution.rank(n) * m for n in range(top + 1)]
    deltas = []
    for n in range(top):
        rows_zg = resolution.boundary_rows(n + 1)
        out = IntMatrix.zeros(ranks[n + 1], ranks[n])
        for j, row in enumerate(rows_zg):
            for i, gre in row.items():
                block = [[0] * m for _ in range(m)]
                for g, c in gre.items():
                    act = module.action(g)
                    for r in range(m):
                        arow = act.data[r]
                        brow = block[r]
                        for s in range(m):
                            if arow[s]:
                                brow[s] += c * arow[s]
                for r in range(m):
                    orow = out.data[j * m + r]
                    brow = block[r]
                    for s in range(m):
                        if brow[s]:
                            orow[i * m + s] = brow[s]
        deltas.append(out)
    C = CochainComplexZ(ranks, deltas)
    _spot_check_squares(C)
    return C


def _spot_check_squares(C):
    # cheap always-on guard: delta(delta(v)) on a deterministic +-1 vector
    # (full matrix products are verified in the test suite on small inputs)
    for n in range(len(C.deltas) - 1):
        v = [1 if (i * 2654435761) % 3 != 1 else -1
             for i in range(C.ranks[n])]
        w = C.deltas[n + 1].apply(C.deltas[n].apply(v))
        if any(w):
            raise CompositionNonzero("coboundary square is nonzero in "
                                     "degree %d" % n)


def cohomology(C, n):
    """Abelian invariants of H^n of a CochainComplexZ.

    The top degree is computed against a zero outgoing map, so it reflects
    the truncation of the underlying resolution; ask one degree below the
    resolution's top for the genuine group cohomology.
    """
    top = C.top_degree()
    if not 0 <= n <= top:
        raise DegreeOutOfRange("degree %d outside 0..%d" % (n, top))
    dout = C.deltas[n] if n < top else IntMatrix.zeros(0, C.ranks[top])
    din = C.deltas[n - 1] if n >= 1 else IntMatrix.zeros(C.ranks[0], 0)
    return homology_of_pair(dout, din)
