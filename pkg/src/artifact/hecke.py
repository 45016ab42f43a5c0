"""Hecke operators on the cohomology of congruence subgroups.

A 2x2 integer matrix g with positive determinant acts on H^n(Gamma, M)
through the subgroup Gamma' = Gamma intersect g Gamma g^{-1}: a cochain is
restricted to the conjugate subgroup g^{-1} Gamma' g, pulled back through
a chain map intertwining gamma -> g^{-1} gamma g, hit with g on the
coefficients, and summed over coset translates (the transfer).  All three
steps happen at the cochain level of a free resolution whose contracting
homotopy supplies the chain map, so the composite is an integer matrix on
cochains; it descends to an adapted basis of the cohomology lattice.

Normalization: the classical operator T_n has the rational representative
diag(1, 1/n); this module uses the primitive integral matrix diag(n, 1),
the same point of PGL2(Q)+.  Conjugation only sees the projective class.
The coefficient action of g uses the integral matrix, which for weight 2
(trivial coefficients) is invisible, so those eigenvalues are the
classical ones; in higher weight this pins one specific integral
normalization, and structural facts (commutativity, cocycle preservation,
integrality) are normalization independent.
"""

from collections import deque
from dataclasses import dataclass, field

from .coeffmod import PolynomialModule, hom_complex
from .congruence import generators
from .errors import (DegreeOutOfRange, FormatError, InfiniteIndex,
                     MissingPrime, NotInGroup)
from .exactlin import (IntMatrix, QuotientLattice, integer_kernel,
                       charpoly, integer_roots, solve_matrix)
from .resolutions import (FreeZGResolution, GroupRingElement, chain_add,
                          chain_scale, chains_equal, restrict_resolution,
                          sl2z_resolution)
from .sl2z import I as IDENT, SL2ZMatrix


def _gl2_entries(g):
    """Normalize a 2x2 integer matrix given as SL2ZMatrix, flat 4-tuple,
    or nested rows to a flat (a, b, c, d) tuple."""
    if isinstance(g, SL2ZMatrix):
        return g.entries()
    flat = []
    for part in g:
        if isinstance(part, (list, tuple)):
            flat.extend(part)
        else:
            flat.append(part)
    if len(flat) != 4:
        raise FormatError("expected a 2x2 integer matrix, got %r" % (g,))
    return tuple(int(x) for x in flat)


def _conjugated(gent, A):
    """g^{-1} A g as an SL2ZMatrix, or None when it is not integral.

    g^{-1} = adj(g) / det(g), so the conjugate is integral exactly when
    every entry of adj(g) * A * g is divisible by det(g).  Conjugation
    preserves the determinant, so the result is a genuine SL2 matrix.
    """
    a, b, c, d = gent
    det = a * d - b * c
    # adj(g) * A
    qa = d * A.a - b * A.c
    qb = d * A.b - b * A.d
    qc = -c * A.a + a * A.c
    qd = -c * A.b + a * A.d
    # (adj(g) * A) * g
    ra = qa * a + qb * c
    rb = qa * b + qb * d
    rc = qc * a + qd * c
    rd = qc * b + qd * d
    if ra % det or rb % det or rc % det or rd % det:
        return None
    return SL2ZMatrix(ra // det, rb // det, rc // det, rd // det)


def hecke_representative(n):
    """The primitive integral representative diag(n, 1) of T_n.

    For prime n this is the classical Hecke operator at n; for composite
    n it is the double-coset operator of diag(n, 1) alone.
    """
    n = int(n)
    if n < 1:
        raise FormatError("operator index must be >= 1, got %d" % n)
    return (n, 0, 0, 1)


@dataclass
class HeckeDescriptor:
    """Subgroup data determining a Hecke operator.

    g is an integral 2x2 matrix with det > 0; reps are left coset
    representatives of Gamma' = Gamma intersect g Gamma g^{-1} in Gamma
    with reps[0] the identity, so Gamma is the disjoint union of the
    reps[i] Gamma'.
    """

    group: object
    g: tuple
    det: int
    reps: list

    @property
    def index(self):
        return len(self.reps)

    def member(self, A):
        """Membership in Gamma': A in Gamma and g^{-1} A g integral and in Gamma."""
        if not self.group.member(A):
            return False
        conj = _conjugated(self.g, A)
        return conj is not None and self.group.member(conj)

    def conjugate(self, A):
        """The homomorphism gamma -> g^{-1} gamma g on Gamma'."""
        conj = _conjugated(self.g, A)
        if conj is None:
            raise NotInGroup("conjugate by g is not integral")
        return conj


def gamma_prime_data(gamma, g, max_cosets=10 ** 6):
    """Coset data for Gamma' = Gamma intersect g Gamma g^{-1} inside Gamma.

    Left coset representatives are enumerated by breadth-first search from
    the identity over the generators of gamma and their inverses; x and y
    represent the same left coset exactly when x^{-1} y lies in Gamma'.
    Raises FormatError when det(g) <= 0 and InfiniteIndex when more than
    max_cosets cosets appear before the search closes.
    """
    gent = _gl2_entries(g)
    det = gent[0] * gent[3] - gent[1] * gent[2]
    if det <= 0:
        raise FormatError("determinant must be positive, got %d" % det)
    desc = HeckeDescriptor(gamma, gent, det, [IDENT])
    gens = generators(gamma)
    gens = gens + [s.inverse() for s in gens]
    queue = deque([IDENT])
    while queue:
        t = queue.popleft()
        for s in gens:
            x = s * t
            if any(desc.member(r.inverse() * x) for r in desc.reps):
                continue
            if len(desc.reps) >= max_cosets:
                raise InfiniteIndex("more than %d cosets of Gamma' in Gamma"
                                    % max_cosets)
            desc.reps.append(x)
            queue.append(x)
    return desc


class _SubgroupTransversal:
    """Right-coset transversal of Gamma' in Gamma from a HeckeDescriptor.

    restrict_resolution wants decompositions x = gamma' * rep_i.  The reps
    here are the inverses of the descriptor's left reps, so the index i
    names the same coset on both sides, and lookups scan the (small) list
    with the membership test, caching by matrix entries.
    """

    def __init__(self, desc):
        self.desc = desc
        self.lefts = list(desc.reps)
        self.reps_ = [t.inverse() for t in desc.reps]
        self._cache = {}

    def __len__(self):
        return len(self.reps_)

    def rep(self, i):
        return self.reps_[i]

    def lookup(self, x):
        """(i, gamma') with x = gamma' * rep(i)."""
        key = x.entries()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        for i, left in enumerate(self.lefts):
            gam = x * left  # x * rep(i)^{-1}
            if self.desc.member(gam):
                self._cache[key] = (i, gam)
                return (i, gam)
        raise NotInGroup("element lies in no enumerated coset")


class EquivariantChainMap:
    """A chain map between free resolutions, semilinear over phi.

    source and target are FreeZGResolutions over groups H1 and H2, and phi
    is a homomorphism H1 -> H2.  The map is determined by its images of
    the free source generators; these are lifted degree by degree through
    the target's contracting homotopy,

        f_0(e) = section(aug(e)),    f_n(e) = h_{n-1}(f_{n-1}(d_n e)),

    and extended semilinearly, f(gamma x) = phi(gamma) f(x).  With
    check=True the defining equations d f_n = f_{n-1} d_n (plus
    augmentation preservation in degree 0) are verified on every source
    generator up to degree_max.  Raises MissingHomotopy when the target
    carries no homotopy.
    """

    def __init__(self, source, target, phi, degree_max, check=True):
        if degree_max > source.top_degree():
            raise DegreeOutOfRange("source has top degree %d < %d"
                                   % (source.top_degree(), degree_max))
        if degree_max > target.top_degree():
            raise DegreeOutOfRange("target has top degree %d < %d"
                                   % (target.top_degree(), degree_max))
        self.source = source
        self.target = target
        self.phi = phi
        self.degree_max = degree_max
        vals0 = []
        for j in range(source.rank(0)):
            c = source.aug({j: GroupRingElement.unit(IDENT)})
            vals0.append(target.section(c))
        self.values = [vals0]
        for n in range(1, degree_max + 1):
            vals = []
            for j in range(source.rank(n)):
                below = self.apply(
                    n - 1, source.d(n, {j: GroupRingElement.unit(IDENT)}))
                vals.append(target.h(n - 1, below))
            self.values.append(vals)
        if check:
            self._verify()

    def value(self, n, j):
        """Image of the degree-n source generator j, as a target chain."""
        return self.values[n][j]

    def apply(self, n, chain):
        """Image of a degree-n source chain {index: GroupRingElement}."""
        out = {}
        for j, gre in chain.items():
            base = self.values[n][j]
            for gam, c in gre.items():
                img = self.phi(gam)
                moved = {i: val.left_mul(img) for i, val in base.items()}
                if c != 1:
                    moved = chain_scale(moved, c)
                out = chain_add(out, moved)
        return out

    def _verify(self):
        for j in range(self.source.rank(0)):
            gen = {j: GroupRingElement.unit(IDENT)}
            assert self.target.aug(self.values[0][j]) == self.source.aug(gen), \
                "augmentation not preserved on degree-0 generator %d" % j
        for n in range(1, self.degree_max + 1):
            for j in range(self.source.rank(n)):
                gen = {j: GroupRingElement.unit(IDENT)}
                left = self.target.d(n, self.values[n][j])
                right = self.apply(n - 1, self.source.d(n, gen))
                assert chains_equal(left, right), \
                    "d f != f d in degree %d on generator %d" % (n, j)


def equivariant_chain_map(source, target, phi, degree_max, check=True):
    """The phi-semilinear chain map source -> target through target's homotopy.

    See EquivariantChainMap; this is the construction entry point.
    """
    return EquivariantChainMap(source, target, phi, degree_max, check=check)


def _truncated(resolution, top):
    """A view of the resolution up to the given top degree.

    Shares boundary rows and augmentation/section with the original but
    carries no homotopy; enough to serve as the source of a chain map.
    """
    assert top <= resolution.top_degree()
    boundaries = [[]] + [resolution.boundary_rows(k) for k in range(1, top + 1)]
    return FreeZGResolution(resolution.group,
                            [resolution.rank(k) for k in range(top + 1)],
                            boundaries,
                            homotopy_basis=None,
                            augmentation=resolution.aug,
                            section=resolution.section)


def _group_ring_action(module, gre):
    """Module matrix of a group ring element: sum of c * action(gamma)."""
    m = module.rank
    data = [[0] * m for _ in range(m)]
    for gam, c in gre.items():
        act = module.action(gam)
        for r in range(m):
            arow = act.data[r]
            drow = data[r]
            for s in range(m):
                if arow[s]:
                    drow[s] += c * arow[s]
    return IntMatrix(m, m, data)


@dataclass
class HeckeMatrix:
    """A Hecke operator presented on an adapted basis of H^n(Gamma, M).

    matrix acts on coordinates ordered with the free components first
    (orders entry 0) followed by the finite cyclic components (orders
    entry > 1, ascending); entries in torsion rows are canonical residues.
    basis[j] is an ambient cocycle vector representing the j-th basis
    class, so the presentation is reproducible run to run.  cochain is the
    operator on all degree-n cochains, before descending to cohomology.
    """

    group: object
    g: tuple
    degree: int
    weight: int
    matrix: IntMatrix
    orders: tuple
    basis: list
    cochain: IntMatrix = field(repr=False)
    lattice: QuotientLattice = field(repr=False)

    def rank(self):
        return len(self.orders)

    def free_rank(self):
        return sum(1 for o in self.orders if o == 0)

    def free_block(self):
        """The operator on H^n modulo torsion (leading free coordinates)."""
        r = self.free_rank()
        data = [row[:r] for row in self.matrix.data[:r]]
        return IntMatrix(r, r, data)

    def invariants(self):
        return self.lattice.invariants()

    def compose(self, other):
        """Matrix of self applied after other, on the shared basis.

        Both operators must be presented on the same basis (same orders,
        from one shared resolution).  A plain matrix product is not
        canonical when torsion is present, so entries in torsion rows are
        re-reduced to canonical residues; two operators commute on
        cohomology exactly when compose agrees both ways.
        """
        assert self.orders == other.orders, \
            "operators presented on different bases"
        prod = self.matrix * other.matrix
        data = [list(row) for row in prod.data]
        for r, o in enumerate(self.orders):
            if o > 1:
                data[r] = [x % o for x in data[r]]
        return IntMatrix(len(data), len(data), data)

    def descriptor(self):
        """JSON-friendly presentation data."""
        return {
            "group": str(self.group),
            "g": list(self.g),
            "degree": self.degree,
            "weight": self.weight,
            "orders": list(self.orders),
            "matrix": [list(row) for row in self.matrix.data],
            "basis": [list(v) for v in self.basis],
        }


def hecke_operator(gamma, n, g, module=None, resolution=None, check=True):
    """Matrix of the Hecke operator of g on H^n(gamma, module).

    module defaults to the trivial module (weight 2).  resolution, when
    given, must be over gamma, carry a contracting homotopy, and have top
    degree at least n + 1; passing the same resolution across calls keeps
    the cohomology basis identical, so returned matrices compose and
    compare directly.  With check=True the construction is verified on
    the spot: the chain map satisfies d f = f d on every generator, and
    the cochain operator maps the full cocycle lattice to cocycles and
    coboundaries to coboundaries before descending to cohomology.
    """
    if module is None:
        module = PolynomialModule(0)
    if resolution is None:
        resolution = restrict_resolution(sl2z_resolution(n + 1), gamma)
    if resolution.top_degree() < n + 1:
        raise DegreeOutOfRange(
            "resolution of top degree %d cannot present H^%d"
            % (resolution.top_degree(), n))
    desc = gamma_prime_data(gamma, g)
    trans = _SubgroupTransversal(desc)
    source = restrict_resolution(_truncated(resolution, n), desc, trans=trans)
    lift = EquivariantChainMap(source, resolution, desc.conjugate,
                               degree_max=n, check=check)

    # assemble the cochain operator: the image cochain evaluated on the
    # generator e_b is sum_i M(t_i) M(g) c(f(t_i^{-1} e_b)), and
    # t_i^{-1} e_b is exactly source generator (b, i)
    nt = desc.index
    m = module.rank
    rank_n = resolution.rank(n)
    dim = rank_n * m
    act_g = module.action(desc.g)
    data = [[0] * dim for _ in range(dim)]
    for i, t in enumerate(desc.reps):
        pre = module.action(t) * act_g
        for b in range(rank_n):
            for b2, gre in lift.value(n, b * nt + i).items():
                block = pre * _group_ring_action(module, gre)
                for r in range(m):
                    brow = block.data[r]
                    drow = data[b * m + r]
                    for s in range(m):
                        if brow[s]:
                            drow[b2 * m + s] += brow[s]
    cochain = IntMatrix(dim, dim, data)

    C = hom_complex(resolution, module)
    delta_out = C.deltas[n]
    if n >= 1:
        delta_in = C.deltas[n - 1]
    else:
        delta_in = IntMatrix.zeros(C.ranks[0], 0)
    Z = integer_kernel(delta_out)
    if check:
        assert (delta_out * (cochain * Z)).is_zero(), \
            "image of a cocycle is not a cocycle"
        if delta_in.cols:
            assert solve_matrix(delta_in, cochain * delta_in) is not None, \
                "image of a coboundary is not a coboundary"

    quotient = QuotientLattice(Z, delta_in)
    matrix, orders, basis = matrix_on_quotient(cochain, quotient)
    return HeckeMatrix(gamma, desc.g, n, module.k + 2, matrix, orders,
                       basis, cochain, quotient)


def matrix_on_quotient(cochain, quotient):
    """Present a cochain-level operator on a quotient lattice it preserves.

    Rows and columns run over the nontrivial cyclic components with the
    free ones first and torsion after, the order every operator matrix in
    this module uses.  Returns (matrix, orders, basis) where basis[i] is
    an ambient lift of the i-th presented generator.  project raises if
    the operator moves the numerator lattice out of itself.
    """
    comps = quotient.components
    perm = ([k for k, (_, o) in enumerate(comps) if o == 0]
            + [k for k, (_, o) in enumerate(comps) if o > 1])
    r = len(comps)
    basis = []
    cols = []
    for k in perm:
        coords = [0] * r
        coords[k] = 1
        vec = quotient.lift(coords)
        basis.append(list(vec))
        cols.append(quotient.project(cochain.apply(vec)))
    data_h = [[cols[c][perm[rw]] for c in range(r)] for rw in range(r)]
    matrix = IntMatrix(r, r, data_h)
    orders = tuple(comps[k][1] for k in perm)
    return matrix, orders, basis


@dataclass
class EigenvalueReport:
    """Integer spectrum of one Hecke operator on H^n modulo torsion.

    roots lists the integer roots of the characteristic polynomial with
    multiplicity, ascending; residual is the monic cofactor without
    integer roots, as coefficients highest degree first ((1,) when the
    polynomial splits over Z).
    """

    p: int
    roots: tuple
    residual: tuple
    operator: HeckeMatrix = field(repr=False)


def hecke_eigenvalues(gamma, n, ps, module=None, resolution=None, check=True):
    """Eigenvalue reports of T_p on H^n(gamma, module), keyed by p in ps.

    All operators are computed on one shared resolution, so the
    underlying matrices act on the same basis.
    """
    if module is None:
        module = PolynomialModule(0)
    if resolution is None:
        resolution = restrict_resolution(sl2z_resolution(n + 1), gamma)
    out = {}
    for p in ps:
        op = hecke_operator(gamma, n, hecke_representative(p), module,
                            resolution=resolution, check=check)
        roots, residual = integer_roots(charpoly(op.free_block()))
        out[p] = EigenvalueReport(int(p), tuple(roots), tuple(residual), op)
    return out


def _least_prime_factor(x):
    d = 2
    while d * d <= x:
        if x % d == 0:
            return d
        d += 1
    return x


def expand_eigenform(ap, level, bound):
    """Coefficients a_1..a_bound of a normalized eigenform from its a_p.

    ap maps primes to eigenvalues.  a_1 = 1, a_{rs} = a_r a_s for coprime
    r and s, and prime powers follow a_{p^m} = a_{p^{m-1}} a_p
    - p a_{p^{m-2}} when p does not divide the level and a_{p^m} = a_p^m
    when it does.  Raises MissingPrime when a required eigenvalue is
    absent; every prime up to bound is required.
    """
    level = int(level)
    bound = int(bound)
    if level < 1:
        raise FormatError("level must be >= 1, got %d" % level)
    if bound < 1:
        return []
    coeff = [0] * (bound + 1)
    coeff[1] = 1
    for x in range(2, bound + 1):
        p = _least_prime_factor(x)
        q = p
        rest = x // p
        while rest % p == 0:
            q *= p
            rest //= p
        if rest > 1:
            # q and rest are coprime and both smaller than x
            coeff[x] = coeff[q] * coeff[rest]
            continue
        if p not in ap:
            raise MissingPrime("no eigenvalue supplied for p = %d" % p)
        a_p = ap[p]
        if x == p:
            coeff[x] = a_p
        elif level % p == 0:
            coeff[x] = coeff[x // p] * a_p
        else:
            coeff[x] = coeff[x // p] * a_p - p * coeff[x // (p * p)]
    return coeff[1:]
