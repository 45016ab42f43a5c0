"""Cuspidal cohomology as the kernel of restriction to the boundary.

The compactified quotient of the upper half plane has a boundary made of
horocycle circles, one per cusp.  A cochain on the whole space restricts
to a cochain on that boundary, and the classes killed by restriction are
the interior ones; for congruence subgroups of SL2(Z) the interior part
of H^n is exactly the cuspidal part, which is how this module labels it.

Everything happens on free resolutions: the compactified complex and its
boundary subcomplex each assemble to a resolution, both restrict to the
subgroup, and the boundary inclusion lifts to an equivariant chain map
through the contracting homotopy of the ambient side.  The kernel is cut
out at the cocycle-lattice level (the preimage of the boundary
coboundaries), so its abelian invariants are those of a genuine subgroup
of H^n; no ill-defined operations on invariant lists are involved.
"""

from dataclasses import dataclass, field

from .coeffmod import PolynomialModule, cohomology, hom_complex
from .errors import DegreeOutOfRange
from .exactlin import (AbelianInvariants, IntMatrix, QuotientLattice,
                       column_span_basis, integer_kernel, solve_matrix)
from .hecke import (EquivariantChainMap, HeckeMatrix, hecke_operator,
                    matrix_on_quotient)
from .resolutions import (borel_serre_complex, restrict_resolution,
                          wall_resolution)


def _pullback_matrix(chain_map, k, target_rank, module):
    """Matrix of the cochain pullback c -> c composed with the chain map.

    Rows are source-side degree-k cochain coordinates, columns ambient
    ones; the (j, b) block is the module matrix of the group ring entry
    of the chain map's value at generator j on target generator b.
    """
    m = module.rank
    nsrc = chain_map.source.rank(k)
    out = IntMatrix.zeros(nsrc * m, target_rank * m)
    for j in range(nsrc):
        for b, gre in chain_map.value(k, j).items():
            block = [[0] * m for _ in range(m)]
            for gam, c in gre.items():
                act = module.action(gam)
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
                        orow[b * m + s] += brow[s]
    return out


@dataclass
class CuspidalResult:
    """Ambient, boundary, and cuspidal cohomology of one degree.

    restriction is the cochain-level matrix of the pullback along the
    boundary inclusion (rows: boundary cochain coordinates, columns:
    ambient ones), and restriction_next the same one degree up, so the
    chain-map identity delta_boundary . restriction = restriction_next .
    delta_ambient can be checked as a matrix identity.  kernel_basis
    columns are ambient cocycles spanning the preimage lattice of the
    boundary coboundaries; cuspidal is that lattice modulo the ambient
    coboundaries.  The complexes and the ambient resolution ride along so
    follow-up computations (Hecke action on the kernel, for one) can stay
    in the same coordinates.
    """

    group: object
    degree: int
    weight: int
    ambient: AbelianInvariants
    boundary: AbelianInvariants
    cuspidal: AbelianInvariants
    restriction: IntMatrix
    restriction_next: IntMatrix = field(repr=False)
    kernel_basis: IntMatrix = field(repr=False)
    ambient_complex: object = field(repr=False)
    boundary_complex: object = field(repr=False)
    ambient_resolution: object = field(repr=False)
    module: object = field(repr=False)

    def descriptor(self):
        """JSON-friendly summary (invariants as strings)."""
        return {
            "group": str(self.group),
            "degree": self.degree,
            "weight": self.weight,
            "ambient": str(self.ambient),
            "boundary": str(self.boundary),
            "cuspidal": str(self.cuspidal),
            "cuspidal_rank": self.cuspidal.free_rank,
        }


def cuspidal_cohomology(gamma, n, module=None, check=True):
    """Cuspidal cohomology of gamma in degree n with the given module.

    Assembles resolutions of the compactified complex and of its boundary
    subcomplex, restricts both to gamma, lifts the inclusion to a chain
    map through the ambient contracting homotopy, and intersects the
    degree-n cocycle lattice with the preimage of the boundary
    coboundaries.  With check=True the chain map is verified on all
    generators and the cochain restriction is checked to commute with the
    coboundaries.
    """
    if module is None:
        module = PolynomialModule(0)
    if n < 0:
        raise DegreeOutOfRange("degree must be >= 0, got %d" % n)
    top = n + 1
    X = borel_serre_complex()
    ambient = restrict_resolution(wall_resolution(X, top), gamma)
    boundary = restrict_resolution(
        wall_resolution(X.boundary_subcomplex(), top), gamma)
    incl = EquivariantChainMap(boundary, ambient, lambda g: g,
                               degree_max=top, check=check)
    CA = hom_complex(ambient, module)
    CB = hom_complex(boundary, module)
    rho = _pullback_matrix(incl, n, ambient.rank(n), module)
    rho_next = _pullback_matrix(incl, n + 1, ambient.rank(n + 1), module)
    if check:
        assert CB.deltas[n] * rho == rho_next * CA.deltas[n], \
            "restriction does not commute with the coboundaries"

    din_a = CA.deltas[n - 1] if n >= 1 else IntMatrix.zeros(CA.ranks[0], 0)
    din_b = CB.deltas[n - 1] if n >= 1 else IntMatrix.zeros(CB.ranks[0], 0)
    Z = integer_kernel(CA.deltas[n])
    ambient_inv = QuotientLattice(Z, din_a).invariants()
    boundary_inv = cohomology(CB, n)

    # v = Z u lies in the kernel lattice iff rho v is a boundary
    # coboundary, i.e. (u, -w) solves the stacked system below; ambient
    # coboundaries always qualify, so the lattice presents the kernel
    stacked = (rho * Z).hstack(din_b)
    W = integer_kernel(stacked)
    U = IntMatrix(Z.cols, W.cols, [list(W.data[i]) for i in range(Z.cols)])
    kernel_basis = column_span_basis(Z * U)
    kernel_inv = QuotientLattice(kernel_basis, din_a).invariants()
    return CuspidalResult(gamma, n, module.k + 2, ambient_inv, boundary_inv,
                          kernel_inv, rho, rho_next, kernel_basis, CA, CB,
                          ambient, module)


def cuspidal_hecke_matrix(result, g, check=True):
    """A Hecke operator pushed down to the cuspidal quotient.

    Builds the operator on the ambient resolution the result was computed
    with, checks (when check=True) that images of kernel cocycles restrict
    to boundary coboundaries, and presents the induced map on the cuspidal
    invariants in the same free-first coordinates the full cohomology
    operators use.
    """
    n = result.degree
    T = hecke_operator(result.group, n, g, module=result.module,
                       resolution=result.ambient_resolution, check=check)
    CA = result.ambient_complex
    CB = result.boundary_complex
    din_a = CA.deltas[n - 1] if n >= 1 else IntMatrix.zeros(CA.ranks[0], 0)
    din_b = CB.deltas[n - 1] if n >= 1 else IntMatrix.zeros(CB.ranks[0], 0)
    if check:
        moved = result.restriction * (T.cochain * result.kernel_basis)
        assert solve_matrix(din_b, moved) is not None, \
            "operator does not preserve the cuspidal kernel"
    quot = QuotientLattice(result.kernel_basis, din_a)
    matrix, orders, basis = matrix_on_quotient(T.cochain, quot)
    return HeckeMatrix(result.group, T.g, n, result.weight, matrix, orders,
                       basis, T.cochain, quot)
