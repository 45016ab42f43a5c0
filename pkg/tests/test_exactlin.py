"""Tests for the exact integer linear algebra layer."""

import pytest
from hypothesis import given, settings, strategies as st

from artifact.errors import CompositionNonzero, FormatError, ShapeMismatch
from artifact.exactlin import (
    AbelianInvariants,
    IntMatrix,
    QuotientLattice,
    charpoly,
    column_span_basis,
    determinant,
    homology_of_pair,
    integer_kernel,
    integer_roots,
    rank,
    smith_normal_form,
    solve,
    solve_matrix,
)


def small_matrix(max_dim=12, max_entry=9):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-max_entry, max_entry), min_size=c, max_size=c),
                min_size=r, max_size=r).map(IntMatrix.from_rows)))


def random_unimodular(n, seed_ops):
    """Product of elementary row operations; |det| = 1 by construction."""
    m = IntMatrix.identity(n)
    for kind, a, b, q in seed_ops:
        a, b = a % n, b % n
        if a == b:
            continue
        if kind == 0:
            m.data[a], m.data[b] = m.data[b], m.data[a]
        else:
            m.data[a] = [x + q * y for x, y in zip(m.data[a], m.data[b])]
    return m


unimod_ops = st.lists(
    st.tuples(st.integers(0, 1), st.integers(0, 11), st.integers(0, 11),
              st.integers(-3, 3)),
    max_size=10)


# ---------------------------------------------------------------- fixtures


def test_snf_identity():
    sf = smith_normal_form(IntMatrix.identity(3))
    assert sf.d == [1, 1, 1]
    assert sf.rank == 3


def test_snf_diag_2_3():
    # gcd/lcm by hand: diag(2,3) ~ diag(1,6)
    sf = smith_normal_form(IntMatrix.diagonal([2, 3]))
    assert sf.d == [1, 6]
    assert sf.U * IntMatrix.diagonal([2, 3]) * sf.V == IntMatrix.diagonal([1, 6])


def test_snf_zero():
    sf = smith_normal_form(IntMatrix.zeros(2, 2))
    assert sf.d == [0, 0]
    assert sf.rank == 0


def test_snf_empty():
    sf = smith_normal_form(IntMatrix.zeros(0, 3))
    assert sf.d == []
    assert sf.rank == 0


def test_kernel_sum_map():
    k = integer_kernel(IntMatrix.from_rows([[1, 1]]))
    assert k.cols == 1
    assert k.col(0) in ([1, -1], [-1, 1])


def test_kernel_identity_empty():
    assert integer_kernel(IntMatrix.identity(4)).cols == 0


def test_kernel_zero_full():
    k = integer_kernel(IntMatrix.zeros(2, 2))
    assert k.cols == 2
    assert rank(k) == 2


def test_homology_circle():
    # one 1-cell attached trivially: H1 = Z
    inv = homology_of_pair(IntMatrix.zeros(1, 1), IntMatrix.zeros(1, 1))
    assert inv.torsion == [] and inv.free_rank == 1


def test_homology_z12():
    inv = homology_of_pair(IntMatrix.zeros(1, 1), IntMatrix.from_rows([[12]]))
    assert inv.torsion == [12] and inv.free_rank == 0


def test_homology_exact():
    inv = homology_of_pair(IntMatrix.identity(3), IntMatrix.zeros(3, 2))
    assert inv.is_trivial()


def test_homology_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        homology_of_pair(IntMatrix.zeros(1, 2), IntMatrix.zeros(3, 1))


def test_homology_composition_nonzero():
    with pytest.raises(CompositionNonzero):
        homology_of_pair(IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1]]))


def test_abelian_invariants_display():
    inv = AbelianInvariants([2, 4], 3)
    assert inv.entries() == [2, 4, 0, 0, 0]
    assert str(inv) == "Z/2 + Z/4 + Z^3"
    assert AbelianInvariants([], 0).order() == 1
    assert AbelianInvariants([2, 6], 0).order() == 12
    assert AbelianInvariants([], 1).order() == 0


def test_serialization_header_errors():
    with pytest.raises(FormatError):
        IntMatrix.from_text("2 2\n1 2 3")
    with pytest.raises(FormatError):
        IntMatrix.from_text("2\n")
    with pytest.raises(FormatError):
        IntMatrix.from_text("2 2\n1 2 3 x")


def test_determinant_examples():
    assert determinant(IntMatrix.from_rows([[2, 1], [1, 1]])) == 1
    assert determinant(IntMatrix.from_rows([[0, 1], [1, 0]])) == -1
    assert determinant(IntMatrix.identity(5)) == 1
    assert determinant(IntMatrix.zeros(3, 3)) == 0


def test_charpoly_companion():
    # x^2 - x - 1 via its companion matrix
    m = IntMatrix.from_rows([[0, 1], [1, 1]])
    assert charpoly(m) == [1, -1, -1]
    assert charpoly(IntMatrix.diagonal([2, 3])) == [1, -5, 6]
    assert charpoly(IntMatrix.zeros(0, 0)) == [1]


def test_integer_roots():
    # (x-2)(x-3)(x^2+1) = x^4 -5x^3 +7x^2 -5x +6
    roots, residual = integer_roots([1, -5, 7, -5, 6])
    assert roots == [2, 3]
    assert residual == [1, 0, 1]
    roots, residual = integer_roots([1, 0, 0])
    assert roots == [0, 0] and residual == [1]
    roots, residual = integer_roots([1, 2, -2])
    assert roots == [] and residual == [1, 2, -2]


def test_quotient_lattice_diag():
    q = QuotientLattice(IntMatrix.identity(2), IntMatrix.diagonal([2, 3]))
    inv = q.invariants()
    assert inv.torsion == [6] and inv.free_rank == 0


def test_quotient_lattice_with_free_part():
    # Z^3 / span{(2,0,0)} = Z/2 + Z^2
    q = QuotientLattice(IntMatrix.identity(3), IntMatrix.from_rows([[2], [0], [0]]))
    inv = q.invariants()
    assert inv.torsion == [2] and inv.free_rank == 2
    # projecting a lattice vector and lifting back lands in the same class
    v = [3, 1, -4]
    assert q.project(q.lift(q.project(v))) == q.project(v)


def test_quotient_lattice_rejects_outside():
    q = QuotientLattice(IntMatrix.from_rows([[2], [0]]), IntMatrix.from_rows([[4], [0]]))
    with pytest.raises(ValueError):
        q.project([1, 0])
    with pytest.raises(ValueError):
        QuotientLattice(IntMatrix.from_rows([[2], [0]]), IntMatrix.from_rows([[1], [0]]))


# ---------------------------------------------------------------- properties


class TestSmithProperties:
    @given(small_matrix())
    def test_transform_identity(self, m):
        sf = smith_normal_form(m)
        d = IntMatrix.diagonal(sf.d, rows=m.rows, cols=m.cols)
        assert sf.U * m * sf.V == d

    @given(small_matrix())
    def test_divisibility_chain(self, m):
        sf = smith_normal_form(m)
        assert all(v >= 0 for v in sf.d)
        for a, b in zip(sf.d, sf.d[1:]):
            if a:
                assert b % a == 0
            else:
                assert b == 0

    @given(small_matrix())
    def test_transforms_unimodular(self, m):
        sf = smith_normal_form(m)
        assert determinant(sf.U) in (1, -1)
        assert determinant(sf.V) in (1, -1)
        assert sf.U * sf.Uinv == IntMatrix.identity(m.rows)
        assert sf.Vinv * sf.V == IntMatrix.identity(m.cols)

    @given(small_matrix(max_dim=8), unimod_ops, unimod_ops)
    def test_invariant_under_unimodular(self, m, ops1, ops2):
        a = random_unimodular(m.rows, ops1)
        b = random_unimodular(m.cols, ops2)
        assert smith_normal_form(a * m * b, transforms=False).d == \
            smith_normal_form(m, transforms=False).d

    @given(small_matrix())
    def test_kernel(self, m):
        k = integer_kernel(m)
        assert (m * k).is_zero()
        assert k.cols == m.cols - rank(m)
        if k.cols:
            # saturation: the basis extends to a basis of the ambient lattice,
            # equivalently all invariant factors are 1
            sf = smith_normal_form(k, transforms=False)
            assert sf.d[:k.cols] == [1] * k.cols

    @given(small_matrix(max_dim=8), st.lists(st.integers(-5, 5), min_size=8, max_size=8))
    def test_solve_consistent_system(self, m, xs):
        x = xs[:m.cols]
        b = m.apply(x)
        got = solve(m, b)
        assert got is not None
        assert m.apply(got) == b

    @given(small_matrix(max_dim=8))
    def test_column_span_basis(self, m):
        basis = column_span_basis(m)
        assert basis.cols == rank(m)
        # every original column is an integer combination of the basis
        assert solve_matrix(basis, m) is not None
        # and conversely
        if basis.cols:
            assert solve_matrix(m, basis) is not None

    @given(small_matrix(max_dim=6, max_entry=4))
    def test_charpoly_trace_det(self, m):
        if m.rows != m.cols:
            return
        p = charpoly(m)
        tr = sum(m.data[i][i] for i in range(m.rows))
        assert p[0] == 1
        assert p[1] == -tr
        assert p[-1] == (-1) ** m.rows * determinant(m)

    @given(small_matrix())
    def test_text_roundtrip(self, m):
        assert IntMatrix.from_text(m.to_text()) == m

    @settings(max_examples=40)
    @given(st.integers(1, 5),
           st.lists(st.integers(-4, 4), min_size=50, max_size=50))
    def test_det_multiplicative(self, n, entries):
        a = IntMatrix(n, n, [entries[i * n:(i + 1) * n] for i in range(n)])
        b = IntMatrix(n, n, [entries[25 + i * n:25 + (i + 1) * n] for i in range(n)])
        assert determinant(a * b) == determinant(a) * determinant(b)


@given(st.integers(1, 6))
def test_exact_shifted_identity_trivial(k):
    # the exact complex 0 -> Z^k -id-> Z^k -0-> Z^k -id-> Z^k -> 0 has
    # trivial homology in both middle degrees
    assert homology_of_pair(IntMatrix.identity(k), IntMatrix.zeros(k, k)).is_trivial()
    assert homology_of_pair(IntMatrix.zeros(k, k), IntMatrix.identity(k)).is_trivial()
