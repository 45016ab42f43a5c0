"""Tests for chain complexes and simple homotopy collapse reduction."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from artifact.chaincx import (
    FreeChainComplexZ,
    all_homology,
    contract,
    homology,
    verify_complex,
)
from artifact.errors import CompositionNonzero, DegreeOutOfRange, FormatError
from artifact.exactlin import IntMatrix

from genhelpers import random_complex


def circle():
    return FreeChainComplexZ([1, 1], [IntMatrix.zeros(1, 1)])


def torus():
    # one vertex, two edges, one face attached along the commutator
    return FreeChainComplexZ([1, 2, 1], [IntMatrix.zeros(1, 2), IntMatrix.zeros(2, 1)])


def test_verify_circle():
    assert verify_complex(circle())


def test_verify_rejects_bad_composition():
    c = FreeChainComplexZ([1, 1, 1],
                          [IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1]])])
    with pytest.raises(CompositionNonzero):
        verify_complex(c)


def test_circle_homology():
    c = circle()
    assert homology(c, 0).free_rank == 1 and not homology(c, 0).torsion
    assert homology(c, 1).free_rank == 1 and not homology(c, 1).torsion


def test_torus_homology():
    c = torus()
    assert homology(c, 0).entries() == [0]
    assert homology(c, 1).entries() == [0, 0]
    assert homology(c, 2).entries() == [0]


def test_degree_out_of_range():
    with pytest.raises(DegreeOutOfRange):
        homology(circle(), 2)
    with pytest.raises(DegreeOutOfRange):
        homology(circle(), -1)


def test_contract_exact_two_term():
    c = FreeChainComplexZ([1, 1], [IntMatrix.from_rows([[1]])])
    d = contract(c)
    assert d.ranks == [0, 0]
    assert len(d.trace) == 1
    assert d.trace[0].degree == 1


def test_contract_no_units_unchanged():
    c = FreeChainComplexZ([1, 1], [IntMatrix.from_rows([[2]])])
    d = contract(c)
    assert d == c
    assert d.trace == []


def test_contract_projective_plane():
    # one cell per dimension 0..2, d2 = (2): only the degree-1 pair collapses
    c = FreeChainComplexZ([1, 1, 1],
                          [IntMatrix.zeros(1, 1), IntMatrix.from_rows([[2]])])
    with pytest.raises(DegreeOutOfRange):
        homology(c, 3)
    assert homology(c, 1).torsion == [2]
    d = contract(c)
    assert [h.entries() for h in all_homology(d)] == \
        [h.entries() for h in all_homology(c)]


def test_text_roundtrip():
    c = FreeChainComplexZ([2, 3, 1],
                          [IntMatrix.from_rows([[0, 1, -1], [0, -1, 1]]),
                           IntMatrix.from_rows([[2], [1], [1]])])
    assert FreeChainComplexZ.from_text(c.to_text()) == c
    with pytest.raises(FormatError):
        FreeChainComplexZ.from_text("")
    with pytest.raises(FormatError):
        FreeChainComplexZ.from_text("2\n1 1 1\n")


class TestContractProperties:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_homology_matches_oracle(self, seed):
        rng = random.Random(seed)
        c, oracle = random_complex(rng)
        got = all_homology(c)
        assert [(h.torsion, h.free_rank) for h in got] == \
            [(h.torsion, h.free_rank) for h in oracle]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_contract_preserves_homology(self, seed):
        rng = random.Random(seed)
        c, oracle = random_complex(rng)
        d = contract(c)
        verify_complex(d)
        assert all(dr <= cr for dr, cr in zip(d.ranks, c.ranks))
        got = all_homology(d)
        assert [(h.torsion, h.free_rank) for h in got] == \
            [(h.torsion, h.free_rank) for h in oracle]

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_contract_idempotent_ranks(self, seed):
        rng = random.Random(seed)
        c, _ = random_complex(rng)
        d = contract(c)
        assert contract(d).ranks == d.ranks
        # nothing collapsible remains: no unit entries at all
        for mat in d.diffs:
            assert not any(v in (1, -1) for row in mat.data for v in row)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_trace_degrees_ascend(self, seed):
        rng = random.Random(seed)
        c, _ = random_complex(rng)
        d = contract(c)
        degs = [step.degree for step in d.trace]
        assert degs == sorted(degs)
        assert len(d.trace) * 2 == sum(c.ranks) - sum(d.ranks)
