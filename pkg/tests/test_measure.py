from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlp.errors import IllDescribedTailError, MisalignedSetError, NotInAlgebraError
from rieszlp.measure import (
    CellMeasure,
    DyadicMeasure,
    FinCofinSet,
    GridMeasure,
    NSubset,
    dyadic_measure,
    dyadic_measure_exact,
    grid_measure,
    initial_segment,
    outer_measure,
    outer_measure_exact,
    symmetric_difference_measure,
)


def test_dyadic_measure_examples():
    assert dyadic_measure(FinCofinSet.finite({1})) == 0.5
    assert dyadic_measure(FinCofinSet.co({1})) == 1.5
    assert dyadic_measure(FinCofinSet.empty()) == 0
    assert dyadic_measure(FinCofinSet.everything()) == 2


def test_outer_measure_examples():
    assert outer_measure(NSubset.finite({1, 2, 3})) == 0.875
    assert outer_measure_exact(NSubset.periodic({0}, 2)) == Fraction(4, 3)
    assert outer_measure(NSubset.cofinite(())) == 2


def test_outer_measure_agrees_on_algebra():
    for A in (FinCofinSet.finite({2, 7}), FinCofinSet.co({1, 4})):
        assert outer_measure_exact(A) == dyadic_measure_exact(A)


def test_symmetric_difference_examples():
    assert symmetric_difference_measure(initial_segment(3), initial_segment(5)) == 0.09375
    A = FinCofinSet.co({2, 3})
    assert symmetric_difference_measure(A, A) == 0
    assert symmetric_difference_measure(initial_segment(1), initial_segment(2)) == 0.25


def test_grid_measure_examples():
    assert grid_measure((0.0, 1.0), GridMeasure(0, 1, 100)) == pytest.approx(1.0, abs=1e-15)
    m = GridMeasure(0, 2, 10)
    assert grid_measure(range(5), m) == pytest.approx(1.0, abs=1e-15)
    assert grid_measure({0, 1, 2}, GridMeasure(0, 1, 10)) == pytest.approx(0.3, abs=1e-15)


def test_misaligned_interval():
    with pytest.raises(MisalignedSetError):
        GridMeasure(0, 1, 10).cells_of_interval(0.05, 0.5)


def test_non_algebra_set():
    evens = NSubset.periodic({0}, 2)
    with pytest.raises(NotInAlgebraError):
        evens.to_algebra()
    with pytest.raises(NotInAlgebraError):
        dyadic_measure(evens)


def test_ill_described_tail():
    with pytest.raises(IllDescribedTailError):
        NSubset(lambda n: True, 3, ())


def test_initial_segment_mass():
    assert dyadic_measure_exact(initial_segment(10)) == 1 - Fraction(1, 2 ** 10)


def test_refine_atoms_partition():
    D = DyadicMeasure()
    sets = [FinCofinSet.finite({1, 2}), FinCofinSet.co({2, 3})]
    atoms, w = D.refine(sets)
    assert sum(Fraction(x).limit_denominator(2 ** 40) for x in w) == 2
    for a in atoms:
        for A in sets:
            assert D.atom_in(a, A) == a.issubset(A)


def test_cell_measure_basics():
    m = CellMeasure([0.5, 0.25, 0.25])
    assert m.total == 1.0
    assert m.measure({0, 2}) == 0.75
    with pytest.raises(ValueError):
        CellMeasure([1.0, -1.0])


small = st.frozensets(st.integers(1, 12), max_size=6)


@given(small, small, st.booleans(), st.booleans())
def test_finite_additivity(a, b, ca, cb):
    A = FinCofinSet.co(a) if ca else FinCofinSet.finite(a)
    B = FinCofinSet.co(b) if cb else FinCofinSet.finite(b)
    mu = dyadic_measure_exact
    assert mu(A.union(B)) + mu(A.intersection(B)) == mu(A) + mu(B)
    assert mu(A) + mu(A.complement()) == 2
    assert mu(A.symmetric_difference(B)) == mu(A.difference(B)) + mu(B.difference(A))


@given(st.lists(st.integers(0, 5), min_size=1, max_size=4), st.integers(1, 6))
def test_periodic_mass_matches_truncation(res, period):
    B = NSubset.periodic(res, period)
    exact = B.dyadic_mass_exact()
    approx = sum(2.0 ** -n for n in B.members(60))
    assert abs(float(exact) - approx) < 1e-15
