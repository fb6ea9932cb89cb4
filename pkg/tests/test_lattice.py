import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlp import LatticeElement, OrderUnit, join_meet_abs, m_norm, mul, power, unit, zero
from rieszlp.errors import DimensionError

vec = st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3)


def test_join_meet_abs_examples():
    sup, inf, a = join_meet_abs((1, 2), (2, 1))
    assert sup == LatticeElement((2, 2))
    assert inf == LatticeElement((1, 1))
    assert join_meet_abs((-1, 3), (0, 0))[2] == LatticeElement((1, 3))
    x = LatticeElement((4.0, -2.0))
    assert join_meet_abs(x, x)[1] == x


def test_mul_examples():
    x = LatticeElement((3.0, -7.0))
    assert mul(unit(2), x) == x
    assert mul((1, 0), (0, 5)) == LatticeElement((0, 0))
    assert mul((2, 3), (2, 3)) == LatticeElement((4, 9))


def test_power_examples():
    assert power((2, -1), 2) == LatticeElement((4, 1))
    for p in range(1, 6):
        assert power(unit(3), p) == unit(3)
    assert power((3,), 3) == LatticeElement((27,))
    with pytest.raises(ValueError):
        power((1, 2), 0)


def test_m_norm_examples():
    assert m_norm((1, -3, 2), (1, 1, 1)) == 3
    assert m_norm(zero(4), unit(4)) == 0
    assert m_norm((2, 2), (4, 1)) == 2


def test_order_unit_must_be_positive():
    with pytest.raises(ValueError):
        OrderUnit((1.0, 0.0))
    assert OrderUnit((2.0, 1.0)).bound_constant((4.0, -3.0)) == 3.0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        join_meet_abs((1, 2), (1, 2, 3))
    with pytest.raises(DimensionError):
        LatticeElement((1, 2)) + LatticeElement((1, 2, 3))


def test_rejects_nonfinite():
    with pytest.raises(ValueError):
        LatticeElement((1.0, np.nan))


def test_partial_order():
    x, y = LatticeElement((1, 3)), LatticeElement((2, 1))
    assert not x <= y and not y <= x
    assert x.meet(y) <= x <= x.join(y)


@given(vec, vec)
def test_lattice_identities(a, b):
    x, y = LatticeElement(a), LatticeElement(b)
    sup, inf, ax = join_meet_abs(x, y)
    assert sup + inf == x + y
    assert ax == x.join(-x)
    assert ax == x.positive_part() + (-x).positive_part()
    assert abs(x) * abs(x) == mul(x, x)


@given(vec, vec)
def test_m_norm_is_a_riesz_norm(a, b):
    e = unit(3)
    x, y = LatticeElement(a), LatticeElement(b)
    assert m_norm(x + y, e) <= m_norm(x, e) + m_norm(y, e) + 1e-9
    assert m_norm(abs(x), e) == m_norm(x, e)
    if abs(x) <= abs(y):
        assert m_norm(x, e) <= m_norm(y, e)
