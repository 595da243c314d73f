import math

import pytest
from hypothesis import given, strategies as st

from dktwist.errors import ZeroDenominatorOrder
from dktwist.qparam import QKind, QParam, as_q, bracket, qnumber, qnumber_ratio


def test_kinds():
    assert QParam(0).kind is QKind.ZERO
    assert QParam(1).kind is QKind.ONE
    assert QParam(0.3).kind is QKind.GENERIC
    assert QParam(0).h == -math.inf


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_rejects_invalid(bad):
    with pytest.raises(ValueError):
        QParam(bad)


def test_as_q_and_inverse():
    assert as_q(2) == QParam(2.0)
    assert as_q(QParam(0.5)).inverse() == QParam(2.0)
    with pytest.raises(ZeroDivisionError):
        QParam(0).inverse()
    with pytest.raises(TypeError):
        as_q("2")


def test_phi_is_arctan():
    assert QParam(1.0).phi() == pytest.approx(math.pi / 4)


def test_spec_examples():
    assert qnumber_ratio(2, 1, 1.0) == 2.0
    assert qnumber_ratio(1, 1, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert qnumber_ratio(3, 1, 2.0) == pytest.approx(5.25, abs=1e-14)


def test_zero_limits():
    assert qnumber_ratio(2, -2, 0.0) == -1.0
    assert qnumber_ratio(1, 2, 0.0, allow_zero=True) == 0.0
    with pytest.raises(ZeroDenominatorOrder):
        qnumber_ratio(1, 2, 0.0)
    with pytest.raises(ZeroDenominatorOrder):
        qnumber_ratio(3, 1, 0.0, allow_zero=True)
    with pytest.raises(ZeroDivisionError):
        qnumber_ratio(1, 0, 2.0)


def test_qnumber_and_bracket():
    assert qnumber(1, 2.0) == pytest.approx(1.5)
    assert bracket(1, 2.0) == pytest.approx(2.5)
    with pytest.raises(ZeroDenominatorOrder):
        qnumber(1, 0.0)


@given(k=st.integers(1, 6), m=st.integers(1, 6), eps=st.floats(1e-9, 1e-5))
def test_ratio_continuous_at_one(k, m, eps):
    assert qnumber_ratio(k, m, 1 + eps) == pytest.approx(k / m, rel=1e-4)


@given(k=st.integers(1, 6), m=st.integers(1, 6), q=st.floats(0.05, 20))
def test_ratio_inversion_symmetry(k, m, q):
    # {k}(1/q) = -{k}(q), so the ratio is invariant
    assert qnumber_ratio(k, m, q) == pytest.approx(qnumber_ratio(k, m, 1 / q), rel=1e-12)
