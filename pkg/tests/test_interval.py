from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quasipareto.interval import (Interval, IntervalError, IntervalVector, LU, VecLU, iv_add, iv_scale,
                                  iv_sub, lu_compare, vec_relation)

fracs = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@st.composite
def intervals(draw):
    a, b = draw(fracs), draw(fracs)
    return Interval(min(a, b), max(a, b))


@given(intervals(), intervals())
def test_endpoint_formulas(a, b):
    assert iv_add(a, b) == Interval(a.lo + b.lo, a.hi + b.hi)
    assert iv_sub(a, b) == Interval(a.lo - b.hi, a.hi - b.lo)


@given(fracs, intervals())
def test_scaling_flips_for_negative_factor(k, a):
    s = iv_scale(k, a)
    if k >= 0:
        assert (s.lo, s.hi) == (k * a.lo, k * a.hi)
    else:
        assert (s.lo, s.hi) == (k * a.hi, k * a.lo)


@given(intervals(), intervals())
def test_relation_chain_and_antisymmetry(a, b):
    lts, lt, leq = (lu_compare(a, b, m) for m in (LU.LTS, LU.LT, LU.LEQ))
    assert not lts or lt
    assert not lt or leq
    if leq and lu_compare(b, a, LU.LEQ):
        assert a == b


@given(intervals())
def test_strict_relations_are_irreflexive(a):
    assert not lu_compare(a, a, LU.LT)
    assert not lu_compare(a, a, LU.LTS)
    assert lu_compare(a, a, LU.LEQ)


def test_fractions_stay_exact():
    a = Interval(Fraction(1, 3), Fraction(4, 3))
    e = Interval(Fraction(1, 5), Fraction(1, 4))
    assert a - e == Interval(Fraction(1, 12), Fraction(17, 15))


def test_margin_only_guards_strict_comparisons():
    a, b = Interval(0.0, 1.0), Interval(1e-13, 1.0 + 1e-13)
    assert lu_compare(a, b, LU.LTS)
    assert not lu_compare(a, b, LU.LTS, margin=1e-12)
    assert lu_compare(a, b, LU.LEQ, margin=1e-12)


def test_one_sided_strictness():
    a, b = Interval(0, 2), Interval(1, 2)
    assert lu_compare(a, b, LU.LT)
    assert not lu_compare(a, b, LU.LTS)


@pytest.mark.parametrize("lo,hi", [(2, 1), (float("nan"), 1), (0, float("inf"))])
def test_malformed_intervals_rejected(lo, hi):
    with pytest.raises(IntervalError):
        Interval(lo, hi)


def test_vector_relations():
    x = IntervalVector.from_pairs([(0, 1), (0, 1)])
    y = IntervalVector.from_pairs([(0, 2), (1, 2)])
    assert vec_relation(x, y, VecLU.PRECEQ)
    assert not vec_relation(x, y, VecLU.PRECS)
    assert vec_relation(x, IntervalVector.from_pairs([(1, 2), (1, 2)]), VecLU.PRECS)
    with pytest.raises(IntervalError):
        vec_relation(x, IntervalVector.from_pairs([(0, 1)]), VecLU.PRECS)
