"""Subdifferentials against central differences and hand-derived kink sets."""

import numpy as np
import pytest

from quasipareto.expr import evaluate, parse_expr
from quasipareto.problem import load_fixture
from quasipareto.subdiff import limiting_subdiff


def central_difference(expr, x, t=None, h=1e-6):
    g = np.zeros_like(x)
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = h
        g[j] = (evaluate(expr, x + e, t) - evaluate(expr, x - e, t)) / (2 * h)
    return g


def fixture_exprs(name):
    p = load_fixture(name)
    exprs = [(e, None) for pair in p.objectives for e in pair]
    exprs += [(p.constraint.expr, t) for t in (0.25, 0.5, 1.0)]
    return p, exprs


@pytest.mark.parametrize("name", ["ex31", "ex32", "post32", "ex41"])
def test_smooth_points_match_finite_differences(name):
    p, exprs = fixture_exprs(name)
    rng = np.random.default_rng(7)
    for x in rng.uniform(-3, 3, (1000, p.n)):
        for e, t in exprs:
            s = limiting_subdiff(e, x, t)
            assert s.is_singleton and s.exact
            np.testing.assert_allclose(s.all_vertices()[0], central_difference(e, x, t), atol=1e-5)


def vertex_set(s):
    return sorted(tuple(float(a) for a in v) for v in s.all_vertices())


@pytest.mark.parametrize("text,hull,expected", [
    ("abs(x)", True, [(-1.0,), (1.0,)]),
    ("-abs(x)", False, [(-1.0,), (1.0,)]),
    ("max(x/2, 2*x/3)", True, [(0.5,), (2 / 3,)]),
    ("min(x/2, 2*x/3)", False, [(0.5,), (2 / 3,)]),
    ("max(x, -x, 0)", True, [(-1.0,), (1.0,)]),
])
def test_kinks_at_zero(text, hull, expected):
    s = limiting_subdiff(parse_expr(text, 1), [0.0])
    assert s.exact
    assert s.hull == hull or len(s.terms) == 1
    assert vertex_set(s) == sorted(expected)
    if not hull:
        assert len(s.terms) == len(expected)


def test_two_dimensional_min_of_linears():
    s = limiting_subdiff(parse_expr("min(x1 + x2, x1 - x2)", 2), [0.0, 0.0])
    assert not s.hull and s.exact
    assert vertex_set(s) == [(1.0, -1.0), (1.0, 1.0)]


def test_norm_at_origin_is_unit_ball():
    s = limiting_subdiff(parse_expr("norm(x1, x2)", 2), [0.0, 0.0])
    assert s.exact and s.terms[0].radius == 1.0


def test_overlapping_kinks_flag_superset():
    s = limiting_subdiff(parse_expr("abs(x1) + abs(x1 + x2)", 2), [0.0, 0.0])
    assert not s.exact


def test_fixture_constraint_kink():
    p = load_fixture("ex31")
    s = limiting_subdiff(p.constraint.expr, [0.0, 0.0], 0.5)
    # -t|x1| - t|x2| at the origin: four corner gradients (+-t, +-t), taken as a union
    assert vertex_set(s) == sorted((a, b) for a in (-0.5, 0.5) for b in (-0.5, 0.5))
