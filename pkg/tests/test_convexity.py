import math

import numpy as np
import pytest

from conftest import random_problem
from quasipareto.convexity import (ConvexityClass, Row, audit_class, build_rows, convexity_implication_check,
                                   default_samples, infeasibility_verified, make_anchor, solve_rows,
                                   solve_rows_cone)
from quasipareto.problem import OrthantCone, eval_objectives, load_fixture

FREE = OrthantCone(("free",))


def audit(name, cls, explicit=((1.0,),), xbar=(0.0,)):
    p = load_fixture(name)
    return audit_class(p, list(xbar), cls, default_samples(p, (-5, 5), 200, 42, explicit=explicit))


def independent_dual_value(rows, y, radius):
    a = sum(v * float(r.a[0]) for v, r in zip(y, rows))
    return math.fsum(v * r.c for v, r in zip(y, rows)) + radius * abs(a)


def test_example_32_gc_falsified_with_bound_pair():
    v = audit("ex32", ConvexityClass.GC)
    assert v.status == "FALSIFIED" and v.witness.x == [1.0]
    lo, hi, _ = v.witness.result.bounds_1d()
    assert (lo, hi) == (1.0, 0.75)
    res = v.witness.result
    assert independent_dual_value(res.rows, res.y, res.radius) <= 0
    assert v.witness.recheck["shuffled_status"] == "INFEASIBLE"


def test_example_32_sepq_consistent():
    v = audit("ex32", ConvexityClass.SEPQ)
    assert v.status == "SAMPLE-CONSISTENT" and v.samples == 201 and v.undecided == 0


def test_post32_epq_consistent_but_sepq_hits_boundary_equality():
    assert audit("post32", ConvexityClass.EPQ).status == "SAMPLE-CONSISTENT"
    v = audit("post32", ConvexityClass.SEPQ)
    assert v.status == "FALSIFIED"
    # for x < 0 the objective equals f(0) - (2/3)|x| exactly, so the strict consequent cannot hold
    x = v.witness.x[0]
    assert x < 0
    p = load_fixture("post32")
    assert eval_objectives(p, [x])[0].lo == pytest.approx(-(2 / 3) * abs(x), rel=1e-15)


def test_strict_classes_skip_the_anchor():
    v = audit("ex32", ConvexityClass.SEPQ, explicit=((0.0,),))
    assert v.samples == 200


def test_one_dimensional_decision_agrees_with_cone_program():
    rng = np.random.default_rng(4)
    for _ in range(60):
        rows = [Row(np.array([rng.normal()]), float(rng.normal()), bool(rng.integers(2)), f"r{k}")
                for k in range(int(rng.integers(1, 5)))]
        exact = solve_rows(rows, 1.0, FREE, 1)
        cone = solve_rows_cone(rows, 1.0, FREE, 1)
        if cone.status != "UNDECIDED":
            assert exact.status == cone.status
        if exact.status == "INFEASIBLE":
            assert infeasibility_verified(rows, exact.y, 1.0, FREE)


def test_bogus_certificate_rejected():
    rows = [Row(np.array([1.0]), 1.0, False, "a")]
    assert solve_rows(rows, 2.0, FREE, 1).feasible
    assert not infeasibility_verified(rows, np.array([1.0]), 2.0, FREE)
    assert not infeasibility_verified(rows, np.array([-1.0]), 2.0, FREE)


def test_two_dimensional_cone_path():
    rows = [Row(np.array([1.0, 0.0]), -0.5, True, "a"), Row(np.array([-1.0, 0.0]), -0.5, False, "b")]
    res = solve_rows(rows, 1.0, OrthantCone(("free", "free")), 2)
    assert res.status == "INFEASIBLE"
    rows[1] = Row(np.array([-1.0, 0.0]), 0.9, False, "b")
    assert solve_rows(rows, 1.0, OrthantCone(("free", "free")), 2).feasible


def test_consequent_margin_controls_rounding():
    p = load_fixture("post32")
    anchor = make_anchor(p, [0.0])
    x = [-1.9869413050849016]
    sel = [0] * len(anchor.selection_sizes())
    # the consequent is an equality in exact arithmetic; without margin rounding makes it fail
    tight, d = build_rows(anchor, x, sel, ConvexityClass.EPQ, margin=0.0)
    loose, _ = build_rows(anchor, x, sel, ConvexityClass.EPQ)
    assert solve_rows(tight, d, anchor.polar, 1).status == "INFEASIBLE"
    assert solve_rows(loose, d, anchor.polar, 1).feasible


def test_gc_implies_epq_on_samples():
    rng = np.random.default_rng(2)
    for _ in range(3):
        p = random_problem(rng, n=1, convex=True)
        pts = default_samples(p, (-2, 2), 20, 42)
        rep = convexity_implication_check(p, [0.0], pts)
        assert rep.status == "HOLDS"


def test_parallel_audit_matches_serial():
    p = load_fixture("ex32")
    pts = default_samples(p, (-5, 5), 40, 42)
    a = audit_class(p, [0.0], ConvexityClass.SEPQ, pts, jobs=1)
    b = audit_class(p, [0.0], ConvexityClass.SEPQ, pts, jobs=2)
    assert (a.status, a.systems) == (b.status, b.systems)


def test_samples_are_seeded():
    p = load_fixture("ex32")
    assert np.array_equal(default_samples(p, (-5, 5), 10, 42), default_samples(p, (-5, 5), 10, 42))
    assert not np.array_equal(default_samples(p, (-5, 5), 10, 42), default_samples(p, (-5, 5), 10, 43))
