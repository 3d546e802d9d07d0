"""Dominance testing against a from-scratch classical oracle."""

import numpy as np
import pytest

from conftest import random_problem
from quasipareto.pareto import (REFUTES, SolutionType, beats, dominance_mask, falsify_on_grid, grid_points,
                                inclusion_audit, shifted_reference)
from quasipareto.problem import eval_objectives, feasible_mask, load_fixture


def oracle(p, xbar, x):
    """Types whose dominance system ``x`` satisfies, written directly from the definitions."""
    fx, fb = eval_objectives(p, x), eval_objectives(p, xbar)
    r = float(np.linalg.norm(np.asarray(x, float) - np.asarray(xbar, float)))
    rows = []
    for a, b, e in zip(fx, fb, p.epsilon):
        ref_lo, ref_hi = b.lo - r * e.hi, b.hi - r * e.lo
        leq = a.lo <= ref_lo and a.hi <= ref_hi
        lt = leq and (a.lo < ref_lo or a.hi < ref_hi)
        lts = a.lo < ref_lo and a.hi < ref_hi
        rows.append((leq, lt, lts))
    out = set()
    if all(l for l, _, _ in rows) and any(t for _, t, _ in rows):
        out.add(SolutionType.T1Q)
    if all(l for l, _, _ in rows) and any(s for _, _, s in rows):
        out.add(SolutionType.T2Q)
    if all(t for _, t, _ in rows):
        out.add(SolutionType.T1QW)
    if all(s for _, _, s in rows):
        out.add(SolutionType.T2QW)
    return out


def test_scalar_and_batch_agree_with_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = random_problem(rng)
        xbar = rng.uniform(-1, 1, p.n)
        X = rng.uniform(-2, 2, (p.n, 200))
        for st in SolutionType:
            mask = dominance_mask(p, xbar, X, st)
            for j in range(X.shape[1]):
                expect = st in oracle(p, xbar, X[:, j])
                assert (beats(p, xbar, X[:, j], st) is not None) == expect == bool(mask[j])


def test_shifted_reference_example():
    p = load_fixture("ex31")
    ref = shifted_reference(p, [1.0, 0.0], [0.0, 0.0])
    # f(1, 0) = [2, 3] shifted by [1, 2] * 1
    assert ref[0].lo == 0.0 and ref[0].hi == 2.0


def test_example_31_origin_grid_certified():
    rep = falsify_on_grid(load_fixture("ex31"), [0.0, 0.0], SolutionType.T1Q, (-3, 3), 121)
    assert rep.status == "GRID-CERTIFIED" and rep.scanned == 121 ** 2


def test_example_41_witness_refutes_every_type():
    p = load_fixture("ex41")
    w = beats(p, [1.0], [0.0], SolutionType.T2QW)
    assert w is not None
    assert inclusion_audit(p, [1.0], w) == list(SolutionType)


def test_malformed_witness_rejected():
    p = load_fixture("ex41")
    w = beats(p, [1.0], [0.0], SolutionType.T2QW)
    fake = type(w)(np.array([1.0]), w.stype, w.values, w.reference, w.relations)
    with pytest.raises(ValueError, match="malformed witness"):
        inclusion_audit(p, [1.0], fake)


def test_injected_points_are_scanned_after_grid():
    p = load_fixture("ex31").exact_mode()
    rep = falsify_on_grid(p, [1.0, 1.0], SolutionType.T2QW, (-3, 3), 0, extra_points=[[1.0, 1.0], [0.5, 2.0]])
    assert rep.index == 1 and rep.witness.x.tolist() == [0.5, 2.0]


def test_grid_points_layout():
    X = grid_points([(0, 1), (10, 12)], [2, 3])
    assert X.shape == (2, 6)
    assert X[:, 1].tolist() == [0.0, 11.0]


def test_refutes_lattice_is_closed():
    for key, refuted in REFUTES.items():
        assert key in refuted
        for other in refuted:
            assert set(REFUTES[other]) <= set(refuted)


def test_feasible_points_only():
    p = load_fixture("ex41")
    rep = falsify_on_grid(p, [1.0], SolutionType.T2QW, (-2, 2), 41)
    assert feasible_mask(p, rep.witness.x.reshape(1, 1))[0]
