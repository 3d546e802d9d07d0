import numpy as np
import pytest

from quasipareto.duality import (DualPoint, converse_duality_check, is_dual_feasible, lagrange_value,
                                 strong_duality_pipeline, weak_duality_check)
from quasipareto.interval import VecLU
from quasipareto.problem import load_fixture

EX41_DUAL = DualPoint([1.0], [0.5], [0.5], [(1.0, 1.0)])
POST32_DUAL = DualPoint([0.0], [0.5], [0.5], [(0.5, 1.0)])


def test_lagrange_value_is_the_objective():
    p = load_fixture("ex41")
    L = lagrange_value(p, EX41_DUAL)
    assert L[0].lo == pytest.approx(1 / 3, abs=1e-15) and L[0].hi == pytest.approx(4 / 3, abs=1e-15)
    other = DualPoint([1.0], [1.0], [0.0], [])
    assert lagrange_value(p, other).to_list() == L.to_list()


def test_example_41_complementarity_clause_fails():
    rep = is_dual_feasible(load_fixture("ex41"), EX41_DUAL)
    assert rep.clauses["inclusion"] and rep.details["inclusion_residual"] == 0.0
    assert not rep.clauses["complementarity"]
    assert rep.details["mu_g"][0]["product"] == -1.0
    assert not rep.feasible


def test_post32_stated_point_is_feasible():
    rep = is_dual_feasible(load_fixture("post32"), POST32_DUAL)
    assert rep.feasible and rep.details["mu_g"][0]["product"] == 0.0


def test_normalization_clause():
    rep = is_dual_feasible(load_fixture("post32"), DualPoint([0.0], [0.5], [0.6], [(0.5, 1.0)]))
    assert not rep.clauses["normalization"]


def test_example_41_weak_violation():
    v = weak_duality_check(load_fixture("ex41"), [0.0], EX41_DUAL, VecLU.PRECS)
    assert v.status == "VIOLATION"
    assert v.bound[0].lo == pytest.approx(1 / 12, abs=1e-15)
    assert v.bound[0].hi == pytest.approx(17 / 15, abs=1e-15)
    assert v.audit["class"] == "epq"


@pytest.mark.parametrize("mode", [VecLU.PRECS, VecLU.PRECEQ])
def test_self_comparison_never_violates(mode):
    p = load_fixture("post32")
    assert weak_duality_check(p, [0.0], POST32_DUAL, mode, audit=False).status == "HOLDS-CLAIM"


@pytest.mark.parametrize("mode", [VecLU.PRECS, VecLU.PRECEQ])
def test_post32_weak_duality_on_samples(mode):
    p = load_fixture("post32")
    d, _ = strong_duality_pipeline(p, [0.0])
    for x in np.random.default_rng(0).uniform(0, 5, 100):
        assert weak_duality_check(p, [x], d, mode, audit=False).status == "HOLDS-CLAIM"


def test_strong_pipeline():
    d, rep = strong_duality_pipeline(load_fixture("post32"), [0.0])
    assert rep.status == "PIPELINE-OK" and rep.equality and rep.feasibility.feasible
    d, rep = strong_duality_pipeline(load_fixture("ex31"), [0.0, 0.0])
    assert rep.status == "PIPELINE-OK" and d.mu == []
    d, rep = strong_duality_pipeline(load_fixture("ex41"), [1.0])
    assert d is None and rep.status == "PIPELINE-FAILURE"


def test_converse_duality():
    assert converse_duality_check(load_fixture("post32"), POST32_DUAL).status == "CONSISTENT"
    assert converse_duality_check(load_fixture("ex41"), EX41_DUAL).status == "NOT-APPLICABLE"
    bad = DualPoint([-1.0], [0.5], [0.5], [])
    v = converse_duality_check(load_fixture("ex41"), bad)
    assert v.status == "NOT-APPLICABLE" and any("primal" in r for r in v.reasons)


def test_lambda_length_mismatch():
    with pytest.raises(ValueError):
        DualPoint([0.0], [0.5], [0.25, 0.25])
