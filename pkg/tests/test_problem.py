import json

import numpy as np
import pytest

from quasipareto.problem import (Box, FiniteList, OrthantCone, ProblemError, StandingAssumptionWarning,
                                 TRange, active_indices, constraint_values, eval_objectives, feasible_mask,
                                 is_feasible, load_fixture, load_problem, omega_normal_polar,
                                 problem_from_dict)


def test_t_grid_contains_one_half_exactly():
    g = TRange(0.0, 1.0).grid()
    assert len(g) == 101 and 0.5 in g and g[0] == 0.0 and g[-1] == 1.0


def test_fixture_values():
    p = load_fixture("ex41")
    f = eval_objectives(p, [1.0])
    assert f[0].lo == pytest.approx(1 / 3, abs=1e-15) and f[0].hi == pytest.approx(4 / 3, abs=1e-15)
    assert is_feasible(p, [0.0]) and not is_feasible(p, [-0.5])


def test_active_indices_at_origin_cover_the_grid():
    p = load_fixture("post32")
    assert len(active_indices(p, [0.0])) == 101
    assert active_indices(p, [1.0]) == [0.0]


def test_batch_feasibility_agrees_with_pointwise():
    p = load_fixture("ex41")
    X = np.linspace(-1, 1, 21).reshape(1, -1)
    mask = feasible_mask(p, X)
    assert list(mask) == [is_feasible(p, X[:, j]) for j in range(21)]
    assert constraint_values(p, X).shape == (101, 21)


def test_box_normal_cone_and_polar():
    b = Box((0.0, -1.0), (1.0, 1.0))
    normal = omega_normal_polar(b, np.array([0.0, 0.2]))
    assert normal.signs == ("nonpos", "zero")
    assert normal.polar().signs == ("nonneg", "free")
    assert OrthantCone(("zero", "nonneg")).polar().signs == ("free", "nonpos")


@pytest.mark.parametrize("patch,location", [
    ({"n": 0}, "n"),
    ({"epsilon": [["1", "0"]]}, "epsilon[0]"),
    ({"epsilon": [["-1", "0"]]}, "epsilon[0]"),
    ({"objectives": [{"lower": "x +", "upper": "x"}]}, "objectives[0].lower"),
    ({"constraint": {"param": "t", "expr": "-t*x"}}, "constraint.T"),
    ({"omega": {"type": "ball"}}, "omega.type"),
])
def test_validation_errors_name_the_field(patch, location):
    data = {"n": 1, "objectives": [{"lower": "x", "upper": "x + 1"}], "epsilon": [["0", "1"]]}
    data.update(patch)
    with pytest.raises(ProblemError) as info:
        problem_from_dict(data)
    assert location in str(info.value)


def test_standing_assumption_warning():
    data = {"n": 1, "objectives": [{"lower": "x", "upper": "-x"}], "epsilon": [["0", "0"]]}
    with pytest.warns(StandingAssumptionWarning):
        problem_from_dict(data)


def test_finite_list_rejects_duplicates():
    with pytest.raises(ProblemError):
        FiniteList((0.5, 0.5))


def test_load_problem_round_trip(tmp_path):
    src = load_fixture("ex32").source
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(src))
    q = load_problem(path)
    assert q.name == "copy" and q.n == 1 and q.m == 1


def test_bad_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\"n\": 1,,}")
    with pytest.raises(ProblemError) as info:
        load_problem(path)
    assert "bad.json:1" in str(info.value)
