import numpy as np
import pytest

from quasipareto.expr import (EvaluationError, ExprSyntaxError, NonsmoothCompositionError,
                              UnknownIdentifierError, evaluate, parse_expr)


def test_batch_matches_pointwise():
    e = parse_expr("x1^2 + (x1*x2 - 1)^2 - abs(x2)", 2)
    X = np.random.default_rng(0).uniform(-2, 2, (2, 50))
    batch = evaluate(e, X)
    for j in range(50):
        assert batch[j] == evaluate(e, X[:, j])


def test_parameter_broadcasts_over_batch():
    e = parse_expr("-t*x", 1)
    ts = np.array([0.0, 0.5, 1.0]).reshape(3, 1)
    out = evaluate(e, np.array([[1.0, 2.0]]), ts)
    assert out.shape == (3, 2)
    assert out[1, 1] == -1.0


def test_missing_parameter_value():
    with pytest.raises(EvaluationError):
        evaluate(parse_expr("t*x", 1), [1.0])


@pytest.mark.parametrize("text,err", [
    ("x +", ExprSyntaxError),
    ("y", UnknownIdentifierError),
    ("sqrt(x)", UnknownIdentifierError),
    ("abs(abs(x))", NonsmoothCompositionError),
    ("max(abs(x), 1)", NonsmoothCompositionError),
    ("1/x", NonsmoothCompositionError),
])
def test_grammar_errors(text, err):
    with pytest.raises(err):
        parse_expr(text, 1)


def test_error_reports_column():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("x + * 2", 1)
    assert "column" in str(info.value)


def test_constant_fractions_parse():
    assert evaluate(parse_expr("2*x/3", 1), [3.0]) == 2.0
    assert evaluate(parse_expr("min(x/2, 2*x/3)", 1), [-3.0]) == -2.0
