import math

import pytest
from hypothesis import given, strategies as st

from symcartan.expr import Dual, ParseError, PoleError, evaluate, parse, variables


def test_precedence_and_unary_minus():
    assert evaluate(parse("1 + 2*3^2"), {}) == 19
    assert evaluate(parse("-x^2"), {"x": 3.0}) == -9
    assert evaluate(parse("2/4/2"), {}) == 0.25


def test_variables():
    assert variables(parse("x*y + cos(t)")) == {"x", "y", "t"}


def test_numeric_mode_functions():
    assert evaluate(parse("exp(x)", numeric=True), {"x": 1.0}) == pytest.approx(math.e)
    with pytest.raises(ParseError):
        parse("exp(x)")


def test_division_by_zero_is_a_pole():
    with pytest.raises(PoleError):
        evaluate(parse("1/(x-1)"), {"x": 1.0})


def test_error_position_points_at_offending_token():
    with pytest.raises(ParseError) as err:
        parse("x + * y")
    assert err.value.pos == 4


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_dual_gradient_matches_hand_derivative(x, y):
    tree = parse("exp(-x^2)*y/(1+2*y^2)", numeric=True)
    d = evaluate(tree, {"x": Dual.variable(x, 0, 2), "y": Dual.variable(y, 1, 2)})
    g = math.exp(-x * x)
    assert d.val == pytest.approx(g * y / (1 + 2 * y * y))
    assert d.grad[0] == pytest.approx(-2 * x * g * y / (1 + 2 * y * y), abs=1e-12)
    assert d.grad[1] == pytest.approx(g * (1 - 2 * y * y) / (1 + 2 * y * y) ** 2, abs=1e-12)
