import math

import numpy as np
import pytest

from app.utils.errors import ConfigError
from app.utils.expression import Expression, parse_expression


def test_expression_evaluates_over_points():
    expr = parse_expression("x1^2 + sin(pi*x2) - exp(0)", 2)
    values = expr([[1.0, 0.5], [2.0, 0.0]])
    assert np.allclose(values, [1.0, 3.0]), f"got {values}"


def test_constant_expression_broadcasts():
    values = Expression("2 * cos(0)", 3)(np.zeros((4, 3)))
    assert values.shape == (4,) and np.all(values == 2.0)


def test_unary_minus_and_division():
    expr = Expression("-x1 / (1 + x2)", 2)
    assert expr([[3.0, 2.0]])[0] == pytest.approx(-1.0)
    assert Expression("+x1", 1)([[math.e]])[0] == pytest.approx(math.e)


@pytest.mark.parametrize("text", [
    "",
    "   ",
    "x1 +",
    "x3",
    "y1",
    "x0",
    "foo(x1)",
    "__import__('os')",
    "x1 % 2",
    "x1 if x2 else 0",
    "exp(x1, x2)",
    "True",
    "'a'",
    "[x1]",
    "x1.real",
])
def test_expression_rejects_unsafe_or_invalid_text(text):
    with pytest.raises(ConfigError):
        parse_expression(text, 2)


def test_expression_checks_point_dimension():
    with pytest.raises(ConfigError):
        Expression("x1", 2)(np.zeros((3, 3)))
