import numpy as np
import pytest

from coadea.expressions import ExpressionError, compile_expression, split_constraint


@pytest.mark.parametrize(
    "text,x,expected",
    [
        ("1 + 2 * 3", [0.0], 7.0),
        ("(1 + 2) * 3", [0.0], 9.0),
        ("2 ^ 3 ^ 2", [0.0], 512.0),  # right-associative
        ("-x1 ^ 2", [3.0], -9.0),     # unary minus binds looser than ^
        ("2 ^ -1", [0.0], 0.5),
        ("x1 * x2 - x2 / 4", [2.0, 8.0], 14.0),
        ("4x 1".replace("x 1", "*x1"), [2.5], 10.0),
        ("3 × x1 ÷ 2", [4.0], 6.0),
        ("(x1 - 5)^2 + (x2 - 5)^2", [0.0, 0.0], 50.0),
        ("1.5 + .5", [0.0], 2.0),
    ],
)
def test_expression_values(text, x, expected):
    fn = compile_expression(text, len(x))
    assert fn(np.asarray(x)) == pytest.approx(expected)


def test_double_star_alias():
    fn = compile_expression("x1 ** 2", 1)
    assert fn(np.array([4.0])) == pytest.approx(16.0)


@pytest.mark.parametrize(
    "text",
    ["", "x3", "1 +", "(1 + 2", "2 $ 3", "x0", "1 2"],
)
def test_malformed_expressions_rejected(text):
    with pytest.raises(ExpressionError):
        compile_expression(text, 2)


def test_constraint_normalization():
    le = split_constraint("x1 + x2 <= 3", 2)
    ge = split_constraint("x1 + x2 >= 3", 2)
    x = np.array([1.0, 1.0])
    assert le(x) == pytest.approx(-1.0)  # satisfied by 1
    assert ge(x) == pytest.approx(1.0)   # violated by 1
    with pytest.raises(ExpressionError, match="<="):
        split_constraint("x1 + x2", 2)


def test_compiled_expressions_are_pure():
    fn = compile_expression("x1^3 - 2*x2 + 0.5", 2)
    x = np.array([1.7, -0.3])
    values = {fn(x) for _ in range(100)}
    assert len(values) == 1
