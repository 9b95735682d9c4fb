import math

import pytest

from pfida.errors import ExprSyntaxError, UnknownFunctionError
from pfida.expr import Bin, Call, Neg, Num, Sym, eval_expr, parse, to_str


def test_number_and_symbol():
    assert parse("3.5") == Num(3.5)
    assert parse("x1") == Sym("x1")
    assert parse("2e-3") == Num(0.002)
    assert parse(".5") == Num(0.5)


def test_precedence():
    assert parse("1 + 2*x") == Bin("+", Num(1), Bin("*", Num(2), Sym("x")))
    assert parse("1 - 2 - 3") == Bin("-", Bin("-", Num(1), Num(2)), Num(3))
    assert parse("2*x^3") == Bin("*", Num(2), Bin("^", Sym("x"), Num(3)))
    assert parse("(1 + x)*2") == Bin("*", Bin("+", Num(1), Sym("x")), Num(2))


def test_power_right_associative():
    assert parse("x^y^2") == Bin("^", Sym("x"), Bin("^", Sym("y"), Num(2)))


def test_unary_minus():
    assert parse("-x") == Neg(Sym("x"))
    assert parse("-x^2") == Neg(Bin("^", Sym("x"), Num(2)))
    assert parse("x^-2") == Bin("^", Sym("x"), Neg(Num(2)))
    assert parse("--x") == Neg(Neg(Sym("x")))
    assert parse("2 - -3") == Bin("-", Num(2), Neg(Num(3)))


def test_functions():
    assert parse("sin(x)") == Call("sin", (Sym("x"),))
    # unary minus binds tighter than *, so -c2*x1 is (-c2)*x1
    assert parse("exp(-c2*x1)") == Call("exp", (Bin("*", Neg(Sym("c2")), Sym("x1")),))


def test_unknown_function():
    with pytest.raises(UnknownFunctionError):
        parse("sinh(x)")
    # a bare name is a symbol, not a call
    assert parse("sinh") == Sym("sinh")


@pytest.mark.parametrize("bad", ["", "1 +", "(x", "x )", "2 ** 3", "x @ y", "sin(x,)"])
def test_syntax_errors(bad):
    with pytest.raises(ExprSyntaxError):
        parse(bad)


def test_syntax_error_carries_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("1 + $")
    assert exc.value.offset == 4


@pytest.mark.parametrize(
    "text, bindings, expected",
    [
        ("2^3^2", {}, 512.0),
        ("-2^2", {}, -4.0),
        ("6/3/2", {}, 1.0),
        ("1 + 2*3 - 4/2", {}, 5.0),
        ("sin(pi/2)", {}, 1.0),
        ("x^2 + y", {"x": 3.0, "y": 1.0}, 10.0),
    ],
)
def test_parse_eval(text, bindings, expected):
    assert eval_expr(parse(text), bindings) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "text",
    [
        "x1*x2/(c2*k) - x2/(c2^2*k)",
        "(c1/c2*x1 + x2 + c3/c2 + c1/c2^2)*exp(-c2*x1)",
        "kp*0.5*(x1 - x3)^2 + x2^2/2",
        "-1/cos(q2)",
        "sqrt(1 + x^2)/ln(2 + y)",
    ],
)
def test_round_trip(text):
    e = parse(text)
    assert parse(to_str(e)) == e


def test_round_trip_preserves_value():
    e = parse("-(x + 1)^2 * (y - 2)/(z + 3) + sin(x)*cos(y)^2")
    e2 = parse(to_str(e))
    bindings = {"x": 0.7, "y": -0.3, "z": 1.9}
    assert eval_expr(e2, bindings) == pytest.approx(eval_expr(e, bindings), rel=1e-15)


def test_whitespace_insignificant():
    assert parse(" 1+ 2 * x ") == parse("1+2*x")


def test_pi_is_a_symbol_bound_at_eval():
    e = parse("2*pi")
    assert eval_expr(e, {}) == pytest.approx(2 * math.pi)
