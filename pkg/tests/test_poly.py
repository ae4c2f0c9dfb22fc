from fractions import Fraction

import pytest

from curvehull.poly import Poly, PolyError, parse_poly


def test_zero_coefficients_dropped():
    p = Poly(("x", "y"), {(1, 0): 1, (0, 1): 0})
    assert (0, 1) not in p.terms
    assert p == Poly.var(("x", "y"), "x")


def test_arity_enforced():
    with pytest.raises(PolyError):
        Poly(("x", "y"), {(1,): 1})


def test_arithmetic_exact():
    x = Poly.var(("x",), "x")
    p = (x + 1) * (x - 1)
    assert p == x ** 2 - 1
    assert p.evaluate({"x": Fraction(1, 3)}) == Fraction(1, 9) - 1


def test_alignment_across_variable_sets():
    x = Poly.var(("x",), "x")
    y = Poly.var(("y",), "y")
    p = x * y + x
    assert set(p.vars) == {"x", "y"}
    assert p.evaluate({"x": 2, "y": 3}) == 8


def test_substitute_shear():
    f = parse_poly("x*y - 1", ("x", "y"))
    g = f.substitute("x", parse_poly("x + y", ("x", "y")))
    assert g == parse_poly("x*y + y^2 - 1", ("x", "y"))


def test_coeff_shift_roundtrip():
    f = parse_poly("y^2 + x^2*(x-1)*(x-2)", ("x", "y"))
    assert f.coeff_in("y", 2) == Poly.const(("x", "y"), 1)
    assert f.coeff_in("y", 0) == parse_poly("x^4 - 3*x^3 + 2*x^2", ("x", "y"))
    assert f.coeff_in("y", 0).shift("y", 2) == parse_poly("(x^4 - 3*x^3 + 2*x^2)*y^2", ("x", "y"))


def test_top_form_and_derivative():
    f = parse_poly("y^2 + x^2*(x-1)*(x-2)", ("x", "y"))
    assert f.top_form() == parse_poly("x^4", ("x", "y"))
    assert f.derivative("y") == parse_poly("2*y", ("x", "y"))


def test_parse_rationals_and_errors():
    assert parse_poly("1/2*x + 0.25", ("x",)).evaluate({"x": 1}) == Fraction(3, 4)
    assert parse_poly("-(x - 2)^2", ("x",)) == -(Poly.var(("x",), "x") - 2) ** 2
    with pytest.raises(PolyError):
        parse_poly("x + q", ("x",))
    with pytest.raises(PolyError):
        parse_poly("x / y", ("x", "y"))
    with pytest.raises(PolyError):
        parse_poly("x ^ -2", ("x",))
    with pytest.raises(PolyError):
        parse_poly("(x + 1", ("x",))


def test_str_deterministic():
    f = parse_poly("y^2 + x^2*(x-1)*(x-2)", ("x", "y"))
    assert str(f) == "x^4-3*x^3+2*x^2+y^2"
