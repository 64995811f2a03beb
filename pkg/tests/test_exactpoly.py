from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from orbicheck import kernel
from orbicheck.exactpoly import (
    INF,
    NotDivisible,
    Poly,
    PolySyntaxError,
    divide,
    divides,
    exact_divide,
    extend,
    looks_squarefree,
    parse_poly,
    parse_rational,
    partial_derivative,
    poly_arithmetic,
    product,
    strip_factor,
    substitute,
    vanishing_order,
    variables,
)

a, m = variables(2)
NAMES = ["a", "m"]
FIXTURE = settings(max_examples=60, deadline=None,
                   suppress_health_check=[HealthCheck.function_scoped_fixture])


def P(text, names=NAMES):
    return parse_poly(text, names)


def polys(arity=2, max_terms=4, max_deg=3):
    exps = st.tuples(*[st.integers(0, max_deg)] * arity)
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda t: Poly(arity, t))


def test_backend_selected():
    assert kernel.BACKEND in ("cython", "python")


# -- arithmetic -------------------------------------------------------------------


def test_arithmetic_examples(backend):
    assert poly_arithmetic(a, a, "add") == 2 * a
    assert poly_arithmetic(a, m ** 2, "multiply") == P("a*m^2")
    assert poly_arithmetic(a + m, a - m, "multiply") == a ** 2 - m ** 2
    assert poly_arithmetic(a, a, "subtract").is_zero()


def test_arithmetic_errors():
    with pytest.raises(ValueError, match="arity"):
        poly_arithmetic(a, Poly.variable(3, 0), "add")
    with pytest.raises(ValueError, match="unknown"):
        poly_arithmetic(a, a, "divide")


def test_zero_terms_are_dropped():
    p = Poly(2, {(1, 0): 1, (0, 1): 0})
    assert p == a and len(p) == 1
    assert (a - a).terms == {}


def test_scalar_coercion_and_powers():
    assert 3 - a == -(a - 3)
    assert (a + 1) ** 0 == Poly.constant(2, 1)
    assert Fraction(1, 2) * (2 * a) == a
    with pytest.raises(ValueError):
        a ** -1


def test_degree_and_leading_term():
    p = P("a^2*m + 3*m^3 - 1")
    assert p.degree() == 3
    assert p.degree_in(0) == 2
    assert p.leading_term() == ((2, 1), Fraction(1))  # grlex: ties broken lexicographically
    assert p.variables_used() == {0, 1}


def test_to_str_roundtrip():
    p = P("1/2*a^2*m - 3*m + 7")
    assert P(p.to_str(NAMES)) == p
    assert Poly.constant(2, 0).to_str(NAMES) == "0"


def test_evaluate():
    assert P("a*m^2 + 1").evaluate([2, Fraction(1, 2)]) == Fraction(3, 2)


# -- division ---------------------------------------------------------------------


def test_exact_divide_examples(backend):
    assert exact_divide(P("a*m^2"), a) == m ** 2
    with pytest.raises(NotDivisible):
        exact_divide(P("a*m^2 + 1"), a)
    assert exact_divide((a + m) ** 2, a + m) == a + m


def test_divide_by_zero():
    with pytest.raises(ZeroDivisionError):
        divide(a, Poly.constant(2, 0))


def test_divides():
    assert divides(a + 1, a ** 2 - 1)
    assert not divides(a + 2, a ** 2 - 1)


def test_vanishing_order_examples(backend):
    g = P("a*m^2")
    assert vanishing_order(g, m) == 2
    assert vanishing_order(g, a) == 1
    assert vanishing_order(Poly.constant(2, 0), a) == INF
    assert vanishing_order((a + m) ** 3 * (a - m), a + m) == 3
    with pytest.raises(ValueError):
        vanishing_order(g, Poly.constant(2, 5))


def test_vanishing_order_scaled_coordinate():
    assert vanishing_order(a ** 3 * m, 2 * a) == 3


def test_strip_factor():
    k, u = strip_factor(4 * a ** 2 * (m + 1), 2 * a)
    assert k == 2 and u == m + 1
    k, u = strip_factor((a + m) ** 2 * (a + 1), a + m)
    assert k == 2 and u == a + 1
    assert strip_factor(Poly.constant(2, 0), a)[0] == INF


@FIXTURE
@given(g=polys(), q=polys())
def test_division_roundtrip(backend, g, q):
    if q.is_zero():
        return
    quo, rem = divide(g, q)
    assert quo * q + rem == g
    assert exact_divide(g * q, q) == g


@FIXTURE
@given(g=polys(), h=polys(), k=st.integers(0, 2), j=st.integers(0, 2))
def test_valuation_additive(backend, g, h, k, j):
    p = a * m + 1
    g, h = g * p ** k, h * p ** j
    if g.is_zero() or h.is_zero():
        return
    assert vanishing_order(g * h, p) == vanishing_order(g, p) + vanishing_order(h, p)


@settings(max_examples=60, deadline=None)
@given(p=polys(), q=polys(), r=polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) * r == p * r + q * r
    assert (p * q) * r == p * (q * r)
    assert hash(p + q) == hash(q + p)


# -- substitution and derivatives -------------------------------------------------


def test_substitute_examples(backend):
    u, v = variables(2)
    assert substitute(v, [a, P("a*m^2")]) == P("a*m^2")
    c, n = variables(2)
    assert substitute(u, [c * n ** 2, c]) == c * n ** 2
    assert substitute(u, [u, v]) == u


def test_substitute_arity_mismatch():
    with pytest.raises(ValueError):
        substitute(a, [a])


def test_substitute_changes_arity():
    t = Poly.variable(1, 0)
    assert substitute(P("a*m^2"), [t, Poly.constant(1, 0)]).is_zero()
    assert substitute(P("a + m"), [t, t ** 2]) == t + t ** 2


def test_partial_derivative_examples():
    assert partial_derivative(P("a*m^2"), 1) == 2 * a * m
    assert partial_derivative(P("a*m^2"), 0) == m ** 2
    assert partial_derivative(Poly.constant(2, 7), 0).is_zero()
    with pytest.raises(IndexError):
        partial_derivative(a, 2)


def test_extend_and_product():
    assert extend(a, 3, [2]) == Poly.variable(3, 2)
    assert product([a, m, a], 2) == a ** 2 * m


def test_looks_squarefree():
    assert looks_squarefree(a * m + 1)
    assert looks_squarefree(a)
    assert not looks_squarefree((a + m) ** 2)


# -- parser -----------------------------------------------------------------------


def test_parse_basic():
    assert P("a*m^2") == a * m ** 2
    assert P("-(a - 1/2)^2") == -(a - Fraction(1, 2)) ** 2
    assert P("3/6") == Poly.constant(2, Fraction(1, 2))
    assert parse_poly("x", {"x": 1, "y": 0}) == Poly.variable(2, 1)


def test_parse_rejects_implicit_multiplication():
    with pytest.raises(PolySyntaxError, match="implicit multiplication"):
        P("a m^2")
    with pytest.raises(PolySyntaxError):
        P("2a")


@pytest.mark.parametrize("bad", ["a +", "a^", "(a", "a)", "b", "a^-1", "1/0", ""])
def test_parse_errors(bad):
    with pytest.raises((PolySyntaxError, ZeroDivisionError)):
        P(bad)


def test_parse_error_column():
    with pytest.raises(PolySyntaxError) as info:
        P("a + * m")
    assert info.value.column == 5


def test_parse_rational():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("0") == 0
