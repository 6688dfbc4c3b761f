import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from ncfit.errors import DivisionByZero, ParseError, PrecisionError, ReconstructionFailure
from ncfit.scalars import (CycloElement, cyclo_reduce, euler_phi, p_content, parse_rational,
                           rational_reconstruct)

X = sympy.Symbol("x")
CONDUCTORS = [1, 2, 3, 4, 5, 6, 8, 12]

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def cyclo(draw, m=None):
    m = m or draw(st.sampled_from(CONDUCTORS))
    coeffs = draw(st.lists(fractions, min_size=euler_phi(m), max_size=euler_phi(m)))
    return CycloElement(m, coeffs)


def sympy_reduce(poly, m):
    """Independent reduction through sympy's cyclotomic polynomial."""
    expr = sum(sympy.Rational(c.numerator, c.denominator) * X ** i
               for i, c in enumerate(map(Fraction, poly)))
    r = sympy.Poly(sympy.rem(expr, sympy.cyclotomic_poly(m, X), X), X)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(r.all_coeffs())]
    coeffs += [Fraction(0)] * (euler_phi(m) - len(coeffs))
    return coeffs[:euler_phi(m)]


# -- examples ---------------------------------------------------------------

def test_reduce_zeta4_squared_plus_one():
    assert cyclo_reduce([1, 0, 1], 4).is_zero()


def test_reduce_x2_plus_x_mod_phi3():
    assert cyclo_reduce([0, 1, 1], 3) == CycloElement.rational(-1, 3)


def test_reduce_zeta8_fourth_power():
    assert cyclo_reduce([0, 0, 0, 0, 1], 8) == CycloElement.rational(-1, 8)


def test_p_content_examples():
    assert p_content(Fraction(3, 4), 3) == 1
    assert p_content(Fraction(1, 3), 3) == -1
    # (1 + zeta_3)/3: both power-basis coordinates are 1/3
    assert p_content(CycloElement(3, [Fraction(1, 3), Fraction(1, 3)]), 3) == -1
    assert p_content(0, 3) == math.inf


def test_rational_reconstruct_examples():
    assert rational_reconstruct("0.333333333333", 10) == Fraction(1, 3)
    assert rational_reconstruct("2.000000000000", 10) == 2
    with pytest.raises(ReconstructionFailure):
        rational_reconstruct("0.123456789012", 3)
    with pytest.raises(PrecisionError):
        rational_reconstruct("0.33", 1000)


def test_inverse_of_zero_raises():
    with pytest.raises(DivisionByZero):
        CycloElement(5, [0, 0, 0, 0]).inverse()


def test_parse_rational_rejects_zero_denominator():
    with pytest.raises(ParseError):
        parse_rational("1/0", "field")
    assert parse_rational(" -6/4 ") == Fraction(-3, 2)


# -- oracle comparison --------------------------------------------------------

@given(st.sampled_from(CONDUCTORS), st.lists(fractions, min_size=0, max_size=16))
def test_reduction_matches_sympy(m, poly):
    assert list(cyclo_reduce(poly, m).coeffs) == sympy_reduce(poly, m)


@given(st.data())
def test_multiplication_matches_sympy(data):
    m = data.draw(st.sampled_from(CONDUCTORS))
    a, b = data.draw(cyclo(m)), data.draw(cyclo(m))
    prod = [Fraction(0)] * (2 * euler_phi(m))
    for i, x in enumerate(a.coeffs):
        for j, y in enumerate(b.coeffs):
            prod[i + j] += x * y
    assert list((a * b).coeffs) == sympy_reduce(prod, m)


# -- properties ----------------------------------------------------------------

@given(st.data())
def test_field_axioms(data):
    m = data.draw(st.sampled_from(CONDUCTORS))
    a, b, c = (data.draw(cyclo(m)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) - b == a
    if not a.is_zero():
        assert a * a.inverse() == CycloElement.rational(1, m)


@given(cyclo())
def test_galois_norm_is_rational(x):
    assert x.norm() == Fraction(x.norm())
    prod = CycloElement.rational(1, x.m)
    for k in range(1, x.m + 1):
        if math.gcd(k, x.m) == 1:
            prod = prod * x.conj(k)
    assert prod.is_rational()


@given(st.data(), st.sampled_from([3, 5, 7]))
def test_p_content_superadditive(data, p):
    m = data.draw(st.sampled_from(CONDUCTORS))
    x, y = data.draw(cyclo(m)), data.draw(cyclo(m))
    if x.is_zero() or y.is_zero():
        return
    lhs = p_content(x * y, p)
    rhs = p_content(x, p) + p_content(y, p)
    assert lhs >= rhs
    if m % p:
        assert lhs == rhs
