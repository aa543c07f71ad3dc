"""Exact arithmetic: field laws, exact order, and angle-group queries.

The reference oracle for every numeric assertion is mpmath at 120 bits;
the library's exact predicates must agree with it on every generated
value.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergolab import (
    ExactnessError,
    QuadraticReal,
    RotationNumber,
    SQRT2_MINUS_1,
    integral_combination,
)

FIELDS = (2, 3, 5, 6, 7, 10)

fractions = st.fractions(
    min_value=-8, max_value=8, max_denominator=12
)


def quadratics(d: int) -> st.SearchStrategy[QuadraticReal]:
    return st.builds(QuadraticReal, fractions, fractions, st.just(d))


def _mp(x: QuadraticReal) -> mpmath.mpf:
    with mpmath.workprec(120):
        return mpmath.mpf(x.a.numerator) / x.a.denominator + mpmath.sqrt(
            x.d
        ) * x.b.numerator / x.b.denominator


# ---------------------------------------------------------------------------
# field laws
# ---------------------------------------------------------------------------


@given(quadratics(2), quadratics(2), quadratics(2))
@settings(max_examples=200)
def test_ring_laws(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == 0
    assert x - y == x + (-y)


@given(quadratics(3), fractions)
@settings(max_examples=100)
def test_scalar_mixing(x, c):
    assert x + c == c + x
    assert x * c == c * x
    assert (x + c) - c == x


def test_distinct_fields_do_not_mix():
    a = QuadraticReal.from_integers(0, 1, 2, 1)
    b = QuadraticReal.from_integers(0, 1, 3, 1)
    with pytest.raises(ValueError):
        a + b
    # ... unless one side is rational, which belongs to every field.
    c = QuadraticReal.of(Fraction(1, 2), d=3)
    assert (a + c).d == 2


def test_squarefree_folding():
    # sqrt(8) = 2 sqrt(2); sqrt(9) folds into the rational part.
    assert QuadraticReal(Fraction(0), Fraction(1), 8) == QuadraticReal(
        Fraction(0), Fraction(2), 2
    )
    assert QuadraticReal(Fraction(1), Fraction(3), 9) == 10


# ---------------------------------------------------------------------------
# exact order, floor, frac
# ---------------------------------------------------------------------------


@given(st.sampled_from(FIELDS).flatmap(quadratics))
@settings(max_examples=300)
def test_sign_matches_high_precision(x):
    v = _mp(x)
    expected = 0 if v == 0 else (1 if v > 0 else -1)
    assert x.sign() == expected


@given(st.sampled_from(FIELDS).flatmap(quadratics))
@settings(max_examples=300)
def test_floor_and_frac(x):
    f = x.frac()
    assert x.floor() == int(mpmath.floor(_mp(x)))
    assert 0 <= f.sign() or f == 0
    assert (f - 1).sign() < 0
    assert x == f + x.floor()


@given(quadratics(5), quadratics(5))
@settings(max_examples=200)
def test_order_total_and_consistent(x, y):
    assert (x < y) == (_mp(x) < _mp(y))
    assert (x == y) == (_mp(x) == _mp(y))
    assert (x < y) or (y < x) or (x == y)


def test_float_conversion_is_correctly_rounded():
    x = QuadraticReal.from_integers(-1, 1, 2, 1)
    with mpmath.workprec(120):
        want = float(mpmath.sqrt(2) - 1)
    assert float(x) == want
    assert abs(x.approx_float() - want) < 1e-12


# ---------------------------------------------------------------------------
# rotation numbers
# ---------------------------------------------------------------------------


def test_quadratic_angle_validation():
    with pytest.raises(ValueError):
        RotationNumber.quadratic(0, 0, 2, 1)  # q = 0: rational
    with pytest.raises(ValueError):
        RotationNumber.quadratic(0, 1, 4, 1)  # perfect square: rational
    with pytest.raises(ValueError):
        RotationNumber.quadratic(3, 1, 2, 1)  # outside (0, 1)
    with pytest.raises(ValueError):
        RotationNumber.quadratic(-1, 1, 2, 0)  # zero denominator


def test_default_angle_value():
    assert math.isclose(SQRT2_MINUS_1.to_float(), math.sqrt(2) - 1, rel_tol=1e-15)
    assert SQRT2_MINUS_1.is_exact


def test_one_minus_is_an_involution():
    g = SQRT2_MINUS_1
    h = g.one_minus()
    assert h.exact == 1 - g.exact
    assert h.one_minus() == g
    assert 0 < h.to_float() < 1


@given(st.integers(-40, 40))
def test_frac_multiple(k):
    g = SQRT2_MINUS_1
    got = g.frac_multiple(k)
    assert got == (g.exact * k).frac()
    assert 0 <= got.approx_float() < 1 + 1e-12


def test_json_round_trip():
    for g in (SQRT2_MINUS_1, RotationNumber.quadratic(1, 1, 5, 4),
              RotationNumber.decimal("0.1234567890123456789", bits=96)):
        assert RotationNumber.from_json(g.to_json()) == g
    with pytest.raises(ValueError):
        RotationNumber.from_json({"nope": 1})


def test_decimal_kind_is_reproducible_but_inexact():
    g = RotationNumber.decimal("0.5772156649015328606", bits=128)
    assert g.value(128) == g.value(128)
    assert not g.is_exact
    with pytest.raises(ExactnessError):
        _ = g.exact
    with pytest.raises(ExactnessError):
        g.one_minus()


# ---------------------------------------------------------------------------
# integral combinations (the group-membership backbone)
# ---------------------------------------------------------------------------


def test_integral_combination_basics():
    g = SQRT2_MINUS_1
    assert integral_combination([(g, 1), (g.one_minus(), 1)])  # g + (1-g) = 1
    assert integral_combination([(g, 0)])
    assert not integral_combination([(g, 3)])
    assert not integral_combination([(g, 1), (RotationNumber.quadratic(-1, 1, 3, 1), 1)])


def test_integral_combination_requires_exact_angles():
    d = RotationNumber.decimal("0.41421356237309515", bits=64)
    with pytest.raises(ExactnessError):
        integral_combination([(d, 1)])
    # zero coefficients never force exactness
    assert integral_combination([(d, 0)])


@given(st.integers(-10, 10), st.integers(-10, 10))
def test_integral_combination_linearity(j, k):
    """j*g + k*(1-g) is integral iff j == k (g irrational)."""
    g = SQRT2_MINUS_1
    assert integral_combination([(g, j), (g.one_minus(), k)]) == (j == k)
