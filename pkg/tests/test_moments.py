"""Primitives are checked against finite differences of their defining integrands."""
from fractions import Fraction as F

import mpmath
import pytest

from cubepot.exactnum import X, Y, BiPoly
from cubepot.moments import (
    double_primitive,
    force_double_primitive,
    point_force_primitive,
    primitive_A,
    primitive_B,
    u_poly,
    v_poly,
)

POINTS = [(0.3, -0.4), (1.7, 0.2), (-0.9, -2.1), (0.05, 0.6)]


def _Erf(t):
    return mpmath.sqrt(mpmath.pi) / 2 * mpmath.erf(t)


def _pair_value(pair, x, y):
    return pair.gauss_coeff(x, y) * mpmath.exp(-(x - y) ** 2) + pair.erf_coeff(x, y) * _Erf(x - y)


def _mp_poly(p: BiPoly):
    def f(x, y):
        return sum(mpmath.mpf(c.numerator) / c.denominator * x**i * y**j for (i, j), c in p.items())
    return f


def _mp_pair(pair):
    g, e = _mp_poly(pair.gauss_coeff), _mp_poly(pair.erf_coeff)
    return lambda x, y: g(x, y) * mpmath.exp(-(x - y) ** 2) + e(x, y) * _Erf(x - y)


def test_recursion_examples():
    assert u_poly(0).is_zero() and v_poly(0) == BiPoly.const(1)
    assert u_poly(1) == BiPoly.const(F(-1, 2))
    assert v_poly(1) == Y
    assert v_poly(2) == Y * Y + BiPoly.const(F(1, 2))
    assert u_poly(2) == Y * F(-1, 2) - X * F(1, 2)


def test_double_primitive_base_case():
    p = double_primitive(0, 0)
    assert p.gauss_coeff == BiPoly.const(F(-1, 2))
    assert p.erf_coeff == Y - X


@pytest.mark.parametrize("n", range(7))
def test_primitive_A_derivative(n):
    f = _mp_pair(primitive_A(n))
    with mpmath.workdps(30):
        for x, y in map(lambda p: map(mpmath.mpf, p), POINTS):
            d = mpmath.diff(lambda t: f(t, y), x)
            assert abs(d - x**n * mpmath.exp(-(x - y) ** 2)) < 1e-20


@pytest.mark.parametrize("n", range(6))
def test_primitive_B_derivative(n):
    f = _mp_pair(primitive_B(n))
    with mpmath.workdps(30):
        for x, y in map(lambda p: map(mpmath.mpf, p), POINTS):
            d = mpmath.diff(lambda t: f(t, y), x)
            assert abs(d - x**n * _Erf(x - y)) < 1e-20


@pytest.mark.parametrize("n,m", [(n, m) for n in range(4) for m in range(4)])
def test_double_primitive_mixed_derivative(n, m):
    f = _mp_pair(double_primitive(n, m))
    with mpmath.workdps(30):
        for x, y in map(lambda p: map(mpmath.mpf, p), POINTS):
            d = mpmath.diff(f, (x, y), (1, 1))
            assert abs(d - x**n * y**m * mpmath.exp(-(x - y) ** 2)) < 1e-18


@pytest.mark.parametrize("n,m", [(n, m) for n in range(4) for m in range(4)])
def test_force_double_primitive_mixed_derivative(n, m):
    f = _mp_pair(force_double_primitive(n, m))
    with mpmath.workdps(30):
        for x, y in map(lambda p: map(mpmath.mpf, p), POINTS):
            d = mpmath.diff(f, (x, y), (1, 1))
            assert abs(d - x**n * y**m * (x - y) * mpmath.exp(-(x - y) ** 2)) < 1e-18


@pytest.mark.parametrize("n", range(6))
def test_point_force_primitive_derivative(n):
    f = _mp_pair(point_force_primitive(n))
    with mpmath.workdps(30):
        for x, y in map(lambda p: map(mpmath.mpf, p), POINTS):
            d = mpmath.diff(lambda t: f(t, y), x)
            assert abs(d - x**n * (x - y) * mpmath.exp(-(x - y) ** 2)) < 1e-20


@pytest.mark.parametrize("n,m", [(n, m) for n in range(7) for m in range(7) if n + m <= 6])
def test_force_degrees_exact(n, m):
    assert force_double_primitive(n, m).degrees == (n + m - 1, n + m)


@pytest.mark.parametrize("n,m", [(n, m) for n in range(7) for m in range(7) if n + m <= 6])
def test_double_primitive_degrees(n, m):
    assert double_primitive(n, m).degrees == (n + m, n + m + 1)
