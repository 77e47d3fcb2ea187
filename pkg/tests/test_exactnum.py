from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubepot.errors import DivisionByZero, InvalidRadicand
from cubepot.exactnum import (
    BiPoly,
    Quad,
    Surd,
    X,
    Y,
    factor_integer,
    format_rational,
    fundamental_unit,
    poly_arith,
    poly_eval,
    quad_log_basis,
    rat,
    rat_arith,
    sqrt_exact,
    squarefree_split,
    surd_simplify,
)

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**4)


def test_rat_parsing():
    assert rat("0.25") == F(1, 4)
    assert rat("-3/6") == F(-1, 2)
    assert rat(7) == F(7)
    assert rat("1e-3") == F(1, 1000)
    with pytest.raises(ValueError):
        rat("abc")


def test_rat_arith_examples():
    assert rat_arith(F(1, 3), F(1, 6), "+") == F(1, 2)
    assert rat_arith(F(2, 3), F(3, 4), "×") == F(1, 2)
    with pytest.raises(DivisionByZero):
        rat_arith(F(1), F(0), "÷")


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert rat_arith(rat_arith(a, b, "+"), c, "+") == rat_arith(a, rat_arith(b, c, "+"), "+")
    assert rat_arith(a, rat_arith(b, c, "+"), "*") == a * b + a * c
    assert rat_arith(a, b, "*") == rat_arith(b, a, "*")
    if b:
        assert rat_arith(rat_arith(a, b, "/"), b, "*") == a


def test_format_rational():
    assert format_rational(F(3, 1)) == "3"
    assert format_rational(F(-61, 13440)) == "-61/13440"


def test_bipoly_arith_and_eval():
    p = X * X + Y * F(1, 2)
    q = X - Y
    assert poly_arith(p, q, "*") == X * X * X - X * X * Y + X * Y * F(1, 2) - Y * Y * F(1, 2)
    assert poly_eval(p, F(2), F(3)) == F(11, 2)
    assert (p - p).is_zero()
    assert (p - p).degree == -1
    assert (X * Y * Y).degree == 3
    assert (X * Y * Y).swap() == X * X * Y


@settings(max_examples=40)
@given(rationals, rationals, st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), rationals), max_size=5))
def test_bipoly_eval_is_ring_hom(x, y, mons):
    p = BiPoly({(i, j): c for i, j, c in mons})
    q = X * 2 + Y * Y - BiPoly.const(1)
    assert poly_eval(p * q, x, y) == poly_eval(p, x, y) * poly_eval(q, x, y)
    assert poly_eval(p + q, x, y) == poly_eval(p, x, y) + poly_eval(q, x, y)


def test_surd_simplify_examples():
    s = surd_simplify(Surd(1, 8))
    assert (s.coeff, s.radicand) == (2, 2)
    s = surd_simplify(Surd(3, F(1, 2)))
    assert (s.coeff, s.radicand) == (F(3, 2), 2)
    s = surd_simplify(Surd(5, F(9, 4)))
    assert s.is_rational and s.coeff == F(15, 2)
    with pytest.raises(InvalidRadicand):
        Surd(1, -2)


@given(st.fractions(min_value=0, max_value=1000, max_denominator=60), rationals)
def test_surd_simplify_idempotent_and_value(r, c):
    s = surd_simplify(Surd(c, r))
    assert surd_simplify(s) == s
    assert s.radicand.denominator == 1
    if s.coeff:
        assert squarefree_split(int(s.radicand))[0] == 1
    assert abs(float(s) - float(c) * float(r) ** 0.5) <= 1e-12 * (1 + abs(float(c)) * float(r) ** 0.5)


def test_factorization():
    assert factor_integer(360) == {2: 3, 3: 2, 5: 1}
    assert squarefree_split(72) == (6, 2)
    assert sqrt_exact(F(8, 9)) == (F(2, 3), 2)


def test_quad_arith_and_sign():
    a = Quad(1, 1, 2)
    assert (a * a.conj()).norm() == 1
    assert a * a == Quad(3, 2, 2)
    assert Quad(1, -1, 2).sign() == -1
    assert Quad(-1, 1, 2).sign() == 1
    assert (a / a) == Quad(1, 0, 2)


@pytest.mark.parametrize("s,unit", [(2, (1, 1)), (3, (2, 1)), (5, (F(1, 2), F(1, 2))), (6, (5, 2)), (13, (F(3, 2), F(1, 2)))])
def test_fundamental_unit(s, unit):
    u = fundamental_unit(s)
    assert (u.x, u.y) == tuple(map(F, unit))


@pytest.mark.parametrize("alpha", [Quad(1, 1, 3), Quad(1, 1, 2), Quad(4, 1, 6), Quad(2, 1, 5), Quad(7, 3, 5), Quad(F(3, 2), 2, 7)])
def test_quad_log_basis_value(alpha):
    basis = quad_log_basis(alpha)
    with mpmath.workdps(40):
        total = mpmath.mpf(0)
        for key, c in basis.items():
            if key[0] == "prime":
                v = mpmath.log(key[1])
            elif key[0] == "unit":
                v = mpmath.log(fundamental_unit(key[1]).mp())
            else:
                v = mpmath.log(Quad(key[2], key[3], key[1]).mp())
            total += mpmath.mpf(c.numerator) / c.denominator * v
        assert abs(total - mpmath.log(alpha.mp())) < mpmath.mpf(10) ** -30


def test_quad_log_basis_ramified_collapse():
    # (1 + sqrt3)^2 = 2 (2 + sqrt3)
    assert quad_log_basis(Quad(1, 1, 3)) == {("prime", 2): F(1, 2), ("unit", 3): F(1, 2)}
