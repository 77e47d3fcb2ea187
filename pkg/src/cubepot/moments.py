"""Exact primitives of Gaussian moments.

``A_n = u_n(x,y) e^{-(x-y)^2} + v_n(y) Erf(x-y)`` is a primitive of
``x^n e^{-(x-y)^2}`` in ``x``.  Iterating once more in ``y`` gives the double
primitives ``(p_nm, q_nm)`` of ``x^n y^m e^{-(x-y)^2}`` and, for the force
kernel, ``(p*_nm, q*_nm)`` of ``x^n y^m (x-y) e^{-(x-y)^2}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactnum import ONE, ZERO, BiPoly, Y


@dataclass(frozen=True)
class PrimitivePair:
    """``gauss_coeff * e^{-(x-y)^2} + erf_coeff * Erf(x-y)``."""

    gauss_coeff: BiPoly
    erf_coeff: BiPoly

    @property
    def degrees(self) -> tuple[int, int]:
        return self.gauss_coeff.degree, self.erf_coeff.degree

    def __add__(self, other: "PrimitivePair") -> "PrimitivePair":
        return PrimitivePair(self.gauss_coeff + other.gauss_coeff,
                             self.erf_coeff + other.erf_coeff)

    def scale(self, c) -> "PrimitivePair":
        return PrimitivePair(self.gauss_coeff * c, self.erf_coeff * c)


def _xpow(n: int) -> BiPoly:
    return BiPoly.monomial(n, 0)


def _ypow(n: int) -> BiPoly:
    return BiPoly.monomial(0, n)


@lru_cache(maxsize=None)
def u_poly(n: int) -> BiPoly:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return ZERO
    k = n - 1  # u_{k+1} = y u_k + (k/2) u_{k-1} - x^k/2
    prev = u_poly(k - 1) if k >= 1 else ZERO
    return Y * u_poly(k) + prev * Fraction(k, 2) - _xpow(k) * Fraction(1, 2)


@lru_cache(maxsize=None)
def v_poly(n: int) -> BiPoly:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return ONE
    k = n - 1
    prev = v_poly(k - 1) if k >= 1 else ZERO
    return Y * v_poly(k) + prev * Fraction(k, 2)


@lru_cache(maxsize=None)
def primitive_A(n: int) -> PrimitivePair:
    """Primitive of ``x^n e^{-(x-y)^2}`` with respect to ``x``."""
    return PrimitivePair(u_poly(n), v_poly(n))


@lru_cache(maxsize=None)
def primitive_B(n: int) -> PrimitivePair:
    """Primitive of ``x^n Erf(x-y)`` with respect to ``x``."""
    return PrimitivePair(
        u_poly(n + 1) * Fraction(-1, n + 1),
        (_xpow(n + 1) - v_poly(n + 1)) * Fraction(1, n + 1),
    )


def _u_branch(poly: BiPoly) -> PrimitivePair:
    # int c(x) y^k e^{-(x-y)^2} dy = c(x) (u_k(y,x) e^{..} - v_k(x) Erf(x-y))
    p, q = ZERO, ZERO
    for k, cx in poly.by_y_power().items():
        p = p + cx * u_poly(k).swap()
        q = q - cx * v_poly(k).swap()
    return PrimitivePair(p, q)


def _v_branch(poly: BiPoly) -> PrimitivePair:
    # -int c(x) y^k Erf(y-x) dy, i.e. -B_k(y,x)
    p, q = ZERO, ZERO
    for k, cx in poly.by_y_power().items():
        w = Fraction(1, k + 1)
        p = p + cx * u_poly(k + 1).swap() * w
        q = q + cx * (_ypow(k + 1) - v_poly(k + 1).swap()) * w
    return PrimitivePair(p, q)


@lru_cache(maxsize=None)
def double_primitive(n: int, m: int) -> PrimitivePair:
    """``(p_nm, q_nm)`` with ``d^2/dxdy [p e^{-(x-y)^2} + q Erf(x-y)] = x^n y^m e^{-(x-y)^2}``."""
    ym = _ypow(m)
    return _u_branch(u_poly(n) * ym) + _v_branch(v_poly(n) * ym)


@lru_cache(maxsize=None)
def force_double_primitive(n: int, m: int) -> PrimitivePair:
    """``(p*_nm, q*_nm)`` for the integrand ``x^n y^m (x-y) e^{-(x-y)^2}``.

    The x-integral is ``(n/2) A_{n-1} - (x^n/2) e^{-(x-y)^2}``; integrating its
    three pieces in ``y`` never forms the top-degree terms, so the degrees are
    ``n+m-1`` and ``n+m`` by construction.
    """
    ym = _ypow(m)
    half = Fraction(1, 2)
    out = PrimitivePair(ZERO, ZERO)
    if n > 0:
        out = out + _u_branch(u_poly(n - 1) * ym).scale(Fraction(n, 2))
        out = out + _v_branch(v_poly(n - 1) * ym).scale(Fraction(n, 2))
    xn = _xpow(n)
    # -(x^n/2) * int y^m e^{-(x-y)^2} dy = -(x^n/2) (u_m(y,x) e - v_m(x) Erf)
    out = out + PrimitivePair(xn * u_poly(m).swap() * -half, xn * v_poly(m).swap() * half)
    return out


@lru_cache(maxsize=None)
def point_force_primitive(n: int) -> PrimitivePair:
    """Primitive in ``x`` of ``x^n (x-y) e^{-(x-y)^2}``."""
    half = Fraction(1, 2)
    gauss = _xpow(n) * -half
    erf = ZERO
    if n > 0:
        gauss = gauss + u_poly(n - 1) * Fraction(n, 2)
        erf = v_poly(n - 1) * Fraction(n, 2)
    return PrimitivePair(gauss, erf)
