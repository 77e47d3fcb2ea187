"""Exact scalars: rationals, sparse bivariate polynomials, surds and real
quadratic numbers.

Rationals are plain :class:`fractions.Fraction` objects; everything else in the
package is built on them.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

import mpmath

from .errors import DivisionByZero, InvalidRadicand

Rational = Fraction
RationalLike = Union[Fraction, int, str]

TRIAL_DIVISION_BOUND = 10**6


def rat(value: RationalLike) -> Fraction:
    """Parse ``value`` as an exact rational.

    Accepts ints, Fractions and strings such as ``"3/4"``, ``"-2"`` or
    ``"0.25"``; decimal strings are read exactly, never through a float.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        if b == 0:
            raise DivisionByZero(f"{a} / 0")
        return a / b
    raise ValueError(f"unknown operator {op!r}")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# -- integer helpers -----------------------------------------------------


def factor_integer(n: int, bound: int = TRIAL_DIVISION_BOUND) -> Dict[int, int]:
    """Trial-division factorization of ``n > 0``.

    A cofactor left after dividing out every prime below ``bound`` is recorded
    as if it were prime.
    """
    if n <= 0:
        raise ValueError("factor_integer needs a positive integer")
    out: Dict[int, int] = {}
    p = 2
    while n > 1 and p * p <= n and p <= bound:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_split(n: int, bound: int = TRIAL_DIVISION_BOUND) -> Tuple[int, int]:
    """Return ``(k, s)`` with ``n = k**2 * s`` and ``s`` free of prime squares
    below ``bound``."""
    if n < 0:
        raise InvalidRadicand(f"negative radicand {n}")
    if n == 0:
        return 0, 1
    k, s = 1, 1
    for p, e in factor_integer(n, bound).items():
        k *= p ** (e // 2)
        if e % 2:
            s *= p
    return k, s


def factor_rational(q: Fraction) -> Dict[int, int]:
    """Prime exponents of a positive rational (negative for the denominator)."""
    if q <= 0:
        raise ValueError("factor_rational needs a positive rational")
    out = dict(factor_integer(q.numerator)) if q.numerator > 1 else {}
    if q.denominator > 1:
        for p, e in factor_integer(q.denominator).items():
            out[p] = out.get(p, 0) - e
    return out


# -- bivariate polynomials ----------------------------------------------------


class BiPoly:
    """Sparse polynomial in ``x`` and ``y`` with rational coefficients.

    Instances are immutable; the term map never stores zero coefficients, so
    equal polynomials compare and hash equal.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Tuple[int, int], RationalLike] | None = None):
        clean: Dict[Tuple[int, int], Fraction] = {}
        if terms:
            for (i, j), c in terms.items():
                c = rat(c)
                if c:
                    clean[(i, j)] = clean.get((i, j), Fraction(0)) + c
                    if not clean[(i, j)]:
                        del clean[(i, j)]
        self._terms = clean
        self._hash = None

    @classmethod
    def const(cls, c: RationalLike) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c: RationalLike = 1) -> "BiPoly":
        return cls({(i, j): c})

    @property
    def terms(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Tuple[int, int], Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(i + j for i, j in self._terms)

    def __add__(self, other: "BiPoly") -> "BiPoly":
        if not isinstance(other, BiPoly):
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return BiPoly(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        if isinstance(other, (int, Fraction)):
            return BiPoly({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, BiPoly):
            return NotImplemented
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "BiPoly":
        scalar = rat(scalar)
        if scalar == 0:
            raise DivisionByZero("polynomial divided by zero")
        return BiPoly({k: c / scalar for k, c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def swap(self) -> "BiPoly":
        """Exchange the roles of ``x`` and ``y``."""
        return BiPoly({(j, i): c for (i, j), c in self._terms.items()})

    def by_y_power(self) -> Dict[int, "BiPoly"]:
        """Split into ``sum_k c_k(x) * y**k``; returns ``{k: c_k}``."""
        out: Dict[int, Dict[Tuple[int, int], Fraction]] = {}
        for (i, j), c in self._terms.items():
            out.setdefault(j, {})[(i, 0)] = c
        return {k: BiPoly(v) for k, v in sorted(out.items())}

    def evaluate(self, x, y):
        """Evaluate at ``(x, y)``; exact for rational input."""
        total = 0
        for (i, j), c in self._terms.items():
            total += c * x**i * y**j
        return total if self._terms else Fraction(0)

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def __repr__(self) -> str:
        if not self._terms:
            return "BiPoly(0)"
        parts = []
        for (i, j), c in sorted(self._terms.items(), key=lambda kv: (-sum(kv[0]), kv[0])):
            mono = "*".join(
                s for s in (
                    "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                    "" if j == 0 else ("y" if j == 1 else f"y^{j}"),
                ) if s
            )
            parts.append(format_rational(c) + ("*" + mono if mono else ""))
        return "BiPoly(" + " + ".join(parts) + ")"


X = BiPoly.monomial(1, 0)
Y = BiPoly.monomial(0, 1)
ONE = BiPoly.const(1)
ZERO = BiPoly()


def poly_arith(p: BiPoly, q: BiPoly, op: str) -> BiPoly:
    if op == "+":
        return p + q
    if op == "-":
        return p - q
    if op in ("*", "×"):
        return p * q
    raise ValueError(f"unknown operator {op!r}")


def poly_eval(p: BiPoly, x: Fraction, y: Fraction) -> Fraction:
    return Fraction(p.evaluate(rat(x), rat(y)))


# -- surds ---------------------------------------------------------------


class Surd:
    """The real number ``coeff * sqrt(radicand)``."""

    __slots__ = ("coeff", "radicand")

    def __init__(self, coeff: RationalLike, radicand: RationalLike = 1):
        coeff, radicand = rat(coeff), rat(radicand)
        if radicand < 0:
            raise InvalidRadicand(f"negative radicand {radicand}")
        self.coeff = coeff
        self.radicand = radicand

    def simplify(self) -> "Surd":
        if self.coeff == 0 or self.radicand == 0:
            return Surd(0, 1)
        # sqrt(p/q) = sqrt(p*q)/q
        p, q = self.radicand.numerator, self.radicand.denominator
        k, s = squarefree_split(p * q)
        return Surd(self.coeff * Fraction(k, q), s)

    @property
    def is_rational(self) -> bool:
        return self.simplify().radicand == 1

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)

    def mp(self):
        return mpmath.mpf(self.coeff.numerator) / self.coeff.denominator * mpmath.sqrt(
            mpmath.mpf(self.radicand.numerator) / self.radicand.denominator
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Surd):
            return NotImplemented
        a, b = self.simplify(), other.simplify()
        return a.coeff == b.coeff and a.radicand == b.radicand

    def __hash__(self) -> int:
        s = self.simplify()
        return hash((s.coeff, s.radicand))

    def __repr__(self) -> str:
        return f"Surd({format_rational(self.coeff)}, {format_rational(self.radicand)})"


def surd_simplify(s: Surd) -> Surd:
    return s.simplify()


def sqrt_exact(q: Fraction) -> Tuple[Fraction, int]:
    """``sqrt(q) = a * sqrt(s)`` with rational ``a`` and squarefree integer ``s``."""
    out = Surd(1, q).simplify()
    return out.coeff, int(out.radicand)


# -- real quadratic numbers ------------------------------------------------


class Quad:
    """``x + y*sqrt(s)`` with rational ``x, y`` and squarefree ``s > 1``."""

    __slots__ = ("x", "y", "s")

    def __init__(self, x: RationalLike, y: RationalLike, s: int):
        self.x, self.y, self.s = rat(x), rat(y), int(s)

    def _same(self, other: "Quad") -> None:
        if other.s != self.s:
            raise ValueError("quadratic numbers from different fields")

    def __add__(self, other: "Quad") -> "Quad":
        self._same(other)
        return Quad(self.x + other.x, self.y + other.y, self.s)

    def __sub__(self, other: "Quad") -> "Quad":
        self._same(other)
        return Quad(self.x - other.x, self.y - other.y, self.s)

    def __mul__(self, other) -> "Quad":
        if isinstance(other, (int, Fraction)):
            return Quad(self.x * other, self.y * other, self.s)
        self._same(other)
        return Quad(
            self.x * other.x + self.s * self.y * other.y,
            self.x * other.y + self.y * other.x,
            self.s,
        )

    def conj(self) -> "Quad":
        return Quad(self.x, -self.y, self.s)

    def norm(self) -> Fraction:
        return self.x * self.x - self.s * self.y * self.y

    def inverse(self) -> "Quad":
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero")
        return self.conj() * (1 / n)

    def __truediv__(self, other: "Quad") -> "Quad":
        return self * other.inverse()

    def __pow__(self, k: int) -> "Quad":
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Quad(1, 0, self.s), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def sign(self) -> int:
        x, y = self.x, self.y
        sx = (x > 0) - (x < 0)
        sy = (y > 0) - (y < 0)
        if sx == sy or sy == 0:
            return sx
        if sx == 0:
            return sy
        # opposite signs: compare magnitudes via squares
        d = x * x - self.s * y * y
        return sx if d > 0 else (sy if d < 0 else 0)

    def __lt__(self, other: "Quad") -> bool:
        return (self - other).sign() < 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Quad):
            return NotImplemented
        return (self.x, self.y, self.s) == (other.x, other.y, other.s)

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.s))

    def mp(self):
        return (mpmath.mpf(self.x.numerator) / self.x.denominator
                + mpmath.mpf(self.y.numerator) / self.y.denominator * mpmath.sqrt(self.s))

    def __repr__(self) -> str:
        return f"Quad({format_rational(self.x)}, {format_rational(self.y)}, {self.s})"


def _pell_unit(s: int) -> Quad:
    """Smallest unit ``> 1`` of ``Z[sqrt(s)]`` (norm +-1), by continued fractions."""
    a0 = math.isqrt(s)
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while True:
        if p * p - s * q * q in (1, -1):
            return Quad(p, q, s)
        m = d * a - m
        d = (s - m * m) // d
        a = (a0 + m) // d
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev


@lru_cache(maxsize=None)
def fundamental_unit(s: int) -> Quad:
    """Fundamental unit ``> 1`` of the ring of integers of ``Q(sqrt(s))``."""
    if s < 2 or squarefree_split(s)[0] != 1:
        raise ValueError(f"{s} is not a squarefree integer > 1")
    eps = _pell_unit(s)
    if s % 4 != 1:
        return eps
    # In Z[(1+sqrt s)/2] the fundamental unit is eps or a cube root of it.
    with mpmath.workdps(max(50, 3 * len(str(eps.x.numerator)))):
        eta = mpmath.cbrt(eps.mp())
        trace = eta + int(eps.norm()) / eta
        a = int(mpmath.nint(trace))
        b = int(mpmath.nint((2 * eta - a) / mpmath.sqrt(s)))
    cand = Quad(Fraction(a, 2), Fraction(b, 2), s)
    if cand.sign() > 0 and cand**3 == eps:
        return cand
    return eps


def quad_log_basis(alpha: Quad) -> Dict[tuple, Fraction]:
    """Decompose ``log(alpha)`` for positive irrational ``alpha`` into
    ``('prime', p)``, ``('unit', s)`` and ``('kappa', s, x, y)`` basis logs.

    Uses ``log alpha = log|N alpha|/2 + log(alpha/|conj alpha|)/2`` and reduces
    the norm-one part modulo the fundamental unit.  Elements whose ideal is
    stable under conjugation (e.g. ``1+sqrt(3)``) collapse completely onto
    rational logs and the unit.
    """
    if alpha.sign() <= 0:
        raise ValueError("log of a non-positive number")
    s = alpha.s
    out: Dict[tuple, Fraction] = {}

    def add(key, c):
        out[key] = out.get(key, Fraction(0)) + c
        if not out[key]:
            del out[key]

    n = alpha.norm()
    for p, e in factor_rational(abs(n)).items():
        add(("prime", p), Fraction(e, 2))
    conj = alpha.conj()
    gamma = alpha / (conj if conj.sign() > 0 else conj * -1)
    eps = fundamental_unit(s)
    with mpmath.workdps(60):
        j = int(mpmath.floor(mpmath.log(gamma.mp()) / mpmath.log(eps.mp())))
    g0 = gamma * eps**(-j)
    one = Quad(1, 0, s)
    while g0 < one:
        g0, j = g0 * eps, j - 1
    while not g0 < eps:
        g0, j = g0 / eps, j + 1
    if g0 == one:
        add(("unit", s), Fraction(j, 2))
        return out
    alt = eps / g0
    if g0 < alt or g0 == alt:
        add(("unit", s), Fraction(j, 2))
        add(("kappa", s, g0.x, g0.y), Fraction(1, 2))
    else:
        add(("unit", s), Fraction(j + 1, 2))
        add(("kappa", s, alt.x, alt.y), Fraction(-1, 2))
    return out


def rational_log_basis(q: Fraction) -> Dict[tuple, Fraction]:
    """``log(q)`` for positive rational ``q`` as a sum of prime logs."""
    return {("prime", p): Fraction(e) for p, e in factor_rational(q).items() if e}


def linear_sum(parts: Iterable[Tuple[Mapping[tuple, Fraction], Fraction]]) -> Dict[tuple, Fraction]:
    out: Dict[tuple, Fraction] = {}
    for basis, c in parts:
        for k, v in basis.items():
            out[k] = out.get(k, Fraction(0)) + c * v
            if not out[k]:
                del out[k]
    return out
