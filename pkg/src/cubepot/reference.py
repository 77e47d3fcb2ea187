"""Classical closed forms used as independent oracles.

Nothing here touches the sigma-integrand machinery.  The corner sums cancel
heavily, so the formulas are evaluated with 40 significant digits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence, Tuple

import mpmath
import numpy as np

from .exactnum import rat

WORKING_DPS = 40


@dataclass(frozen=True)
class CuboidSpec:
    bounds: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        b = tuple((rat(a), rat(c)) for a, c in self.bounds)
        for a, c in b:
            if a > c:
                raise ValueError(f"inverted bounds [{a}, {c}]")
        object.__setattr__(self, "bounds", b)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @classmethod
    def unit(cls, d: int = 3) -> "CuboidSpec":
        return cls(((0, 1),) * d)

    def volume(self) -> Fraction:
        v = Fraction(1)
        for a, b in self.bounds:
            v *= b - a
        return v


def _corner_sum(Q: CuboidSpec, y: Sequence[float], F) -> float:
    """``F |_{a1}^{b1} |_{a2}^{b2} |_{a3}^{b3}`` with the field point moved to 0."""
    with mpmath.workdps(WORKING_DPS):
        total = mpmath.mpf(0)
        for pick in product((0, 1), repeat=3):
            sign = (-1) ** (3 - sum(pick))
            d = [_mp(Q.bounds[j][pick[j]]) - _mp(y[j]) for j in range(3)]
            total += sign * F(*d)
        return float(total)


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _waldvogel_corner(d1, d2, d3):
    rho = mpmath.sqrt(d1 * d1 + d2 * d2 + d3 * d3)
    out = 0.0
    for a, b, c in ((d1, d2, d3), (d2, d3, d1), (d3, d1, d2)):
        if a and b:
            out += a * b * mpmath.atanh(c / rho)
        if a:
            out -= a * a / 2 * mpmath.atan(b * c / (a * rho))
    return out


def _waldvogel_corner_np(d1, d2, d3):
    rho = np.sqrt(d1 * d1 + d2 * d2 + d3 * d3)
    safe = np.where(rho > 0, rho, 1.0)
    out = np.zeros_like(rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        for a, b, c in ((d1, d2, d3), (d2, d3, d1), (d3, d1, d2)):
            ab = a * b
            # arctanh(c/rho) = sign(c) log((rho + |c|) / sqrt(a^2 + b^2)), free of cancellation
            h = np.sqrt(a * a + b * b)
            ath = np.sign(c) * np.log((safe + np.abs(c)) / np.where(h > 0, h, 1.0))
            out += np.where(ab != 0, ab * ath, 0.0)
            qa = np.where(a != 0, a, 1.0)
            out -= np.where(a != 0, a * a / 2 * np.arctan(b * c / (qa * safe)), 0.0)
    return out


def waldvogel_potential(Q: CuboidSpec, y: Sequence[float]) -> float:
    """Potential ``int_Q dx / |x - y|`` of a homogeneous cuboid."""
    if Q.dim != 3:
        raise ValueError("Waldvogel's formula is three-dimensional")
    return _corner_sum(Q, y, _waldvogel_corner)


def waldvogel_potential_grid(Q: CuboidSpec, y1, y2, y3):
    """Vectorized double-precision evaluation at arrays of field points."""
    y = [np.asarray(v, dtype=float) for v in (y1, y2, y3)]
    total = np.zeros(np.broadcast(*y).shape)
    for pick in product((0, 1), repeat=3):
        sign = (-1) ** (3 - sum(pick))
        d = [float(Q.bounds[j][pick[j]]) - y[j] for j in range(3)]
        total = total + sign * _waldvogel_corner_np(*d)
    return total


def _garcia_corner(d1, d2, d3):
    rho = mpmath.sqrt(d1 * d1 + d2 * d2 + d3 * d3)
    out = d1 * d2 * d3 * rho
    if d1 and d2:
        out -= 2 * d1 * d2 * (d1 * d1 + d2 * d2) * mpmath.log(d3 + rho)
    for a, b, c in ((d1, d2, d3), (d2, d3, d1), (d3, d1, d2)):
        if a:
            out += a**4 * mpmath.atan(b * c / (a * rho))
    return out / 4


def garcia_h3(Q: CuboidSpec, y: Sequence[float] = (0.0, 0.0, 0.0)) -> float:
    """``int_Q x3^4 / |x|^3 dx`` (the field point ``y`` is moved to the origin)."""
    if Q.dim != 3:
        raise ValueError("the H3 formula is three-dimensional")
    return _corner_sum(Q, y, _garcia_corner)


def fornberg_constant():
    """The classical 14-term closed form of the two-cubes force."""
    from .closedform import atan_term, const, log_quad_term, log_term, pi_term, sqrt_term

    third = Fraction(1, 3)
    e = (const(-14) + sqrt_term(2, 2) + sqrt_term(-4, 3) + sqrt_term(10, 5) + sqrt_term(-2, 6)
         + log_term(26, 2) + log_term(-2, 5)
         + log_quad_term(10, 1, 1, 2) + log_quad_term(20, 1, 1, 3) + log_quad_term(-35, 1, 1, 5)
         + log_quad_term(6, 1, 1, 6) + log_quad_term(-2, 4, 1, 6)
         + pi_term(Fraction(26, 3)) + atan_term(-22, 2, 6))
    return e.scale(third)


def self_energy_constant():
    """``(1 + sqrt2 - 2 sqrt3)/5 + log((1+sqrt2)(2+sqrt3)) - pi/3``."""
    from .closedform import const, log_quad_term, pi_term, sqrt_term

    fifth = Fraction(1, 5)
    return (const(fifth) + sqrt_term(fifth, 2) + sqrt_term(-2 * fifth, 3)
            + log_quad_term(1, 1, 1, 2) + log_quad_term(1, 2, 1, 3) + pi_term(Fraction(-1, 3)))
