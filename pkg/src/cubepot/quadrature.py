"""Numerical integration over the half line and the normalized Erf."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate, special

from .errors import QuadratureFailure
from .sigma import SQRT_PI_2, SigmaExpr

TWO_OVER_SQRT_PI = 2 / math.sqrt(math.pi)
DEFAULT_TOL = 1e-10
MAX_EVALUATIONS = 10**6


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


def erf_value(xi):
    """``Erf(xi) = sqrt(pi)/2 * erf(xi)``."""
    return SQRT_PI_2 * special.erf(xi)


Integrand = Union[SigmaExpr, Callable[[float], float]]


def _as_callable(f: Integrand) -> Callable[[float], float]:
    if isinstance(f, SigmaExpr):
        # pointwise escalation only sharpens exponentially small values
        return lambda s: float(f.evaluate(s, escalate=False))
    return f


def integrate_halfline(f: Integrand, tol: float = DEFAULT_TOL, normalized: bool = True) -> QuadratureResult:
    """``(2/sqrt pi) int_0^inf f`` (or the plain integral when ``normalized`` is off).

    The range is split at 1; the tail is mapped onto a finite interval by
    QUADPACK's infinite-range transform.
    """
    g = _as_callable(f)
    budget = MAX_EVALUATIONS // 2
    limit = max(50, budget // 21)
    total, err, neval = 0.0, 0.0, 0
    for lo, hi in ((0.0, 1.0), (1.0, np.inf)):
        v, e, info = integrate.quad(g, lo, hi, epsabs=tol * 1e-3, epsrel=tol * 1e-3,
                                    limit=limit, full_output=1)[:3]
        total += v
        err += e
        neval += info["neval"]
    w = TWO_OVER_SQRT_PI if normalized else 1.0
    total, err = w * total, w * err
    if not math.isfinite(total) or err > max(tol, tol * abs(total)):
        raise QuadratureFailure(f"no convergence: value {total}, error estimate {err}")
    return QuadratureResult(total, err, neval)


def _table_lhs_log(a: float, b: float) -> float:
    return integrate_halfline(lambda x: math.exp(-x * x * a * a) * erf_value(b * x) / x,
                              tol=1e-12).value


def _table_lhs_atan(a: float, b: float, c: float) -> float:
    return integrate_halfline(lambda x: math.exp(-x * x * a * a) * erf_value(b * x) * erf_value(c * x),
                              tol=1e-12).value


def table_identity_values(a, b, c):
    """Left and right sides of the two integral table identities."""
    a, b, c = float(a), float(b), float(c)
    rhs_log = math.log(b + math.sqrt(a * a + b * b)) - math.log(abs(a)) if b else 0.0
    if b and c:
        rhs_atan = math.atan(b * c / (abs(a) * math.sqrt(a * a + b * b + c * c))) / (2 * abs(a))
    else:
        rhs_atan = 0.0
    return (_table_lhs_log(a, b), rhs_log), (_table_lhs_atan(a, b, c), rhs_atan)


def verify_table_identities(a, b, c, tol: float = 1e-10):
    if not a:
        raise ValueError("a must be non-zero")
    (l1, r1), (l2, r2) = table_identity_values(a, b, c)
    return abs(l1 - r1) <= tol * max(1.0, abs(r1)), abs(l2 - r2) <= tol * max(1.0, abs(r2))


def factor_power_integrand(factors, sigma: float) -> float:
    """Product of factors, each distinct factor evaluated once and powered.

    Works in the log domain so that high powers underflow gracefully.
    """
    counts = {}
    for f in factors:
        counts[f] = counts.get(f, 0) + 1
    log_abs, sign = 0.0, 1
    for f, k in counts.items():
        v = float(f.evaluate(sigma))
        if v == 0.0:
            return 0.0
        if v < 0 and k % 2:
            sign = -sign
        log_abs += k * math.log(abs(v))
    if log_abs < -745.0:
        return 0.0
    return sign * math.exp(log_abs)


def numeric_fallback(problem, tol: float = DEFAULT_TOL) -> QuadratureResult:
    """Integrate the raw product of factors, without renormalization."""
    from .problem import build_factors

    factors, extra = build_factors(problem)
    shift = extra  # the integrand is sigma**shift * prod(factors)

    def g(s):
        v = factor_power_integrand(factors, s)
        return v * s**shift if shift else v

    return integrate_halfline(g, tol=tol)
