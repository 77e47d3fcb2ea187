"""Integrands in the Laplace variable sigma.

A :class:`SigmaExpr` is an exact linear combination of terms

    c * sigma**(-mu) * exp(-G sigma**2) * Erf(d_1 sigma) * ... * Erf(d_r sigma)

with rational ``c``, ``G`` and ``d_j``.  Erf is the odd primitive of the
Gaussian, ``Erf(t) = sqrt(pi)/2 * erf(t)``.  The per-axis factors of the
potential and force integrals are built here from the exact moment primitives.
"""
from __future__ import annotations

import math
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple

import mpmath
import numpy as np
from scipy.special import erf as _erf
from scipy.special import erfc as _erfc

from .errors import InvalidInterval
from .exactnum import format_rational, rat
from .moments import (
    PrimitivePair,
    double_primitive,
    force_double_primitive,
    point_force_primitive,
    primitive_A,
)

SQRT_PI_2 = math.sqrt(math.pi) / 2

#: Number of exact Taylor coefficients (in sigma**2) kept for small-sigma evaluation.
SERIES_ORDER = 24
#: Small-sigma switchover, measured in units of the expression's length scale.
SERIES_SCALE = Fraction(6, 5)
#: Direct sums smaller than their pieces by this factor are redone in mpmath.
CANCELLATION_LIMIT = 1e3


class SigmaTerm(NamedTuple):
    mu: int
    G: Fraction
    erf_args: Tuple[Fraction, ...]

    @property
    def r(self) -> int:
        return len(self.erf_args)


def normalize_term(mu: int, G, erf_args: Iterable) -> Tuple[int, Optional[SigmaTerm]]:
    """Return ``(sign, term)``; ``term`` is None when an Erf(0) factor kills it."""
    sign = 1
    args = []
    for d in erf_args:
        d = rat(d)
        if d == 0:
            return 0, None
        if d < 0:
            sign, d = -sign, -d
        args.append(d)
    G = rat(G)
    if G < 0:
        raise ValueError("Gaussian rate must be non-negative")
    return sign, SigmaTerm(int(mu), G, tuple(sorted(args)))


def _term_sort_key(item):
    t, _ = item
    return (t.r, -t.mu, t.G, t.erf_args)


class SigmaExpr:
    """Canonical, fully collected linear combination of sigma-terms."""

    __slots__ = ("_terms", "_hash", "_cache")

    def __init__(self, terms: Optional[Mapping[SigmaTerm, Fraction]] = None):
        self._terms: Dict[SigmaTerm, Fraction] = {}
        self._hash = None
        self._cache: dict = {}
        if terms:
            for t, c in terms.items():
                self._add(rat(c), t.mu, t.G, t.erf_args)

    # construction helpers; only used before the instance is shared
    def _add(self, c: Fraction, mu, G, erf_args) -> None:
        if not c:
            return
        sign, term = normalize_term(mu, G, erf_args)
        if term is None:
            return
        v = self._terms.get(term, Fraction(0)) + sign * c
        if v:
            self._terms[term] = v
        else:
            self._terms.pop(term, None)

    @classmethod
    def from_items(cls, items: Iterable[Tuple[Fraction, int, Fraction, Iterable]]) -> "SigmaExpr":
        e = cls()
        for c, mu, G, args in items:
            e._add(rat(c), mu, G, args)
        return e

    @classmethod
    def single(cls, c, mu: int = 0, G=0, erf_args: Iterable = ()) -> "SigmaExpr":
        return cls.from_items([(c, mu, G, erf_args)])

    # -- container protocol
    def items(self) -> List[Tuple[SigmaTerm, Fraction]]:
        return sorted(self._terms.items(), key=_term_sort_key)

    def terms(self) -> Dict[SigmaTerm, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[SigmaTerm]:
        return iter(t for t, _ in self.items())

    def coeff(self, term: SigmaTerm) -> Fraction:
        return self._terms.get(term, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SigmaExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic
    def __add__(self, other: "SigmaExpr") -> "SigmaExpr":
        out = SigmaExpr(self._terms)
        for t, c in other._terms.items():
            out._add(c, *t)
        return out

    def __neg__(self) -> "SigmaExpr":
        return self.scale(-1)

    def __sub__(self, other: "SigmaExpr") -> "SigmaExpr":
        return self + (-other)

    def scale(self, c) -> "SigmaExpr":
        c = rat(c)
        return SigmaExpr({t: v * c for t, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, SigmaExpr):
            return NotImplemented
        out = SigmaExpr()
        for t1, c1 in self._terms.items():
            for t2, c2 in other._terms.items():
                out._add(c1 * c2, t1.mu + t2.mu, t1.G + t2.G, t1.erf_args + t2.erf_args)
        return out

    __rmul__ = __mul__

    def shift_power(self, k: int) -> "SigmaExpr":
        """Multiply by ``sigma**k``."""
        return SigmaExpr.from_items((c, t.mu - k, t.G, t.erf_args) for t, c in self._terms.items())

    @property
    def scale_length(self) -> float:
        """Largest ``sqrt(G + sum d_j^2)`` over the terms (0 for an empty expression)."""
        if "L" not in self._cache:
            best = 0.0
            for t in self._terms:
                best = max(best, math.sqrt(float(t.G + sum(d * d for d in t.erf_args))))
            self._cache["L"] = best
        return self._cache["L"]

    def parity_ok(self) -> bool:
        return all((t.mu - t.r) % 2 == 0 for t in self._terms)

    # -- numerics
    def _asymptotic_parts(self):
        """Exact sums of the ``G = 0`` coefficients grouped by ``(mu, r)``.

        With ``Erf = sqrt(pi)/2 - E`` these are the pieces that survive as
        sigma grows; collecting them exactly removes the O(1) cancellation.
        """
        if "asym" not in self._cache:
            out: Dict[Tuple[int, int], Fraction] = {}
            for t, c in self._terms.items():
                if t.G == 0:
                    k = (t.mu, t.r)
                    out[k] = out.get(k, Fraction(0)) + c
            self._cache["asym"] = {k: v for k, v in out.items() if v}
        return self._cache["asym"]

    def _compiled(self):
        """Flatten the expression into numeric pieces ``c s^-mu e^{-G s^2} prod F_k``.

        ``F`` ranges over ``Erf(d s)``, ``E(d s)`` (the erfc tail) and 1.  For
        ``G = 0`` terms the product of Erfs is expanded over subsets of tails,
        the pure ``A^r`` part being collected exactly in the asymptotic sums.
        """
        if "compiled" in self._cache:
            return self._cache["compiled"]
        funcs = {("one", None): 0}
        gauss = {Fraction(0): 0}
        coef, mus, gidx, fidx = [], [], [], []

        def fn(kind, d):
            return funcs.setdefault((kind, d), len(funcs))

        for t, c in self._terms.items():
            if t.G or not t.erf_args:
                if not t.G and not t.erf_args:
                    continue  # pure powers live in the asymptotic sums
                coef.append(float(c))
                mus.append(t.mu)
                gidx.append(gauss.setdefault(t.G, len(gauss)))
                fidx.append([fn("erf", d) for d in t.erf_args])
                continue
            r = t.r
            for mask in range(1, 1 << r):
                k = bin(mask).count("1")
                coef.append(float(c) * (-1) ** k * SQRT_PI_2 ** (r - k))
                mus.append(t.mu)
                gidx.append(0)
                fidx.append([fn("erfc", t.erf_args[j]) for j in range(r) if mask >> j & 1])
        width = max((len(f) for f in fidx), default=0)
        F = np.zeros((len(fidx), width), dtype=np.intp)
        for i, f in enumerate(fidx):
            F[i, :len(f)] = f
        asym = [(float(c) * SQRT_PI_2**r, mu) for (mu, r), c in self._asymptotic_parts().items()]
        out = (np.array(coef), np.array(mus, dtype=float), np.array(gidx, dtype=np.intp), F,
               [float(g) for g in gauss], sorted(funcs.items(), key=lambda kv: kv[1]), asym)
        self._cache["compiled"] = out
        return out

    def _direct(self, s: np.ndarray):
        """Direct sum and the sum of absolute values of its pieces."""
        coef, mus, gidx, F, gs, funcs, asym = self._compiled()
        total = np.zeros_like(s)
        bound = np.zeros_like(s)
        for c, mu in asym:
            v = c * s ** (-mu)
            total, bound = total + v, bound + np.abs(v)
        if not len(coef):
            return total, bound
        chunk = max(1, 2_000_000 // len(coef))
        for lo in range(0, len(s), chunk):
            x = s[lo:lo + chunk]
            table = np.empty((len(funcs), len(x)))
            for (kind, d), i in funcs:
                if kind == "one":
                    table[i] = 1.0
                elif kind == "erf":
                    table[i] = SQRT_PI_2 * _erf(float(d) * x)
                else:
                    table[i] = SQRT_PI_2 * _erfc(float(d) * x)
            with np.errstate(under="ignore"):
                exps = np.exp(-np.outer(gs, x * x))
                logs = np.log(x)
                vals = coef[:, None] * np.exp(-np.outer(mus, logs)) * exps[gidx]
                for k in range(F.shape[1]):
                    vals *= table[F[:, k]]
            total[lo:lo + chunk] += vals.sum(axis=0)
            bound[lo:lo + chunk] += np.abs(vals).sum(axis=0)
        return total, bound

    def evaluate_direct(self, sigma, escalate: bool = True):
        """Term-by-term evaluation; loses accuracy near 0 when poles cancel.

        With ``escalate``, points where the sum is much smaller than its
        pieces are recomputed in extended precision.  The lost digits are
        relative to exponentially small pieces, so integration can skip this.
        """
        s = np.atleast_1d(np.asarray(sigma, dtype=float))
        total, bound = self._direct(s)
        if escalate:
            bad = np.abs(total) * CANCELLATION_LIMIT < bound
            for i in np.flatnonzero(bad):
                loss = math.log10(bound[i] / abs(total[i])) if total[i] else 30.0
                total[i] = float(self.evaluate_mp(s[i], dps=int(25 + min(loss, 60))))
        return total if np.ndim(sigma) else float(total[0])

    def evaluate_mp(self, sigma, dps: int = 40):
        """Extended-precision evaluation using the same Erf/erfc split."""
        with mpmath.workdps(dps):
            x = mpmath.mpf(sigma)
            A = mpmath.sqrt(mpmath.pi) / 2

            def q(v):
                return mpmath.mpf(v.numerator) / v.denominator

            total = mpmath.mpf(0)
            for (mu, r), c in self._asymptotic_parts().items():
                total += q(c) * A**r * x ** (-mu)
            for t, c in self._terms.items():
                v = q(c) * x ** (-t.mu)
                if t.G:
                    v *= mpmath.exp(-q(t.G) * x * x)
                    for d in t.erf_args:
                        v *= A * mpmath.erf(q(d) * x)
                    total += v
                elif t.erf_args:
                    tails = [A * mpmath.erfc(q(d) * x) for d in t.erf_args]
                    r = t.r
                    for mask in range(1, 1 << r):
                        prod = v * (-1) ** bin(mask).count("1")
                        k = 0
                        for j in range(r):
                            if mask >> j & 1:
                                prod *= tails[j]
                                k += 1
                        total += prod * A ** (r - k)
            return +total

    def laurent(self, order: int = SERIES_ORDER) -> Dict[int, Fraction]:
        """Exact expansion in ``t = sigma**2`` up to ``t**order``.

        Returns ``{k: c_k}``; negative ``k`` only survive when the expression
        genuinely has a pole at 0.
        """
        key = ("laurent", order)
        if key in self._cache:
            return self._cache[key]
        exp_cache: Dict[Tuple[Fraction, int], List[Fraction]] = {}
        erf_cache: Dict[Tuple[Fraction, int], List[Fraction]] = {}

        def exp_series(G, n):
            k = (G, n)
            if k not in exp_cache:
                exp_cache[k] = [(-G) ** j / factorial(j) for j in range(n + 1)]
            return exp_cache[k]

        def erf_series(d, n):  # Erf(sigma d) / sigma in powers of t
            k = (d, n)
            if k not in erf_cache:
                d2 = d * d
                erf_cache[k] = [
                    d * (-d2) ** j / (factorial(j) * (2 * j + 1)) for j in range(n + 1)
                ]
            return erf_cache[k]

        out: Dict[int, Fraction] = {}
        for t, c in self._terms.items():
            shift = (t.r - t.mu) // 2
            n = order - shift
            if n < 0:
                continue
            series = [c * v for v in exp_series(t.G, n)]
            for d in t.erf_args:
                e = erf_series(d, n)
                series = [
                    sum(series[i] * e[k - i] for i in range(k + 1)) for k in range(n + 1)
                ]
            for j, v in enumerate(series):
                if v:
                    out[j + shift] = out.get(j + shift, Fraction(0)) + v
        out = {k: v for k, v in sorted(out.items()) if v}
        self._cache[key] = out
        return out

    def has_pole(self) -> bool:
        return any(k < 0 for k in self.laurent(0))

    def default_threshold(self) -> float:
        L = self.scale_length
        return float(SERIES_SCALE) / L if L else math.inf

    def evaluate(self, sigma, series_threshold: Optional[float] = None, escalate: bool = True):
        """Stable evaluation for ``sigma > 0``.

        Below the threshold the exact Taylor expansion is summed instead of
        the (mutually cancelling) singular terms.
        """
        if series_threshold is None:
            series_threshold = self.default_threshold()
        s = np.asarray(sigma, dtype=float)
        if not self._terms:
            return np.zeros_like(s) if s.ndim else 0.0
        use_series = s < series_threshold
        if not np.any(use_series):
            return self.evaluate_direct(s, escalate) if s.ndim else float(self.evaluate_direct(s, escalate))
        coeffs = self._series_floats()
        if coeffs is None:
            return self.evaluate_direct(s, escalate) if s.ndim else float(self.evaluate_direct(s, escalate))
        t = np.where(use_series, s * s, 0.0)
        acc = np.zeros_like(s)
        for c in reversed(coeffs):
            acc = acc * t + c
        out = acc
        if not np.all(use_series):
            out = np.array(acc, copy=True, ndmin=1)
            far = np.atleast_1d(~use_series)
            out[far] = self.evaluate_direct(np.atleast_1d(s)[far], escalate)
            out = out.reshape(s.shape)
        return out if out.ndim else float(out)

    def _series_floats(self):
        key = "series_floats"
        if key not in self._cache:
            lau = self.laurent(SERIES_ORDER)
            if any(k < 0 for k in lau):
                self._cache[key] = None
            else:
                self._cache[key] = [float(lau.get(k, 0)) for k in range(SERIES_ORDER + 1)]
        return self._cache[key]

    def __call__(self, sigma):
        return self.evaluate(sigma)

    # -- rendering
    def to_text(self) -> str:
        return render_text(self)

    def to_latex(self) -> str:
        return render_latex(self)

    def __repr__(self) -> str:
        return f"SigmaExpr({render_text(self)})"


# -- factor construction --------------------------------------------------------


def _check_interval(a, b) -> None:
    if a > b:
        raise InvalidInterval(f"inverted interval [{a}, {b}]")


def _corner_expr(pair: PrimitivePair, N: int, scale: Fraction,
                 corners: Iterable[Tuple[Fraction, Fraction, int]]) -> SigmaExpr:
    """Sum over corners of ``sign * scale * sigma^{-N} (p(sx,sy) e + q(sx,sy) Erf)``."""
    e = SigmaExpr()
    for x, y, sign in corners:
        delta = x - y
        for (i, j), c in pair.gauss_coeff.items():
            e._add(sign * scale * c * x**i * y**j, N - i - j, delta * delta, ())
        for (i, j), c in pair.erf_coeff.items():
            e._add(sign * scale * c * x**i * y**j, N - i - j, 0, (delta,))
    return e


def interval_factor(n: int, m: int, a, b, ap, bp) -> SigmaExpr:
    """``int_a^b int_ap^bp x^n y^m exp(-sigma^2 (x-y)^2) dy dx``."""
    a, b, ap, bp = map(rat, (a, b, ap, bp))
    _check_interval(a, b)
    _check_interval(ap, bp)
    corners = [(b, bp, 1), (a, bp, -1), (b, ap, -1), (a, ap, 1)]
    return _corner_expr(double_primitive(n, m), n + m + 2, Fraction(1), corners)


def force_factor(n: int, m: int, a, b, ap, bp) -> SigmaExpr:
    """``2 sigma^2 int int x^n y^m (x-y) exp(-sigma^2 (x-y)^2) dy dx``."""
    a, b, ap, bp = map(rat, (a, b, ap, bp))
    _check_interval(a, b)
    _check_interval(ap, bp)
    corners = [(b, bp, 1), (a, bp, -1), (b, ap, -1), (a, ap, 1)]
    return _corner_expr(force_double_primitive(n, m), n + m + 1, Fraction(2), corners)


def point_factor(n: int, a, b, y=0) -> SigmaExpr:
    """``int_a^b x^n exp(-sigma^2 (x-y)^2) dx`` for a field coordinate ``y``."""
    a, b, y = rat(a), rat(b), rat(y)
    _check_interval(a, b)
    return _corner_expr(primitive_A(n), n + 1, Fraction(1), [(b, y, 1), (a, y, -1)])


def point_force_factor(n: int, a, b, y=0) -> SigmaExpr:
    """``2 sigma^2 int_a^b x^n (x-y) exp(-sigma^2 (x-y)^2) dx``.

    With ``y = 0`` this is ``2 sigma^2 int x^{n+1} exp(-sigma^2 x^2) dx``.
    """
    a, b, y = rat(a), rat(b), rat(y)
    _check_interval(a, b)
    return _corner_expr(point_force_primitive(n), n, Fraction(2), [(b, y, 1), (a, y, -1)])


def attach_gaussian_prefactor(e: SigmaExpr, rho) -> SigmaExpr:
    """Multiply by ``exp(-sigma^2 rho^2)``."""
    rho = rat(rho)
    if rho < 0:
        raise ValueError("rho must be non-negative")
    if rho == 0:
        return e
    r2 = rho * rho
    return SigmaExpr.from_items((c, t.mu, t.G + r2, t.erf_args) for t, c in e.terms().items())


def product(factors: List[SigmaExpr]) -> SigmaExpr:
    if not factors:
        raise ValueError("product of an empty list")
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def eval_sigma_expr(e: SigmaExpr, sigma, series_threshold: Optional[float] = None):
    return e.evaluate(sigma, series_threshold)


def small_sigma_series(n: int, m: int, a, b, ap, bp, order: int) -> List[Fraction]:
    """Taylor coefficients ``c_k`` of the interval factor in powers of ``sigma^2``,
    from exact monomial integration of ``(-1)^k/k! x^n y^m (x-y)^{2k}``."""
    a, b, ap, bp = map(rat, (a, b, ap, bp))

    def mono(p, lo, hi):
        return (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)

    out = []
    for k in range(order + 1):
        s = Fraction(0)
        for j in range(2 * k + 1):
            s += comb(2 * k, j) * (-1) ** (2 * k - j) * mono(n + j, a, b) * mono(m + 2 * k - j, ap, bp)
        out.append(s * (-1) ** k / factorial(k))
    return out


# -- rendering ------------------------------------------------------------------


def _arg_text(d: Fraction) -> str:
    if d == 1:
        return "σ"
    if d.denominator == 1:
        return f"{d.numerator}σ"
    if d.numerator == 1:
        return f"σ/{d.denominator}"
    return f"{d.numerator}σ/{d.denominator}"


def _term_text(t: SigmaTerm, c: Fraction) -> Tuple[str, str]:
    sign = "-" if c < 0 else "+"
    p, q = abs(c.numerator), c.denominator
    factors = []
    if t.G:
        g = "" if t.G == 1 else format_rational(t.G)
        factors.append(f"exp(-{g}σ^2)" if not g or t.G.denominator == 1 else f"exp(-({g})σ^2)")
    args = list(t.erf_args)
    seen = []
    for d in args:
        if d not in seen:
            seen.append(d)
    for d in seen:
        k = args.count(d)
        factors.append(f"Erf({_arg_text(d)})" + (f"^{k}" if k > 1 else ""))
    num = "*".join(([str(p)] if p != 1 or not factors else []) + factors)
    den_parts = []
    if t.mu:
        den_parts.append("σ" if t.mu == 1 else f"σ^{t.mu}")
    if q != 1:
        den = str(q) + "".join(den_parts)
    else:
        den = "".join(den_parts)
    if not den:
        return sign, num
    if q != 1 and t.mu:
        return sign, f"{num}/({den})"
    return sign, f"{num}/{den}"


def render_text(e: SigmaExpr) -> str:
    items = e.items()
    if not items:
        return "0"
    out = []
    for idx, (t, c) in enumerate(items):
        sign, body = _term_text(t, c)
        if idx == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def _latex_arg(d: Fraction) -> str:
    if d == 1:
        return r"\sigma"
    if d.denominator == 1:
        return f"{d.numerator}\\sigma"
    return f"\\tfrac{{{d.numerator}}}{{{d.denominator}}}\\sigma"


def render_latex(e: SigmaExpr) -> str:
    items = e.items()
    if not items:
        return "0"
    out = []
    for idx, (t, c) in enumerate(items):
        p, q = abs(c.numerator), c.denominator
        num = []
        if t.G:
            g = "" if t.G == 1 else (str(t.G.numerator) if t.G.denominator == 1
                                      else f"\\tfrac{{{t.G.numerator}}}{{{t.G.denominator}}}")
            num.append(f"e^{{-{g}\\sigma^2}}")
        args = list(t.erf_args)
        for d in sorted(set(args)):
            k = args.count(d)
            num.append(f"\\operatorname{{Erf}}({_latex_arg(d)})" + (f"^{k}" if k > 1 else ""))
        numer = (str(p) if p != 1 or not num else "") + " ".join(num)
        den = (str(q) if q != 1 else "") + ("" if not t.mu else ("\\sigma" if t.mu == 1 else f"\\sigma^{{{t.mu}}}"))
        body = f"\\frac{{{numer}}}{{{den}}}" if den else numer
        sign = "-" if c < 0 else "+"
        out.append((("-" if sign == "-" else "") if idx == 0 else f" {sign} ") + body)
    return "".join(out)
