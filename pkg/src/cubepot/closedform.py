"""Closed-form atoms of the integral table and their exact bookkeeping.

Translation works on renormalized terminal terms:

* I1  ``c e^{-G s^2}``                 -> ``c / sqrt(G)``
* I2  ``c s^{-1} e^{-G s^2} Erf(d s)``  -> ``c (log(d + sqrt(G + d^2)) - log sqrt(G))``
* I3  ``c e^{-G s^2} Erf(a s) Erf(b s)`` -> ``c/(2 sqrt G) arctan(ab / (sqrt G sqrt(G+a^2+b^2)))``

All values include the ``2/sqrt(pi)`` normalization of the sigma integral.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple

import mpmath

from .errors import NotFinite, NotTranslatable
from .exactnum import (
    Quad,
    factor_rational,
    format_rational,
    quad_log_basis,
    rat,
    sqrt_exact,
)
from .renorm import TerminalClass, classify, classify_terms
from .sigma import SigmaExpr, SigmaTerm, render_latex, render_text

# raw atom kinds, as produced by translation
INV_SURD = "InvSurd"
LOG_ATOM = "LogAtom"
ARCTAN_ATOM = "ArctanAtom"
LOG_RATIONAL = "LogRational"
# canonical atom kinds
RATIONAL = "RationalConst"
SURD = "Surd"
LOG_PRIME = "LogPrime"
LOG_QUAD = "LogQuad"
LOG_SQRT = "LogSqrt"
ARCTAN = "Arctan"
PI = "PiMultiple"

_CANONICAL_ORDER = [RATIONAL, SURD, LOG_PRIME, LOG_QUAD, LOG_SQRT, ARCTAN, PI]
_PI_TABLE = {Fraction(1, 3): Fraction(1, 6), Fraction(1): Fraction(1, 4), Fraction(3): Fraction(1, 3)}

ELEMENTARY = "elementary"
MIXED = "mixed"
NUMERIC_ONLY = "numeric-only"
DIVERGENT = "divergent"


@dataclass(frozen=True)
class ClosedAtom:
    kind: str
    coeff: Fraction
    params: Tuple = ()

    def scaled(self, c) -> "ClosedAtom":
        return ClosedAtom(self.kind, self.coeff * rat(c), self.params)

    def value(self) -> mpmath.mpf:
        return self.coeff.numerator * _atom_unit_value(self.kind, self.params) / self.coeff.denominator


def _mpq(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _atom_unit_value(kind: str, params: Tuple):
    if kind == RATIONAL:
        return mpmath.mpf(1)
    if kind == INV_SURD:
        return 1 / mpmath.sqrt(_mpq(params[0]))
    if kind == LOG_ATOM:
        G, d = map(_mpq, params)
        return mpmath.asinh(d / mpmath.sqrt(G))
    if kind == ARCTAN_ATOM:
        G, a, b = map(_mpq, params)
        rg = mpmath.sqrt(G)
        return mpmath.atan(a * b / (rg * mpmath.sqrt(G + a * a + b * b))) / (2 * rg)
    if kind == LOG_RATIONAL:
        return mpmath.log(_mpq(params[0]))
    if kind == SURD:
        return mpmath.sqrt(params[0])
    if kind == LOG_PRIME:
        return mpmath.log(params[0])
    if kind == LOG_QUAD:
        x, y, s = params
        return mpmath.log(_mpq(x) + _mpq(y) * mpmath.sqrt(s))
    if kind == LOG_SQRT:
        return mpmath.log(params[0]) / 2
    if kind == ARCTAN:
        cs, a, s = params
        return mpmath.sqrt(cs) * mpmath.atan(_mpq(a) * mpmath.sqrt(s))
    if kind == PI:
        return mpmath.sqrt(params[0]) * mpmath.pi
    raise ValueError(f"unknown atom kind {kind}")


class NumericValue(NamedTuple):
    value: float
    error: float
    exact: mpmath.mpf


@dataclass(frozen=True)
class ClosedExpr:
    atoms: Tuple[ClosedAtom, ...] = ()
    residuals: Tuple[Tuple[SigmaTerm, Fraction], ...] = ()
    ledger: Fraction = Fraction(0)
    divergent: SigmaExpr = field(default_factory=SigmaExpr)

    @property
    def status(self) -> str:
        if self.ledger or not self.divergent.is_zero():
            return DIVERGENT
        return MIXED if self.residuals else ELEMENTARY

    def __add__(self, other: "ClosedExpr") -> "ClosedExpr":
        return ClosedExpr(self.atoms + other.atoms, self.residuals + other.residuals,
                          self.ledger + other.ledger, self.divergent + other.divergent)

    def scale(self, c) -> "ClosedExpr":
        c = rat(c)
        return ClosedExpr(tuple(a.scaled(c) for a in self.atoms),
                          tuple((t, v * c) for t, v in self.residuals),
                          self.ledger * c, self.divergent.scale(c))

    def __neg__(self) -> "ClosedExpr":
        return self.scale(-1)

    def __sub__(self, other: "ClosedExpr") -> "ClosedExpr":
        return self + (-other)

    def __float__(self) -> float:
        return evaluate_numeric(self).value


# -- constructors for literal expressions ----------------------------------------

def _single(kind, c, params=()) -> ClosedExpr:
    return ClosedExpr((ClosedAtom(kind, rat(c), tuple(params)),))


def const(c) -> ClosedExpr:
    return _single(RATIONAL, c)


def sqrt_term(c, s) -> ClosedExpr:
    """``c * sqrt(s)``."""
    return _single(SURD, c, (int(s),))


def log_term(c, q) -> ClosedExpr:
    """``c * log(q)`` for a positive rational ``q``."""
    return _single(LOG_RATIONAL, c, (rat(q),))


def log_quad_term(c, x, y, s) -> ClosedExpr:
    """``c * log(x + y sqrt(s))``."""
    return _single(LOG_QUAD, c, (rat(x), rat(y), int(s)))


def log_sqrt_term(c, s) -> ClosedExpr:
    """``c * log(sqrt(s))``."""
    return _single(LOG_SQRT, c, (int(s),))


def atan_term(c, a, s=1, cs=1) -> ClosedExpr:
    """``c * sqrt(cs) * arctan(a sqrt(s))``."""
    return _single(ARCTAN, c, (int(cs), rat(a), int(s)))


def pi_term(c, cs=1) -> ClosedExpr:
    """``c * sqrt(cs) * pi``."""
    return _single(PI, c, (int(cs),))


# -- translation -----------------------------------------------------------------

def translate_term(t: SigmaTerm, c) -> ClosedAtom:
    c = rat(c)
    cls = classify(t) if t.mu in (0, 1) else None
    if cls is TerminalClass.I1:
        return ClosedAtom(INV_SURD, c, (t.G,))
    if cls is TerminalClass.I2:
        return ClosedAtom(LOG_ATOM, c, (t.G, t.erf_args[0]))
    if cls is TerminalClass.I3:
        return ClosedAtom(ARCTAN_ATOM, c, (t.G,) + tuple(t.erf_args))
    raise NotTranslatable(f"term {t} is not in the integral table")


def ledger_resolve(terms: SigmaExpr) -> Tuple[List[ClosedAtom], Fraction]:
    """Limit ``rho -> 0`` of the I2 values for terms ``c s^{-1} Erf(d s)``.

    ``arcsinh(d/rho) = log(2d) - log(rho) + o(1)``, so each term leaves
    ``c log(2d)`` and adds ``c`` to the coefficient of ``-log(rho)``.
    """
    atoms = []
    ledger = Fraction(0)
    for t, c in terms.items():
        if t.mu != 1 or t.r != 1 or t.G != 0:
            raise NotTranslatable(f"term {t} is not a log-ledger term")
        atoms.append(ClosedAtom(LOG_RATIONAL, c, (2 * t.erf_args[0],)))
        ledger += c
    return atoms, ledger


def translate(e: SigmaExpr) -> ClosedExpr:
    """Translate a renormalized integrand; nothing is priced numerically here."""
    buckets = classify_terms(e)
    atoms: List[ClosedAtom] = []
    residuals: List[Tuple[SigmaTerm, Fraction]] = []
    ledger = Fraction(0)
    divergent = SigmaExpr()
    for cls, part in buckets.items():
        if cls in (TerminalClass.I1, TerminalClass.I2, TerminalClass.I3):
            atoms.extend(translate_term(t, c) for t, c in part.items())
        elif cls is TerminalClass.LogLedger:
            a, ledger = ledger_resolve(part)
            atoms.extend(a)
        elif cls is TerminalClass.ResidualConvergent:
            residuals.extend(part.items())
        else:
            divergent = divergent + part
    return ClosedExpr(tuple(atoms), tuple(residuals), ledger, divergent)


# -- canonical form ---------------------------------------------------------------

def _rat_content(a: Fraction, b: Fraction) -> Fraction:
    num = math.gcd(a.numerator, b.numerator)
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def _log_rational(c: Fraction, q: Fraction) -> List[ClosedAtom]:
    if q <= 0:
        raise ValueError("log of a non-positive rational")
    return [ClosedAtom(LOG_PRIME, c * e, (p,)) for p, e in factor_rational(q).items()]


def _log_sqrt(c: Fraction, q: Fraction) -> List[ClosedAtom]:
    k, s = sqrt_exact(q)
    out = _log_rational(c, k)
    if s != 1:
        out.append(ClosedAtom(LOG_SQRT, c, (s,)))
    return out


def _log_quad(c: Fraction, x: Fraction, y: Fraction, s: int) -> List[ClosedAtom]:
    # log(x + y sqrt s) with x, y > 0; pull out the rational content
    g = _rat_content(x, y)
    return _log_rational(c, g) + [ClosedAtom(LOG_QUAD, c, (x / g, y / g, s))]


def _canonical_atoms(a: ClosedAtom) -> List[ClosedAtom]:
    c, kind, p = a.coeff, a.kind, a.params
    if kind == RATIONAL:
        return [a]
    if kind in (INV_SURD, SURD):
        k, s = sqrt_exact(1 / p[0]) if kind == INV_SURD else sqrt_exact(Fraction(p[0]))
        return [ClosedAtom(RATIONAL, c * k)] if s == 1 else [ClosedAtom(SURD, c * k, (s,))]
    if kind == LOG_ATOM:
        G, d = p
        k, s = sqrt_exact(G + d * d)
        head = _log_rational(c, d + k) if s == 1 else _log_quad(c, d, k, s)
        return head + _log_sqrt(-c, G)
    if kind in (LOG_RATIONAL,):
        return _log_rational(c, p[0])
    if kind == LOG_PRIME:
        return [a]
    if kind == LOG_QUAD:
        x, y, s = p
        k, s2 = sqrt_exact(Fraction(s))
        if s2 == 1:
            return _log_rational(c, x + y * k)
        return _log_quad(c, x, y * k, s2)
    if kind == LOG_SQRT:
        return _log_sqrt(c, Fraction(p[0]))
    if kind == ARCTAN_ATOM:
        G, d2, d3 = p
        ck, cs = sqrt_exact(1 / G)
        tau2 = d2 * d2 * d3 * d3 / (G * (G + d2 * d2 + d3 * d3))
        coeff = c * ck / 2
        if tau2 in _PI_TABLE:
            return [ClosedAtom(PI, coeff * _PI_TABLE[tau2], (cs,))]
        ta, ts = sqrt_exact(tau2)
        return [ClosedAtom(ARCTAN, coeff, (cs, ta, ts))]
    if kind == ARCTAN:
        cs, ta, ts = p
        k1, s1 = sqrt_exact(Fraction(cs))
        k2, s2 = sqrt_exact(ta * ta * ts)
        if ta < 0:
            k2 = -k2
        tau2 = k2 * k2 * s2
        if tau2 in _PI_TABLE:
            return [ClosedAtom(PI, c * k1 * _PI_TABLE[tau2] * (1 if k2 > 0 else -1), (s1,))]
        return [ClosedAtom(ARCTAN, c * k1, (s1, k2, s2))]
    if kind == PI:
        k, s = sqrt_exact(Fraction(p[0]))
        return [ClosedAtom(PI, c * k, (s,))]
    raise ValueError(f"unknown atom kind {kind}")


def _atom_order(a: ClosedAtom):
    return (_CANONICAL_ORDER.index(a.kind), a.params)


def canonicalize(e: ClosedExpr) -> ClosedExpr:
    """Combine like atoms after reducing surds, rational logs and pi multiples.

    Logs of irrational quadratic numbers are kept as they are, so the result
    stays close to the printed table values.
    """
    acc: Dict[Tuple[str, Tuple], Fraction] = {}
    for a in e.atoms:
        for b in _canonical_atoms(a):
            key = (b.kind, b.params)
            acc[key] = acc.get(key, Fraction(0)) + b.coeff
    atoms = sorted((ClosedAtom(k, v, p) for (k, p), v in acc.items() if v), key=_atom_order)
    res: Dict[SigmaTerm, Fraction] = {}
    for t, c in e.residuals:
        res[t] = res.get(t, Fraction(0)) + c
    residuals = tuple(sorted(((t, c) for t, c in res.items() if c),
                             key=lambda tc: (tc[0].r, -tc[0].mu, tc[0].G, tc[0].erf_args)))
    return ClosedExpr(tuple(atoms), residuals, e.ledger, e.divergent)


def normal_form(e: ClosedExpr) -> Dict[tuple, Fraction]:
    """Coordinates over a multiplicatively reduced basis.

    Logs of quadratic numbers are split into prime logs, the fundamental
    unit and a reduced norm-one part; arctangents of arguments above 1 are
    reflected through ``pi/2``.  Two expressions with equal normal forms are
    equal; the converse only holds up to relations this basis does not see.
    """
    out: Dict[tuple, Fraction] = {}

    def add(key, c):
        v = out.get(key, Fraction(0)) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    for a in canonicalize(e).atoms:
        c, p = a.coeff, a.params
        if a.kind == RATIONAL:
            add(("one",), c)
        elif a.kind == SURD:
            add(("surd", p[0]), c)
        elif a.kind == LOG_PRIME:
            add(("prime", p[0]), c)
        elif a.kind == LOG_SQRT:
            for q, ex in factor_rational(Fraction(p[0])).items():
                add(("prime", q), c * ex / 2)
        elif a.kind == LOG_QUAD:
            for key, v in quad_log_basis(Quad(*p)).items():
                add(key, c * v)
        elif a.kind == ARCTAN:
            cs, ta, ts = p
            if ta * ta * ts > 1:
                add(("pi", cs), c / 2)
                add(("atan", cs, 1 / (ta * ts), ts), -c)
            else:
                add(("atan", cs, ta, ts), c)
        elif a.kind == PI:
            add(("pi", p[0]), c)
    for t, c in e.residuals:
        add(("residual", t), c)
    return out


def structurally_equal(a: ClosedExpr, b: ClosedExpr) -> bool:
    return normal_form(a) == normal_form(b)


# -- numerics ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def residual_value(t: SigmaTerm, tol: float = 1e-13):
    """``(2/sqrt pi) int_0^inf`` of a single residual term."""
    from .quadrature import integrate_halfline

    unit = SigmaExpr.single(1, t.mu, t.G, t.erf_args)
    res = integrate_halfline(unit, tol=tol)
    return res.value, res.error_estimate


def evaluate_numeric(e: ClosedExpr, target_digits: int = 13) -> NumericValue:
    if e.status == DIVERGENT:
        raise NotFinite("expression is divergent")
    dps = max(30, target_digits + 15)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        scale = mpmath.mpf(0)
        for a in e.atoms:
            v = a.value()
            total += v
            scale += abs(v)
        err = float(scale) * 10.0 ** (5 - dps)
        for t, c in e.residuals:
            v, dv = residual_value(t)
            total += _mpq(c) * v
            err += abs(float(c)) * dv
        return NumericValue(float(total), err, +total)


# -- emission ---------------------------------------------------------------------

def _quad_text(x: Fraction, y: Fraction, s: int, latex: bool) -> str:
    root = f"\\sqrt{{{s}}}" if latex else f"sqrt({s})"
    ys = "" if y == 1 else (_rat_text(y, latex) + ("" if latex else "*"))
    return f"{_rat_text(x, latex)}+{ys}{root}"


def _rat_text(q: Fraction, latex: bool) -> str:
    if latex and q.denominator != 1:
        sign = "-" if q < 0 else ""
        return f"{sign}\\frac{{{abs(q.numerator)}}}{{{q.denominator}}}"
    return format_rational(q)


def _surd_value_text(a: Fraction, s: int, latex: bool) -> str:
    """Text for the positive number ``a sqrt(s)``."""
    if s == 1:
        return _rat_text(a, latex)
    root = f"\\sqrt{{{s}}}" if latex else f"sqrt({s})"
    p, q = a.numerator, a.denominator
    num = root if p == 1 else (f"{p}{root}" if latex else f"{p}*{root}")
    if q == 1:
        return num
    return f"\\frac{{{num}}}{{{q}}}" if latex else f"{num}/{q}"


def _body(a: ClosedAtom, latex: bool) -> str:
    p = a.params
    if a.kind == LOG_PRIME:
        return f"\\log {p[0]}" if latex else f"log({p[0]})"
    if a.kind == LOG_QUAD:
        inner = _quad_text(*p, latex=latex)
        return f"\\log({inner})" if latex else f"log({inner})"
    if a.kind == LOG_SQRT:
        return f"\\log\\sqrt{{{p[0]}}}" if latex else f"log(sqrt({p[0]}))"
    if a.kind == ARCTAN:
        cs, ta, ts = p
        pre = "" if cs == 1 else (f"\\sqrt{{{cs}}}\\," if latex else f"sqrt({cs})*")
        arg = _surd_value_text(ta, ts, latex)
        return pre + (f"\\arctan({arg})" if latex else f"atan({arg})")
    if a.kind == PI:
        cs = p[0]
        if cs == 1:
            return "\\pi" if latex else "pi"
        return f"\\sqrt{{{cs}}}\\,\\pi" if latex else f"sqrt({cs})*pi"
    raise ValueError(a.kind)


def _signed_piece(c: Fraction, body: str, latex: bool, surd: bool = False) -> Tuple[str, str]:
    sign = "-" if c < 0 else "+"
    c = abs(c)
    if body == "":
        return sign, _rat_text(c, latex)
    if latex:
        if c == 1:
            return sign, body
        return sign, f"{_rat_text(c, True)}\\,{body}"
    if surd and c.numerator == 1:
        return sign, body if c.denominator == 1 else f"{body}/{c.denominator}"
    if c == 1:
        return sign, body
    if c.denominator == 1:
        return sign, f"{c.numerator}*{body}"
    return sign, f"({format_rational(c)})*{body}"


def _pieces(e: ClosedExpr, latex: bool) -> List[Tuple[str, str]]:
    out = []
    for a in e.atoms:
        if a.kind == RATIONAL:
            out.append(_signed_piece(a.coeff, "", latex))
        elif a.kind == SURD:
            s = a.params[0]
            if latex:
                sign = "-" if a.coeff < 0 else "+"
                out.append((sign, _surd_value_text(abs(a.coeff), s, True)))
            else:
                out.append(_signed_piece(a.coeff, f"sqrt({s})", False, surd=True))
        else:
            out.append(_signed_piece(a.coeff, _body(a, latex), latex))
    for t, c in e.residuals:
        unit = SigmaExpr.single(1, t.mu, t.G, t.erf_args)
        if latex:
            body = f"\\frac{{2}}{{\\sqrt\\pi}}\\int_0^\\infty {render_latex(unit)}\\,d\\sigma"
        else:
            body = f"J[{render_text(unit)}]"
        out.append(_signed_piece(c, body, latex))
    return out


def _join(pieces: List[Tuple[str, str]]) -> str:
    if not pieces:
        return "0"
    first_sign, first = pieces[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        s += f" {sign} {body}"
    return s


def _param_json(a: ClosedAtom) -> dict:
    p = a.params
    if a.kind == SURD:
        return {"radicand": p[0]}
    if a.kind == LOG_PRIME:
        return {"prime": p[0]}
    if a.kind == LOG_QUAD:
        return {"x": format_rational(p[0]), "y": format_rational(p[1]), "radicand": p[2]}
    if a.kind == LOG_SQRT:
        return {"radicand": p[0]}
    if a.kind == ARCTAN:
        return {"coeff_radicand": p[0], "arg": format_rational(p[1]), "arg_radicand": p[2]}
    if a.kind == PI:
        return {"coeff_radicand": p[0]}
    return {}


def term_json(t: SigmaTerm) -> dict:
    return {"mu": t.mu, "G": format_rational(t.G), "erf_args": [format_rational(d) for d in t.erf_args]}


def to_json_dict(e: ClosedExpr, digits: int = 12, problem: Optional[dict] = None,
                 value: Optional[NumericValue] = None) -> dict:
    e = canonicalize(e)
    status = e.status
    residuals = []
    for t, c in e.residuals:
        v, dv = residual_value(t)
        residuals.append({"term": dict(term_json(t), coeff=format_rational(c)), "value": v, "error": dv})
    if value is None and status != DIVERGENT:
        value = evaluate_numeric(e, digits)
    out = {
        "problem": problem or {},
        "status": status,
        "closed_form": [
            {"kind": a.kind, "coeff": format_rational(a.coeff), "params": _param_json(a)}
            for a in e.atoms
        ],
        "residuals": residuals,
        "value": ({"decimal": mpmath.nstr(value.exact, digits, strip_zeros=False), "digits": digits}
                  if value is not None else {"decimal": None, "digits": 0}),
    }
    if status == DIVERGENT:
        out["ledger"] = format_rational(e.ledger)
        out["divergent_terms"] = render_text(e.divergent)
    return out


def emit(e: ClosedExpr, fmt: str = "text", digits: int = 12, problem: Optional[dict] = None,
         value: Optional[NumericValue] = None) -> str:
    if fmt == "json":
        return json.dumps(to_json_dict(e, digits, problem, value), indent=2, sort_keys=False)
    e = canonicalize(e)
    if fmt == "text":
        return _join(_pieces(e, False))
    if fmt == "latex":
        return _join(_pieces(e, True))
    raise ValueError(f"unknown format {fmt!r}")
