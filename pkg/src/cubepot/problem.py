"""Problem specifications and the end-to-end pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .closedform import (
    DIVERGENT,
    NUMERIC_ONLY,
    ClosedExpr,
    NumericValue,
    canonicalize,
    evaluate_numeric,
    translate,
)
from .errors import Divergent, InvalidInterval, InvalidSpec
from .exactnum import format_rational, rat
from .quadrature import QuadratureResult, numeric_fallback
from .reference import CuboidSpec
from .renorm import classify_terms, renormalize
from .sigma import (
    SigmaExpr,
    attach_gaussian_prefactor,
    force_factor,
    interval_factor,
    point_factor,
    point_force_factor,
    product,
)

KINDS = ("potential", "force", "point-potential", "point-force", "inverse-cube")
#: Above this dimension the integrand is not expanded symbolically.
SYMBOLIC_DIM_LIMIT = 8


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    Q: CuboidSpec
    Qp: object  # CuboidSpec, or a tuple of coordinates for point kinds
    n: Tuple[int, ...]
    m: Tuple[int, ...] = ()
    axis: Optional[int] = None
    rho: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)
    name: str = ""

    @property
    def dim(self) -> int:
        return self.Q.dim

    @property
    def is_point(self) -> bool:
        return self.kind in ("point-potential", "point-force")

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}")
        d = self.dim
        if d < 1:
            raise InvalidSpec("dimension must be at least 1")
        if len(self.n) != d:
            raise InvalidSpec(f"weight n has length {len(self.n)}, expected {d}")
        if any(int(k) != k or k < 0 for k in self.n + tuple(self.m)):
            raise InvalidSpec("weights must be non-negative integers")
        if self.is_point:
            if isinstance(self.Qp, CuboidSpec) or len(self.Qp) != d:
                raise InvalidSpec(f"field point must have {d} coordinates")
        else:
            if not isinstance(self.Qp, CuboidSpec) or self.Qp.dim != d:
                raise InvalidSpec(f"second cuboid must have dimension {d}")
            if len(self.m) != d:
                raise InvalidSpec(f"weight m has length {len(self.m)}, expected {d}")
        if self.kind in ("force", "point-force"):
            if self.axis is None or not 1 <= self.axis <= d:
                raise InvalidSpec(f"force axis must be in 1..{d}")
        if self.rho < 0:
            raise InvalidSpec("rho must be non-negative")
        if self.rho and d > 2:
            raise InvalidSpec("rho is only supported in dimensions 1 and 2")
        if d == 1 and self.rho == 0 and self.kind != "inverse-cube":
            a, b = self.Q.bounds[0]
            if self.is_point:
                y = rat(self.Qp[0])
                if a <= y <= b and a < b:
                    raise InvalidSpec("1D field point inside the interval needs rho > 0")
            else:
                ap, bp = self.Qp.bounds[0]
                if max(a, ap) <= min(b, bp) and a < b and ap < bp:
                    raise InvalidSpec("overlapping or touching 1D intervals need rho > 0")

    def describe(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim,
               "Q": [[format_rational(a), format_rational(b)] for a, b in self.Q.bounds]}
        if self.is_point:
            out["y"] = [format_rational(rat(v)) for v in self.Qp]
        else:
            out["Qp"] = [[format_rational(a), format_rational(b)] for a, b in self.Qp.bounds]
            out["m"] = list(self.m)
        out["n"] = list(self.n)
        if self.axis is not None:
            out["axis"] = self.axis
        if self.rho:
            out["rho"] = format_rational(self.rho)
        if self.scale != 1:
            out["scale"] = format_rational(self.scale)
        if self.name:
            out["name"] = self.name
        return out


def build_factors(spec: ProblemSpec) -> Tuple[List[SigmaExpr], int]:
    """Per-axis factors and the power of sigma multiplying their product.

    Constant prefactors (the ``2`` of the inverse-cube kernel, the user scale
    and the ``rho`` Gaussian) are folded into the first factor.
    """
    spec.validate()
    factors = []
    try:
        for j in range(spec.dim):
            a, b = spec.Q.bounds[j]
            nj = int(spec.n[j])
            on_axis = spec.axis == j + 1
            if spec.is_point:
                y = rat(spec.Qp[j])
                f = point_force_factor(nj, a, b, y) if on_axis else point_factor(nj, a, b, y)
            else:
                ap, bp = spec.Qp.bounds[j]
                mj = int(spec.m[j])
                if on_axis and spec.kind == "force":
                    f = force_factor(nj, mj, a, b, ap, bp)
                else:
                    f = interval_factor(nj, mj, a, b, ap, bp)
            factors.append(f)
    except InvalidInterval as exc:
        raise InvalidSpec(str(exc)) from exc
    shift = 2 if spec.kind == "inverse-cube" else 0
    c = spec.scale * (2 if spec.kind == "inverse-cube" else 1)
    first = factors[0].scale(c) if c != 1 else factors[0]
    if spec.rho:
        first = attach_gaussian_prefactor(first, spec.rho)
    return [first] + factors[1:], shift


def raw_integrand(spec: ProblemSpec) -> SigmaExpr:
    factors, shift = build_factors(spec)
    g = product(factors)
    return g.shift_power(shift) if shift else g


def converges(g: SigmaExpr) -> bool:
    """Whether ``int_0^inf g`` is finite.

    Near 0 the exact Taylor series must be pole free.  For large sigma,
    ``Erf -> sqrt(pi)/2`` up to exponentially small terms, and since powers of
    ``sqrt(pi)`` are linearly independent over the rationals every exact sum
    of ``G = 0`` coefficients with ``mu <= 1`` has to vanish.
    """
    if g.has_pole():
        return False
    return all(mu >= 2 for (mu, r) in g._asymptotic_parts())


@dataclass
class RunResult:
    spec: ProblemSpec
    status: str
    value: float
    error: float
    closed: Optional[ClosedExpr] = None
    exact: object = None
    quadrature: Optional[QuadratureResult] = None
    raw: Optional[SigmaExpr] = None
    renormalized: Optional[SigmaExpr] = None
    classes: dict = field(default_factory=dict)


def run(spec: ProblemSpec, digits: int = 13) -> RunResult:
    spec.validate()
    if spec.dim > SYMBOLIC_DIM_LIMIT:
        q = numeric_fallback(spec)
        return RunResult(spec, NUMERIC_ONLY, q.value, q.error_estimate, quadrature=q)
    g = raw_integrand(spec)
    gt = renormalize(g)
    classes = classify_terms(gt)
    closed = canonicalize(translate(gt))
    if closed.status == DIVERGENT:
        if not converges(g):
            raise Divergent("the integral diverges"
                            + (f" (log ledger {format_rational(closed.ledger)})" if closed.ledger else ""))
        q = numeric_fallback(spec)
        return RunResult(spec, NUMERIC_ONLY, q.value, q.error_estimate, closed=closed,
                         quadrature=q, raw=g, renormalized=gt, classes=classes)
    val: NumericValue = evaluate_numeric(closed, digits)
    return RunResult(spec, closed.status, val.value, val.error, closed=closed, exact=val.exact,
                     raw=g, renormalized=gt, classes=classes)


def dump_integrand(spec: ProblemSpec, stage: str, fmt: str = "text") -> str:
    render = (lambda e: e.to_latex()) if fmt == "latex" else (lambda e: e.to_text())
    if stage == "factors":
        factors, shift = build_factors(spec)
        lines = []
        for j, f in enumerate(factors, 1):
            star = "*" if spec.axis == j and spec.kind in ("force", "point-force") else ""
            lines.append(f"f{j}{star}(σ) = {render(f)}")
        if shift:
            lines.append(f"times σ^{shift}")
        return "\n".join(lines)
    if stage == "raw":
        return render(raw_integrand(spec))
    if stage == "renormalized":
        return render(renormalize(raw_integrand(spec)))
    raise InvalidSpec(f"unknown stage {stage!r}")


# -- named problems -------------------------------------------------------------

def _cube(d=3, lo=0, hi=1) -> CuboidSpec:
    return CuboidSpec(((lo, hi),) * d)


def demo_spec(name: str) -> ProblemSpec:
    z3 = (0, 0, 0)
    if name == "trefethen":
        return ProblemSpec("force", CuboidSpec(((1, 2), (0, 1), (0, 1))), _cube(), z3, z3,
                           axis=1, name=name)
    if name == "hackbusch":
        return ProblemSpec("potential", _cube(), _cube(), (1, 1, 1), (2, 2, 2), name=name)
    if name == "selfenergy":
        return ProblemSpec("potential", _cube(), _cube(), z3, z3, scale=Fraction(1, 2), name=name)
    if name == "v4":
        return ProblemSpec("potential", _cube(4), _cube(4), (0,) * 4, (0,) * 4, name=name)
    if name == "v100":
        return ProblemSpec("potential", _cube(100), _cube(100), (0,) * 100, (0,) * 100, name=name)
    if name == "h":
        return ProblemSpec("inverse-cube", _cube(3, 1, 2), _cube(), z3, z3, name=name)
    if name == "oned":
        return ProblemSpec("potential", CuboidSpec(((2, 3),)), CuboidSpec(((0, 1),)), (1,), (2,),
                           name=name)
    if name == "twod":
        return ProblemSpec("potential", _cube(2), _cube(2), (1, 1), (2, 2), name=name)
    if name == "waldvogel-check":
        half = Fraction(1, 2)
        return ProblemSpec("point-potential", _cube(), (half, half, half), z3, name=name)
    raise InvalidSpec(f"unknown demo {name!r}")


DEMOS = ("trefethen", "hackbusch", "selfenergy", "v4", "v100", "h", "oned", "twod",
         "waldvogel-check")


def parse_bounds(text: str) -> CuboidSpec:
    try:
        parts = [p.split(",") for p in text.split(";")]
        return CuboidSpec(tuple((rat(a.strip()), rat(b.strip())) for a, b in parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidSpec(f"cannot parse bounds {text!r}: {exc}") from exc


def parse_point(text: str) -> Tuple[Fraction, ...]:
    try:
        return tuple(rat(v.strip()) for v in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidSpec(f"cannot parse point {text!r}: {exc}") from exc


def parse_index(text: Optional[str], d: int) -> Tuple[int, ...]:
    if text is None:
        return (0,) * d
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise InvalidSpec(f"cannot parse multi-index {text!r}") from exc


def make_spec(kind: str, q: str, qp: str, n: Optional[str] = None, m: Optional[str] = None,
              axis: Optional[int] = None, rho: str = "0", dim: Optional[int] = None) -> ProblemSpec:
    kind = {"point": "point-potential"}.get(kind, kind)
    Q = parse_bounds(q)
    if dim is not None and dim != Q.dim:
        raise InvalidSpec(f"--dim {dim} does not match the bounds (dimension {Q.dim})")
    point = kind in ("point-potential", "point-force")
    Qp = parse_point(qp) if point else parse_bounds(qp)
    try:
        r = rat(rho)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidSpec(f"cannot parse rho {rho!r}") from exc
    spec = ProblemSpec(kind, Q, Qp, parse_index(n, Q.dim), () if point else parse_index(m, Q.dim),
                       axis=axis, rho=r)
    spec.validate()
    return spec
