"""Command line front end.

Examples::

    python -m cubepot force --q "1,2;0,1;0,1" --qp "0,1;0,1;0,1" --axis 1
    python -m cubepot potential --q "0,1;0,1" --qp "0,1;0,1" --n 1,1 --m 2,2 --format latex
    python -m cubepot --demo hackbusch --format json
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import mpmath

from .closedform import DIVERGENT, NUMERIC_ONLY, NumericValue, emit, to_json_dict
from .errors import Divergent, InvalidSpec, QuadratureFailure
from .problem import DEMOS, demo_spec, dump_integrand, make_spec, run
from .reference import waldvogel_potential

EXIT_OK, EXIT_INVALID, EXIT_DIVERGENT, EXIT_QUADRATURE = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubepot",
                                description="Newton potentials and forces between cuboids.")
    p.add_argument("kind", nargs="?",
                   choices=["potential", "force", "point", "point-force", "inverse-cube"])
    p.add_argument("--q", help='bounds of Q, e.g. "0,1;0,1;0,1"')
    p.add_argument("--qp", help="bounds of Q' (or a point \"y1,y2,y3\" for point kinds)")
    p.add_argument("--n", help="monomial exponents on Q, e.g. 1,1,1")
    p.add_argument("--m", help="monomial exponents on Q'")
    p.add_argument("--axis", type=int, help="force component (1-based)")
    p.add_argument("--rho", default="0", help="regularization rho (dimensions 1 and 2)")
    p.add_argument("--dim", type=int, help="dimension (checked against the bounds)")
    p.add_argument("--format", default="text", choices=["text", "latex", "json"])
    p.add_argument("--digits", type=int, default=12)
    p.add_argument("--dump", choices=["factors", "raw", "renormalized"],
                   help="print an intermediate integrand instead of the result")
    p.add_argument("--demo", choices=DEMOS, help="run a built-in problem")
    return p


def _spec_from_args(args):
    if args.demo:
        return demo_spec(args.demo)
    if not args.kind or not args.q or not args.qp:
        raise InvalidSpec("a kind, --q and --qp are required unless --demo is given")
    return make_spec(args.kind, args.q, args.qp, args.n, args.m, args.axis, args.rho, args.dim)


def _format_value(result, digits: int) -> str:
    if result.exact is not None:
        return mpmath.nstr(result.exact, digits, strip_zeros=False)
    return mpmath.nstr(mpmath.mpf(result.value), digits, strip_zeros=False)


def _render(result, fmt: str, digits: int) -> str:
    spec = result.spec
    value = NumericValue(result.value, result.error,
                         result.exact if result.exact is not None else mpmath.mpf(result.value))
    if fmt == "json":
        if result.status == NUMERIC_ONLY:
            out = {"problem": spec.describe(), "status": NUMERIC_ONLY, "closed_form": [],
                   "residuals": [],
                   "value": {"decimal": _format_value(result, digits), "digits": digits},
                   "error": result.error}
            if result.closed is not None:
                out["divergent_classes"] = sorted(k.name for k in result.classes
                                                  if k.name.startswith("Divergent"))
            return json.dumps(out, indent=2)
        return json.dumps(to_json_dict(result.closed, digits, spec.describe(), value), indent=2)
    lines = []
    if result.status == NUMERIC_ONLY:
        body = "(no elementary closed form; numeric quadrature)"
    else:
        body = emit(result.closed, fmt)
    if fmt == "latex":
        lines.append(body)
        lines.append(f"% status: {result.status}")
        lines.append(f"% value: {_format_value(result, digits)}")
    else:
        lines.append(f"status: {result.status}")
        lines.append(f"closed form: {body}")
        lines.append(f"value: {_format_value(result, digits)}")
        lines.append(f"error estimate: {result.error:.3g}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        if args.dump:
            print(dump_integrand(spec, args.dump, "latex" if args.format == "latex" else "text"))
            return EXIT_OK
        result = run(spec, digits=max(args.digits, 13))
        print(_render(result, args.format, args.digits))
        if args.demo == "waldvogel-check":
            y = [float(v) for v in spec.Qp]
            w = waldvogel_potential(spec.Q, y)
            msg = f"waldvogel formula: {mpmath.nstr(mpmath.mpf(w), args.digits)}"
            print(msg, file=sys.stderr if args.format == "json" else sys.stdout)
        return EXIT_DIVERGENT if result.status == DIVERGENT else EXIT_OK
    except InvalidSpec as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Divergent as exc:
        print(f"divergent: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except QuadratureFailure as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE


if __name__ == "__main__":
    sys.exit(main())
