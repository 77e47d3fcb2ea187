"""Exact Newton potentials and forces between axis-parallel cuboids."""
from .closedform import ClosedExpr, canonicalize, emit, evaluate_numeric
from .problem import ProblemSpec, demo_spec, dump_integrand, run
from .reference import CuboidSpec
from .sigma import SigmaExpr, SigmaTerm

__all__ = [
    "ClosedExpr",
    "CuboidSpec",
    "ProblemSpec",
    "SigmaExpr",
    "SigmaTerm",
    "canonicalize",
    "demo_spec",
    "dump_integrand",
    "emit",
    "evaluate_numeric",
    "run",
]
__version__ = "0.1.0"
