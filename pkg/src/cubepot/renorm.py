"""Integration-by-parts renormalization of sigma-integrands.

A term with ``mu >= 2`` is replaced by ``(1/nu) sigma^{-nu} h'(sigma)`` with
``nu = mu - 1`` and ``h = exp(-G s^2) prod Erf(d_j s)``; boundary terms are
dropped because they cancel across the whole expression.
"""
from __future__ import annotations

import enum
import heapq
from fractions import Fraction
from typing import Dict, List, Tuple

from .errors import NotRewritable
from .sigma import SigmaExpr, SigmaTerm


class TerminalClass(enum.Enum):
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    LogLedger = "LogLedger"
    ResidualConvergent = "ResidualConvergent"
    DivergentAtInfinity = "DivergentAtInfinity"
    DivergentConstant = "DivergentConstant"


def measure(t: SigmaTerm) -> Tuple[int, int]:
    """Termination measure ``(mu - r, r)``; every rewrite child is smaller."""
    return (t.mu - t.r, t.r)


def _children(t: SigmaTerm, c: Fraction) -> List[Tuple[Fraction, int, Fraction, tuple]]:
    nu = t.mu - 1
    out = []
    if t.G:
        out.append((-2 * t.G * c / nu, t.mu - 2, t.G, t.erf_args))
    for j, d in enumerate(t.erf_args):
        rest = t.erf_args[:j] + t.erf_args[j + 1:]
        out.append((c * d / nu, t.mu - 1, t.G + d * d, rest))
    return out


def rewrite_step(t: SigmaTerm, c) -> SigmaExpr:
    if t.mu < 2:
        raise NotRewritable(f"term with mu={t.mu} cannot be rewritten")
    return SigmaExpr.from_items(_children(t, Fraction(c)))


def renormalize(e: SigmaExpr, stats: Dict[str, int] | None = None) -> SigmaExpr:
    """Fixpoint of :func:`rewrite_step` over all terms with ``mu >= 2``."""
    pending: Dict[SigmaTerm, Fraction] = {}
    done = SigmaExpr()
    for t, c in e.terms().items():
        if t.mu >= 2:
            pending[t] = c
        else:
            done._add(c, *t)
    # children have smaller mu, so popping by decreasing mu sees every term
    # only after all of its contributions have been merged
    heap = [(-t.mu, -t.r, t.G, t.erf_args) for t in pending]
    heapq.heapify(heap)
    steps = 0
    while heap:
        nmu, nr, G, args = heapq.heappop(heap)
        top = SigmaTerm(-nmu, G, args)
        c = pending.pop(top, None)
        if c is None:
            continue
        steps += 1
        for cc, mu, G, args in _children(top, c):
            for child, v in SigmaExpr.single(cc, mu, G, args).terms().items():
                assert measure(child) < measure(top)
                if child.mu >= 2:
                    if child not in pending:
                        heapq.heappush(heap, (-child.mu, -child.r, child.G, child.erf_args))
                    w = pending.get(child, Fraction(0)) + v
                    if w:
                        pending[child] = w
                    else:
                        pending.pop(child, None)
                else:
                    done._add(v, *child)
    if stats is not None:
        stats["rewrites"] = steps
    return SigmaExpr(done.terms())


def classify(t: SigmaTerm) -> TerminalClass:
    mu, r, G = t.mu, t.r, t.G
    if mu > 1 or mu < 0:
        raise NotRewritable(f"term with mu={mu} is not terminal")
    if G > 0:
        if (mu, r) == (0, 0):
            return TerminalClass.I1
        if (mu, r) == (1, 1):
            return TerminalClass.I2
        if (mu, r) == (0, 2):
            return TerminalClass.I3
        return TerminalClass.ResidualConvergent
    if (mu, r) == (0, 0):
        return TerminalClass.DivergentConstant
    if (mu, r) == (1, 1):
        return TerminalClass.LogLedger
    return TerminalClass.DivergentAtInfinity


def classify_terms(e: SigmaExpr) -> Dict[TerminalClass, SigmaExpr]:
    buckets: Dict[TerminalClass, Dict[SigmaTerm, Fraction]] = {}
    for t, c in e.items():
        buckets.setdefault(classify(t), {})[t] = c
    return {k: SigmaExpr(v) for k, v in buckets.items()}
