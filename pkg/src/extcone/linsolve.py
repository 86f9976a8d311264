"""Exact rational solver for mixed equality / strict-inequality systems.

Used by the decomposition and interpolation routines, which need a point in
the relative interior of a rational polyhedron (strict inequalities), not
just feasibility.  Strategy:

1. eliminate equalities by Gaussian substitution, remembering each
   substitution so witnesses can be reconstructed,
2. replace every strict inequality  l(v) < c  by  l(v) + delta <= c  with a
   shared slack variable delta, and maximize delta by Fourier-Motzkin
   elimination of the remaining variables,
3. if the supremum of delta is positive the system is strictly feasible;
   back-substitute with delta fixed at a definite positive rational value
   and pick midpoints of the surviving intervals.

Everything is Fraction arithmetic; no floats, no tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import PreconditionError, SolverFailure

# A linear row is (coeffs, rhs) standing for  sum coeffs[v] * v  <=  rhs.
Row = Tuple[Dict[str, Fraction], Fraction]

_SLACK = "__slack__"


class LinearSystem:
    """Accumulates exact linear constraints over named rational variables."""

    def __init__(self, variables: Sequence[str]):
        self.variables = list(variables)
        if len(set(self.variables)) != len(self.variables):
            raise PreconditionError("duplicate variable names")
        self.equalities: List[Row] = []
        self.inequalities: List[Tuple[Dict[str, Fraction], Fraction, bool]] = []

    def _clean(self, coeffs: Dict[str, Fraction]) -> Dict[str, Fraction]:
        out = {}
        for v, c in coeffs.items():
            if v not in self.variables:
                raise PreconditionError("unknown variable %r" % v)
            c = Fraction(c)
            if c != 0:
                out[v] = c
        return out

    def add_eq(self, coeffs: Dict[str, Fraction], rhs) -> None:
        self.equalities.append((self._clean(coeffs), Fraction(rhs)))

    def add_leq(self, coeffs: Dict[str, Fraction], rhs) -> None:
        self.inequalities.append((self._clean(coeffs), Fraction(rhs), False))

    def add_lt(self, coeffs: Dict[str, Fraction], rhs) -> None:
        self.inequalities.append((self._clean(coeffs), Fraction(rhs), True))

    def add_geq(self, coeffs: Dict[str, Fraction], rhs) -> None:
        self.add_leq({v: -c for v, c in coeffs.items()}, -Fraction(rhs))

    def add_gt(self, coeffs: Dict[str, Fraction], rhs) -> None:
        self.add_lt({v: -c for v, c in coeffs.items()}, -Fraction(rhs))


def _substitute(coeffs: Dict[str, Fraction], rhs: Fraction,
                var: str, expr: Dict[str, Fraction], const: Fraction
                ) -> Tuple[Dict[str, Fraction], Fraction]:
    """Replace var by (expr + const) inside a row; no-op if var is absent."""
    if var not in coeffs:
        return coeffs, rhs
    c = coeffs[var]
    out = {v: k for v, k in coeffs.items() if v != var}
    for v, k in expr.items():
        out[v] = out.get(v, Fraction(0)) + c * k
        if out[v] == 0:
            del out[v]
    return out, rhs - c * const


def solve(system: LinearSystem) -> Optional[Dict[str, Fraction]]:
    """Return a witness assignment, or None when strictly infeasible.

    The witness satisfies every equality exactly and every strict inequality
    with margin at least delta*, the definite positive rational chosen after
    maximizing the shared slack.
    """
    # Stage 1: Gaussian elimination of equalities.  Each substitution's
    # expression only mentions variables not yet substituted, so applying
    # the list in creation order fully normalizes any row.
    subs: List[Tuple[str, Dict[str, Fraction], Fraction]] = []
    eqs = [(dict(c), Fraction(r)) for c, r in system.equalities]
    while eqs:
        coeffs, rhs = eqs.pop()
        for var, expr, const in subs:
            coeffs, rhs = _substitute(coeffs, rhs, var, expr, const)
        if not coeffs:
            if rhs != 0:
                return None
            continue
        var = sorted(coeffs)[0]
        c = coeffs[var]
        expr = {v: -k / c for v, k in coeffs.items() if v != var}
        const = rhs / c
        subs.append((var, expr, const))

    rows: List[Row] = []
    for coeffs, rhs, strict in system.inequalities:
        coeffs = dict(coeffs)
        for var, expr, const in subs:
            coeffs, rhs = _substitute(coeffs, rhs, var, expr, const)
        if strict:
            coeffs[_SLACK] = coeffs.get(_SLACK, Fraction(0)) + 1
        rows.append((coeffs, rhs))

    # Stage 2: Fourier-Motzkin elimination of the real variables.  Each
    # stage remembers the lower and upper rows on its variable so a witness
    # can be rebuilt afterwards.  An upper entry (rest, bound) means
    # var <= bound - rest(assignment); a lower entry means var >= the same.
    remaining = sorted({v for row, _ in rows for v in row if v != _SLACK})
    stages: List[Tuple[str, List[Row], List[Row]]] = []
    for var in remaining:
        lowers: List[Row] = []
        uppers: List[Row] = []
        keep: List[Row] = []
        for row, rhs in rows:
            c = row.get(var, Fraction(0))
            if c == 0:
                keep.append((row, rhs))
                continue
            rest = {v: k / abs(c) for v, k in row.items() if v != var}
            bound = rhs / abs(c)
            if c > 0:
                uppers.append((rest, bound))
            else:
                lowers.append(({v: -k for v, k in rest.items()}, -bound))
        stages.append((var, lowers, uppers))
        rows = keep
        for lo_rest, lb in lowers:
            for up_rest, ub in uppers:
                combo = dict(up_rest)
                for v, k in lo_rest.items():
                    combo[v] = combo.get(v, Fraction(0)) - k
                    if combo[v] == 0:
                        del combo[v]
                rows.append((combo, ub - lb))

    # Stage 3: surviving rows mention only the slack.  Slack coefficients
    # stay nonnegative under the combinations above, so the feasible set of
    # delta is an interval [0, sup].
    sup: Optional[Fraction] = None
    for row, rhs in rows:
        c = row.get(_SLACK, Fraction(0))
        if c == 0:
            if rhs < 0:
                return None
            continue
        if c < 0:
            raise SolverFailure("negative slack coefficient in eliminated row")
        bound = rhs / c
        sup = bound if sup is None else min(sup, bound)
    if sup is not None and sup <= 0:
        return None
    delta = Fraction(1) if sup is None else min(Fraction(1), sup / 2)

    # Stage 4: rebuild a witness.  Later-eliminated variables are assigned
    # first, so every rest-row already has all its variables valued.
    assignment: Dict[str, Fraction] = {_SLACK: delta}

    def evaluate(rest: Dict[str, Fraction]) -> Fraction:
        return sum((k * assignment[v] for v, k in rest.items()), Fraction(0))

    for var, lowers, uppers in reversed(stages):
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        for rest, bound in lowers:
            cand = bound - evaluate(rest)
            lo = cand if lo is None else max(lo, cand)
        for rest, bound in uppers:
            cand = bound - evaluate(rest)
            hi = cand if hi is None else min(hi, cand)
        if lo is not None and hi is not None:
            if lo > hi:
                raise SolverFailure("back-substitution interval is empty")
            assignment[var] = (lo + hi) / 2
        elif lo is not None:
            assignment[var] = lo + 1
        elif hi is not None:
            assignment[var] = hi - 1
        else:
            assignment[var] = Fraction(0)

    for v in system.variables:
        assignment.setdefault(v, Fraction(0))
    for var, expr, const in reversed(subs):
        assignment[var] = sum((k * assignment[v] for v, k in expr.items()),
                              Fraction(0)) + const

    witness = {v: assignment[v] for v in system.variables}

    # Final guard; a bug upstream must never leak a bad witness.
    for coeffs, rhs in system.equalities:
        if sum((c * witness[v] for v, c in coeffs.items()), Fraction(0)) != rhs:
            raise SolverFailure("witness violates an equality")
    for coeffs, rhs, strict in system.inequalities:
        lhs = sum((c * witness[v] for v, c in coeffs.items()), Fraction(0))
        if (strict and not lhs < rhs) or (not strict and not lhs <= rhs):
            raise SolverFailure("witness violates an inequality")
    return witness
