"""An ordered rational vector space with interpolation, built from a cone.

Vectors assign a rational (of either sign) to every generator.  A vector is
positive when some idempotent w witnesses it: the vector vanishes on every
generator absorbed by w and is strictly positive on the generators that
live inside the face of w without being absorbed.  Values on the remaining
generators are unconstrained; they concern strata that the face of w never
meets.  On a validated presentation the witness is unique, because for any
two comparable-or-not idempotents strong connectedness supplies a generator
that one absorbs and the other prices strictly.

The maps afun_to_riesz / pairing / reconstruct tie the space back to the
cone: all-finite functions embed as positive vectors, the pairing of an
element with a positive vector reproduces function evaluation, and positive
vectors flatten back to cone elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .errors import PreconditionError, SolverFailure, VerificationError
from .afun import LscFn, gen_value
from .fg_cone import ConeElement, ConePresentation, canonicalize
from .linsolve import LinearSystem, solve
from .xreal import INF, ExtScalar, ext


@dataclass(frozen=True)
class RieszVector:
    """Rational values on every generator; keys are fixed by make_vector."""

    values: Tuple[Tuple[str, Fraction], ...]

    def value(self, x: str) -> Fraction:
        for k, v in self.values:
            if k == x:
                return v
        raise PreconditionError("unknown generator %r" % x)

    def value_dict(self) -> Dict[str, Fraction]:
        return dict(self.values)

    def _merge(self, other: "RieszVector", sign: int) -> "RieszVector":
        mine = self.value_dict()
        theirs = other.value_dict()
        if set(mine) != set(theirs):
            raise PreconditionError("vectors over different generator sets")
        return RieszVector(tuple(sorted((k, mine[k] + sign * theirs[k]) for k in mine)))

    def __add__(self, other: "RieszVector") -> "RieszVector":
        return self._merge(other, 1)

    def __sub__(self, other: "RieszVector") -> "RieszVector":
        return self._merge(other, -1)

    def __neg__(self) -> "RieszVector":
        return RieszVector(tuple((k, -v) for k, v in self.values))

    def scale(self, t) -> "RieszVector":
        t = Fraction(t)
        return RieszVector(tuple((k, t * v) for k, v in self.values))

    def __str__(self) -> str:
        return "<" + ", ".join("%s:%s" % (k, v) for k, v in self.values) + ">"


def make_vector(P: ConePresentation, values: Mapping[str, object]) -> RieszVector:
    if set(values) != set(P.generators):
        raise PreconditionError("vector must assign every generator exactly once")
    return RieszVector(tuple(sorted((x, Fraction(values[x])) for x in values)))


def zero_vector(P: ConePresentation) -> RieszVector:
    return make_vector(P, {x: 0 for x in P.generators})


def indicator_vector(P: ConePresentation, gens, t=1) -> RieszVector:
    gens = set(gens)
    return make_vector(P, {x: (Fraction(t) if x in gens else Fraction(0))
                           for x in P.generators})


class SupportSets(NamedTuple):
    """The three generator classes attached to an idempotent w."""

    outside: frozenset  # not absorbed by w
    positive: frozenset  # inside the face of w and not absorbed: priced strictly
    face: frozenset     # support idempotent below w


def support_sets(P: ConePresentation, w: str) -> SupportSets:
    outside = frozenset(x for x in P.generators if not P.is_below(x, w))
    face = frozenset(x for x in P.generators if P.lattice.leq(P.supp_idem[x], w))
    return SupportSets(outside, outside & face, face)


def positivity_support(P: ConePresentation, r: RieszVector) -> Optional[str]:
    """The unique idempotent witnessing positivity, or None if not positive."""
    vals = r.value_dict()
    hits = []
    for w in P.lattice.elements:
        sets = support_sets(P, w)
        if any(vals[x] != 0 for x in P.generators if x not in sets.outside):
            continue
        if any(vals[x] <= 0 for x in sets.positive):
            continue
        hits.append(w)
    if not hits:
        return None
    if len(hits) > 1:
        raise VerificationError(
            "positivity witness is not unique (%s); presentation is defective" % hits)
    return hits[0]


def is_positive(P: ConePresentation, r: RieszVector) -> bool:
    return positivity_support(P, r) is not None


def riesz_leq(P: ConePresentation, r: RieszVector, s: RieszVector) -> bool:
    return is_positive(P, s - r)


def pairing(P: ConePresentation, y: ConeElement, r: RieszVector) -> ExtScalar:
    """Evaluate a positive vector on a cone element.

    Finite exactly when the element's support sits inside the witness face;
    there the coordinates price out linearly.
    """
    w = positivity_support(P, r)
    if w is None:
        raise PreconditionError("pairing is defined on positive vectors only")
    if not P.lattice.leq(y.support, w):
        return INF
    vals = r.value_dict()
    return ext(sum((alpha * vals[x] for x, alpha in y.coeffs), Fraction(0)))


def reconstruct(P: ConePresentation, w: str,
                values: Mapping[str, object]) -> ConeElement:
    """Rebuild the element a functional names by its prices on the strict set.

    A functional with witness w is determined by its values on the strict
    positivity set of w; the element it stands for is the canonical form of
    those coordinates over w.  Missing keys count as zero.
    """
    strict = support_sets(P, w).positive
    coords = {}
    for x, raw in values.items():
        q = Fraction(raw)
        if q < 0:
            raise PreconditionError("price of %s must be nonnegative" % x)
        if x not in strict:
            raise PreconditionError(
                "%s is not in the strict positivity set of %s" % (x, w))
        coords[x] = q
    return canonicalize(P, w, coords)


def vector_element(P: ConePresentation, r: RieszVector) -> ConeElement:
    """Flatten a positive vector to the cone element its strict prices name."""
    w = positivity_support(P, r)
    if w is None:
        raise PreconditionError("vector_element is defined on positive vectors only")
    return reconstruct(P, w, {x: r.value(x) for x in support_sets(P, w).positive})


def afun_to_riesz(P: ConePresentation, f: LscFn) -> RieszVector:
    """Embed an all-finite function as the positive vector of its generator
    values (zero outside the face, where evaluation is infinite)."""
    if not f.is_affine:
        raise PreconditionError("only all-finite functions embed as vectors")
    values = {}
    for x in P.generators:
        if P.lattice.leq(P.supp_idem[x], f.support):
            values[x] = gen_value(P, f, x).finite
        else:
            values[x] = Fraction(0)
    return make_vector(P, values)


def separating_family(P: ConePresentation) -> List[RieszVector]:
    """Positive vectors that jointly separate cone elements under pairing.

    The face indicators distinguish supports through finite-versus-infinite
    pairings; the spiked indicators recover individual coordinates, with
    two spike heights to break ties between coordinate sums.
    """
    out = []
    for w in P.lattice.elements:
        out.append(indicator_vector(P, support_sets(P, w).positive))
    for x in P.generators:
        base = support_sets(P, P.supp_idem[x]).positive
        for t in (Fraction(1), Fraction(1, 2)):
            spike = indicator_vector(P, base, t)
            vals = spike.value_dict()
            vals[x] = vals[x] + 1
            out.append(RieszVector(tuple(sorted(vals.items()))))
    return out


def _difference_supports(P: ConePresentation, lower: Sequence[RieszVector],
                         upper: Sequence[RieszVector]) -> Dict[Tuple[int, int], str]:
    witnesses = {}
    for i, f in enumerate(lower):
        for j, g in enumerate(upper):
            w = positivity_support(P, g - f)
            if w is None:
                raise PreconditionError(
                    "interpolation needs every lower vector below every upper one")
            witnesses[(i, j)] = w
    return witnesses


def interpolate(P: ConePresentation, lower: Sequence[RieszVector],
                upper: Sequence[RieszVector]) -> RieszVector:
    """Find h with lower[i] <= h <= upper[j] for all i, j.

    Componentwise max / min / midpoint candidates settle most instances.
    Otherwise: in any solution, the witness supports w_i of h - lower[i]
    and u_j of upper[j] - h must satisfy meet(w_i, u_j) = witness support
    of upper[j] - lower[i], because positivity witnesses are unique and
    compose under meets.  Enumerating the finitely many support patterns
    and solving each linear system is therefore a complete search.
    """
    lower, upper = list(lower), list(upper)
    if len(lower) != 2 or len(upper) != 2:
        raise PreconditionError("interpolation works on two lower and two upper vectors")
    targets = _difference_supports(P, lower, upper)

    f_vals = [r.value_dict() for r in lower]
    g_vals = [r.value_dict() for r in upper]
    cmax = make_vector(P, {x: max(f_vals[0][x], f_vals[1][x]) for x in P.generators})
    cmin = make_vector(P, {x: min(g_vals[0][x], g_vals[1][x]) for x in P.generators})
    for cand in (cmax, cmin, (cmax + cmin).scale(Fraction(1, 2))):
        if all(is_positive(P, cand - f) for f in lower) and \
           all(is_positive(P, g - cand) for g in upper):
            return cand

    els = P.lattice.elements
    for w1, w2, u1, u2 in itertools.product(els, els, els, els):
        ws, us = (w1, w2), (u1, u2)
        if any(P.lattice.meet(ws[i], us[j]) != targets[(i, j)]
               for i in range(2) for j in range(2)):
            continue
        system = LinearSystem(list(P.generators))
        for vecs, sides, sign in ((lower, ws, 1), (upper, us, -1)):
            for vec, w in zip(vecs, sides):
                sets = support_sets(P, w)
                vals = vec.value_dict()
                for x in P.generators:
                    if x not in sets.outside:
                        system.add_eq({x: 1}, vals[x])
                    elif x in sets.positive:
                        if sign > 0:
                            system.add_gt({x: 1}, vals[x])
                        else:
                            system.add_lt({x: 1}, vals[x])
        witness = solve(system)
        if witness is None:
            continue
        h = make_vector(P, witness)
        if not all(is_positive(P, h - f) for f in lower) or \
           not all(is_positive(P, g - h) for g in upper):
            raise VerificationError("interpolant candidate fails a positivity check")
        return h
    raise SolverFailure("no support pattern admits an interpolant")
