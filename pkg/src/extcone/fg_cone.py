"""Finitely generated extended Choquet cones as finite presentations.

A presentation consists of

* a finite distributive lattice W of idempotents (the supports),
* a finite generator set X, one representative per extreme ray of the
  cancellative strata C_w = { y : support of y is w },
* tables recording each generator's support idempotent, which idempotents
  absorb it, and how x + v rewrites into canonical coordinates of C_v.

Every cone element then has a unique normal form

    y = sum of alpha_x * x (x in rays[w], alpha_x > 0 rational)  +  w

and all order/lattice/arithmetic questions reduce to exact rational
computations on these coordinates.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import LatticeError, PreconditionError, VerificationError


class Lattice:
    """A finite lattice given by its full order relation.

    The relation is stored as supplied; ``validate_presentation`` checks that
    it really is a distributive lattice.  Meets and joins are computed from
    the relation and cached.
    """

    def __init__(self, elements: Sequence[str], leq_pairs: Iterable[Tuple[str, str]]):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise PreconditionError("duplicate lattice elements")
        self._index = {w: i for i, w in enumerate(self.elements)}
        self._leq = frozenset((a, b) for a, b in leq_pairs)
        for a, b in self._leq:
            if a not in self._index or b not in self._index:
                raise PreconditionError("order pair (%s, %s) uses unknown element" % (a, b))
        self._meet_cache: Dict[Tuple[str, str], str] = {}
        self._join_cache: Dict[Tuple[str, str], str] = {}

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self._leq

    def _bound(self, a: str, b: str, lower: bool) -> str:
        cache = self._meet_cache if lower else self._join_cache
        key = (a, b)
        if key in cache:
            return cache[key]
        if lower:
            bounds = [c for c in self.elements if self.leq(c, a) and self.leq(c, b)]
            best = [c for c in bounds if all(self.leq(d, c) for d in bounds)]
        else:
            bounds = [c for c in self.elements if self.leq(a, c) and self.leq(b, c)]
            best = [c for c in bounds if all(self.leq(c, d) for d in bounds)]
        if len(best) != 1:
            kind = "meet" if lower else "join"
            raise LatticeError("%s(%s, %s) is not defined" % (kind, a, b))
        cache[key] = cache[(b, a)] = best[0]
        return best[0]

    def meet(self, a: str, b: str) -> str:
        return self._bound(a, b, lower=True)

    def join(self, a: str, b: str) -> str:
        return self._bound(a, b, lower=False)

    def meet_all(self, items: Iterable[str], default: Optional[str] = None) -> str:
        items = list(items)
        if not items:
            if default is None:
                raise PreconditionError("empty meet with no default")
            return default
        out = items[0]
        for w in items[1:]:
            out = self.meet(out, w)
        return out

    def join_all(self, items: Iterable[str], default: Optional[str] = None) -> str:
        items = list(items)
        if not items:
            if default is None:
                raise PreconditionError("empty join with no default")
            return default
        out = items[0]
        for w in items[1:]:
            out = self.join(out, w)
        return out

    @property
    def bottom(self) -> str:
        bots = [w for w in self.elements if all(self.leq(w, v) for v in self.elements)]
        if len(bots) != 1:
            raise LatticeError("lattice has no unique bottom")
        return bots[0]

    @property
    def top(self) -> str:
        tops = [w for w in self.elements if all(self.leq(v, w) for v in self.elements)]
        if len(tops) != 1:
            raise LatticeError("lattice has no unique top")
        return tops[0]


def transitive_closure(pairs: Iterable[Tuple[str, str]], elements: Sequence[str]) -> frozenset:
    """Reflexive-transitive closure helper for building lattices by covers."""
    rel = {(w, w) for w in elements}
    rel.update(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), list(rel)):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return frozenset(rel)


@dataclass(frozen=True)
class ConePresentation:
    """Tables presenting a finitely generated extended Choquet cone."""

    name: str
    lattice: Lattice
    generators: Tuple[str, ...]
    supp_idem: Mapping[str, str]
    below: frozenset  # pairs (x, w) with x <= w in the cone
    rays: Mapping[str, Tuple[str, ...]]
    red: Mapping[Tuple[str, str], Mapping[str, Fraction]]

    def is_below(self, x: str, w: str) -> bool:
        return (x, w) in self.below

    def reduction(self, x: str, v: str) -> Mapping[str, Fraction]:
        key = (x, v)
        if key not in self.red:
            raise PreconditionError(
                "reduction of %s into stratum %s is undefined (support not below)" % (x, v))
        return self.red[key]

    def check_generator(self, x: str) -> None:
        if x not in self.supp_idem:
            raise PreconditionError("unknown generator id %r" % x)


@dataclass(frozen=True, order=True)
class ConeElement:
    """Canonical form of a cone element: support idempotent plus ray coords."""

    support: str
    coeffs: Tuple[Tuple[str, Fraction], ...]

    def coeff_dict(self) -> Dict[str, Fraction]:
        return dict(self.coeffs)

    def coeff(self, x: str) -> Fraction:
        for k, v in self.coeffs:
            if k == x:
                return v
        return Fraction(0)

    @property
    def is_idempotent(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        body = ", ".join("%s:%s" % (k, v) for k, v in self.coeffs)
        return "(%s, {%s})" % (self.support, body)


def idem_element(P: ConePresentation, w: str) -> ConeElement:
    if w not in P.lattice._index:
        raise PreconditionError("unknown idempotent %r" % w)
    return ConeElement(w, ())


def zero_element(P: ConePresentation) -> ConeElement:
    return idem_element(P, P.lattice.bottom)


def generator_element(P: ConePresentation, x: str) -> ConeElement:
    """The generator x as a cone element (it is its own canonical form)."""
    P.check_generator(x)
    return ConeElement(P.supp_idem[x], ((x, Fraction(1)),))


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)


def validate_presentation(P: ConePresentation) -> ValidationReport:
    """Check every structural invariant of a presentation.

    Reports violations instead of throwing, so a caller can display all
    problems at once.  Checks: lattice laws including distributivity,
    generator-table coherence, ray conditions, reduction-table coherence
    (absorption transitivity), and the strong-connectedness witness
    condition that makes cancellation arguments valid downstream.
    """
    report = ValidationReport()
    L = P.lattice
    els = L.elements

    # Order axioms on the supplied relation.
    for a in els:
        if not L.leq(a, a):
            report.add("lattice: missing reflexive pair (%s, %s)" % (a, a))
    for a, b in itertools.product(els, els):
        if L.leq(a, b) and L.leq(b, a) and a != b:
            report.add("lattice: antisymmetry fails on (%s, %s)" % (a, b))
    for a, b, c in itertools.product(els, els, els):
        if L.leq(a, b) and L.leq(b, c) and not L.leq(a, c):
            report.add("lattice: transitivity fails on (%s, %s, %s)" % (a, b, c))
    if report.violations:
        return report  # meets/joins are meaningless on a non-poset

    try:
        bottom, top = L.bottom, L.top
    except LatticeError as exc:
        report.add("lattice: %s" % exc)
        return report

    for a, b in itertools.product(els, els):
        try:
            L.meet(a, b)
            L.join(a, b)
        except LatticeError as exc:
            report.add("lattice: %s" % exc)
    if report.violations:
        return report

    for a, b, c in itertools.product(els, els, els):
        if L.join(a, L.meet(b, c)) != L.meet(L.join(a, b), L.join(a, c)):
            report.add("lattice: distributivity fails on (%s, %s, %s)" % (a, b, c))

    # Generator tables.
    for x in P.generators:
        if x not in P.supp_idem:
            report.add("generators: %s has no support idempotent" % x)
            continue
        if P.supp_idem[x] not in L._index:
            report.add("generators: supp_idem(%s) is not a lattice element" % x)
            continue
        if not P.is_below(x, top):
            report.add("generators: %s must lie below the top idempotent" % x)
        if P.is_below(x, P.supp_idem[x]):
            report.add("generators: %s lies below its own support (it would be idempotent)" % x)
        for w in els:
            if P.is_below(x, w) and not L.leq(P.supp_idem[x], w):
                report.add("generators: below(%s, %s) contradicts supp_idem" % (x, w))
            for v in els:
                if P.is_below(x, w) and L.leq(w, v) and not P.is_below(x, v):
                    report.add("generators: below(%s, -) not upward closed at %s <= %s" % (x, w, v))

    for (x, w) in P.below:
        if x not in P.supp_idem or w not in L._index:
            report.add("below: pair (%s, %s) uses unknown ids" % (x, w))

    # Absorption is meet-closed: x <= w1 and x <= w2 force x <= w1 ^ w2,
    # because x + (w1 ^ w2) is a common lower bound of w1 and w2 above the
    # meet.  Function-space positivity depends on this.
    for x in P.generators:
        for w1, w2 in itertools.product(els, els):
            if P.is_below(x, w1) and P.is_below(x, w2) and not P.is_below(x, L.meet(w1, w2)):
                report.add("below: absorption of %s not meet-closed at (%s, %s)" % (x, w1, w2))

    # Ray conditions: rays[v] must be exactly the generators that live in
    # stratum v without being absorbed by it.
    for v in els:
        declared = tuple(P.rays.get(v, ()))
        computed = tuple(x for x in P.generators
                         if L.leq(P.supp_idem[x], v) and not P.is_below(x, v))
        if sorted(declared) != sorted(computed):
            report.add("rays: rays[%s] = %s but the tables give %s"
                       % (v, sorted(declared), sorted(computed)))

    # Reduction tables.
    for x in P.generators:
        for v in els:
            defined = (x, v) in P.red
            should = L.leq(P.supp_idem[x], v)
            if defined != should:
                report.add("red: entry (%s, %s) %s" %
                           (x, v, "should not exist" if defined else "is missing"))
                continue
            if not defined:
                continue
            table = P.red[(x, v)]
            if P.is_below(x, v) and table:
                report.add("red: %s is absorbed by %s but red is nonempty" % (x, v))
            if not P.is_below(x, v) and not table:
                report.add("red: %s is not absorbed by %s but red is empty" % (x, v))
            for x2, c in table.items():
                if x2 not in P.rays.get(v, ()):
                    report.add("red: red(%s, %s) hits %s outside rays[%s]" % (x, v, x2, v))
                if not isinstance(c, Fraction) or c <= 0:
                    report.add("red: red(%s, %s)[%s] must be a positive rational" % (x, v, x2))
            if x in P.rays.get(v, ()) and dict(table) != {x: Fraction(1)}:
                report.add("red: ray generator %s must reduce to itself in %s" % (x, v))

    if report.violations:
        return report

    # Coherence: reducing into v and then into v' >= v equals reducing
    # directly into v' (absorption transitivity).
    for x in P.generators:
        for v in els:
            if not L.leq(P.supp_idem[x], v):
                continue
            for v2 in els:
                if not L.leq(v, v2):
                    continue
                direct = dict(P.red[(x, v2)])
                staged: Dict[str, Fraction] = {}
                for mid, c in P.red[(x, v)].items():
                    for x2, d in P.red[(mid, v2)].items():
                        staged[x2] = staged.get(x2, Fraction(0)) + c * d
                staged = {k: c for k, c in staged.items() if c != 0}
                if staged != direct:
                    report.add("red: coherence fails for %s through %s into %s" % (x, v, v2))

    # Strong connectedness witness: whenever w1 does not dominate w2 there is
    # a generator in stratum w1, not absorbed by w1, that w2 absorbs.
    for w1, w2 in itertools.product(els, els):
        if L.leq(w2, w1):
            continue
        found = any(L.leq(P.supp_idem[x], w1) and not P.is_below(x, w1) and P.is_below(x, w2)
                    for x in P.generators)
        if not found:
            report.add("connectedness: no witness generator for pair (%s, %s)" % (w1, w2))

    return report


def canonicalize(P: ConePresentation, w: str, raw: Mapping[str, Fraction]) -> ConeElement:
    """Normal form of (sum of raw[x] * x) + w.

    Zero coefficients are dropped first (they never lift the support); the
    support then joins w with the supports of the remaining generators, and
    each generator rewrites through its reduction table into that stratum.
    """
    if w not in P.lattice._index:
        raise PreconditionError("unknown idempotent %r" % w)
    cleaned: Dict[str, Fraction] = {}
    for x, c in raw.items():
        P.check_generator(x)
        c = Fraction(c)
        if c < 0:
            raise PreconditionError("negative coefficient %s for %s" % (c, x))
        if c == 0:
            continue
        cleaned[x] = cleaned.get(x, Fraction(0)) + c
    support = P.lattice.join_all([P.supp_idem[x] for x in cleaned], default=w)
    support = P.lattice.join(support, w)
    combined: Dict[str, Fraction] = {}
    for x, c in cleaned.items():
        for x2, d in P.reduction(x, support).items():
            combined[x2] = combined.get(x2, Fraction(0)) + c * d
    coeffs = tuple(sorted((x, c) for x, c in combined.items() if c != 0))
    return ConeElement(support, coeffs)


def cone_add(P: ConePresentation, y: ConeElement, z: ConeElement) -> ConeElement:
    pooled: Dict[str, Fraction] = {}
    for x, c in itertools.chain(y.coeffs, z.coeffs):
        pooled[x] = pooled.get(x, Fraction(0)) + c
    return canonicalize(P, P.lattice.join(y.support, z.support), pooled)


def scalar_mul(P: ConePresentation, t, y: ConeElement) -> ConeElement:
    """t * y for t in (0, infinity].

    t = 0 is rejected (0 * y = 0 is not a scaling of y's normal form, and
    callers that want the zero element should say so).  t = infinity returns
    the least idempotent above y, computed lattice-theoretically as the meet
    of every idempotent dominating y.
    """
    from .xreal import ExtScalar, ext

    t = ext(t) if not isinstance(t, ExtScalar) else t
    if t.is_zero:
        raise PreconditionError("scalar_mul by 0 is rejected; use the zero element")
    if t.is_infinite:
        above = [v for v in P.lattice.elements if cone_leq(P, y, idem_element(P, v))]
        return idem_element(P, P.lattice.meet_all(above, default=P.lattice.top))
    c = t.finite
    return ConeElement(y.support, tuple((x, a * c) for x, a in y.coeffs))


def cone_leq(P: ConePresentation, y: ConeElement, z: ConeElement) -> bool:
    """Decide the algebraic order: y <= z iff y + u = z for some u.

    Rule: the support of y must sit below the support of z, and the
    coordinates of y pushed into z's stratum must be dominated componentwise
    by z's coordinates.  Both directions follow from the strata being
    cancellative simplicial cones.
    """
    if not P.lattice.leq(y.support, z.support):
        return False
    pushed = canonicalize(P, z.support, y.coeff_dict())
    zc = z.coeff_dict()
    return all(c <= zc.get(x, Fraction(0)) for x, c in pushed.coeffs)


def idem_ops(P: ConePresentation, u: str, v: str, kind: str) -> str:
    if kind == "meet":
        return P.lattice.meet(u, v)
    if kind == "join":
        return P.lattice.join(u, v)
    raise PreconditionError("unknown idempotent operation %r" % kind)


def sample_elements(P: ConePresentation, rng: random.Random, count: int) -> List[ConeElement]:
    """Seeded elements across all strata, in canonical form."""
    out = []
    for _ in range(count):
        w = rng.choice(P.lattice.elements)
        raw = {}
        for x in P.rays.get(w, ()):
            if rng.random() < 0.7:
                raw[x] = Fraction(rng.randrange(1, 17), 2 ** rng.randrange(0, 3))
        out.append(canonicalize(P, w, raw))
    return out


def element_lattice(P: ConePresentation, y: ConeElement, z: ConeElement, kind: str,
                    *, samples: int = 32, seed: int = 0) -> ConeElement:
    """Meet or join of two cone elements.  Experimental.

    The join lives in the stratum of join(support y, support z) and is the
    componentwise max of the pushed coordinates.  The meet lives in the
    stratum of the support meet; each coordinate is maximized subject to the
    linear domination constraints (the closed form below is the exact
    optimum because reduction coefficients are nonnegative).  Both results
    are verified against the inputs and a sampled witness set; failure
    raises VerificationError rather than returning a wrong answer.
    """
    if kind not in ("meet", "join"):
        raise PreconditionError("unknown element lattice operation %r" % kind)
    L = P.lattice
    rng = random.Random(seed)
    if kind == "join":
        w = L.join(y.support, z.support)
        yc = canonicalize(P, w, y.coeff_dict()).coeff_dict()
        zc = canonicalize(P, w, z.coeff_dict()).coeff_dict()
        coeffs = {x: max(yc.get(x, Fraction(0)), zc.get(x, Fraction(0)))
                  for x in set(yc) | set(zc)}
        result = canonicalize(P, w, coeffs)
        if not (cone_leq(P, y, result) and cone_leq(P, z, result)):
            raise VerificationError("join candidate does not dominate both inputs")
        for u in sample_elements(P, rng, samples):
            cand = cone_add(P, cone_add(P, y, z), u)
            for upper in (cand, cone_add(P, y, u), cone_add(P, z, u)):
                if cone_leq(P, y, upper) and cone_leq(P, z, upper):
                    if not cone_leq(P, result, upper):
                        raise VerificationError("join candidate is not least against a witness")
        return result

    v = L.meet(y.support, z.support)
    coeffs: Dict[str, Fraction] = {}
    for x in P.rays.get(v, ()):
        best: Optional[Fraction] = None
        for other in (y, z):
            table = P.reduction(x, other.support)
            oc = other.coeff_dict()
            for x2, d in table.items():
                bound = oc.get(x2, Fraction(0)) / d
                best = bound if best is None else min(best, bound)
        if best is None:
            # x would be absorbed by both supports, contradicting x not
            # being absorbed by their meet; validated presentations cannot
            # reach this.
            raise VerificationError("meet coordinate %s is unbounded" % x)
        if best > 0:
            coeffs[x] = best
    result = canonicalize(P, v, coeffs)
    if not (cone_leq(P, result, y) and cone_leq(P, result, z)):
        raise VerificationError("meet candidate is not a common lower bound")
    for u in sample_elements(P, rng, samples):
        if cone_leq(P, u, y) and cone_leq(P, u, z) and not cone_leq(P, u, result):
            raise VerificationError("meet candidate misses a sampled lower bound")
    return result


def element_meet(P: ConePresentation, y: ConeElement, z: ConeElement) -> ConeElement:
    return element_lattice(P, y, z, "meet")


def element_join(P: ConePresentation, y: ConeElement, z: ConeElement) -> ConeElement:
    return element_lattice(P, y, z, "join")


def support_idem_of(P: ConePresentation, y: ConeElement) -> str:
    """The support idempotent of an element in canonical form."""
    return y.support
