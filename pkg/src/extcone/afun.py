"""Linear lower semicontinuous functions on a presented cone.

A function in normal form is a pair (support idempotent v, values) where
values assigns an element of (0, infinity] to every ray of the stratum of v.
The function it denotes is

    f(y) = infinity                   if support(y) is not below v,
    f(y) = sum over coords of y of
           alpha_x * red(x, v) . values   otherwise,

so f is linear on the face { y : support(y) <= v } and infinite off it.
Values of 0 are excluded from normal forms on purpose: a linear lsc function
that vanishes on a ray must also vanish on the idempotent closing that ray,
which forces a larger support face.  The all-finite functions play the role
of the affine subspace; every function here is a pointwise increasing limit
of those (see approx_stage).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import PreconditionError, SolverFailure, VerificationError
from .fg_cone import ConeElement, ConePresentation, generator_element
from .linsolve import LinearSystem, solve
from .xreal import INF, ZERO, ExtScalar, ext


@dataclass(frozen=True)
class LscFn:
    """Normal form of a linear lsc function; build through make_fn."""

    support: str
    values: Tuple[Tuple[str, ExtScalar], ...]

    def value_dict(self) -> Dict[str, ExtScalar]:
        return dict(self.values)

    @property
    def is_affine(self) -> bool:
        return all(not v.is_infinite for _, v in self.values)

    def __str__(self) -> str:
        body = ", ".join("%s:%s" % (k, v) for k, v in self.values)
        return "[%s | %s]" % (self.support, body)


def make_fn(P: ConePresentation, support: str, values: Mapping[str, object]) -> LscFn:
    """Validate and freeze a normal form against the presentation."""
    if support not in P.lattice._index:
        raise PreconditionError("unknown support idempotent %r" % support)
    rays = set(P.rays.get(support, ()))
    if set(values) != rays:
        raise PreconditionError(
            "function on %s must assign exactly the rays %s, got %s"
            % (support, sorted(rays), sorted(values)))
    frozen = []
    for x, raw in values.items():
        v = ext(raw)
        if v.is_zero:
            raise PreconditionError(
                "value 0 on ray %s is not a normal form; enlarge the support" % x)
        frozen.append((x, v))
    return LscFn(support, tuple(sorted(frozen)))


def zero_fn(P: ConePresentation) -> LscFn:
    """The zero function: support is the top face, which has no rays."""
    return make_fn(P, P.lattice.top, {})


def face_indicator(P: ConePresentation, v: str) -> LscFn:
    """0 on the face of v, infinity elsewhere."""
    return make_fn(P, v, {x: INF for x in P.rays.get(v, ())})


def afun_eval(P: ConePresentation, f: LscFn, y: ConeElement) -> ExtScalar:
    if not P.lattice.leq(y.support, f.support):
        return INF
    vals = f.value_dict()
    total = ZERO
    for x, alpha in y.coeffs:
        inner = ZERO
        for x2, c in P.reduction(x, f.support).items():
            inner = inner + vals[x2] * c
        total = total + inner * alpha
    return total


def gen_value(P: ConePresentation, f: LscFn, x: str) -> ExtScalar:
    return afun_eval(P, f, generator_element(P, x))


def afun_add(P: ConePresentation, f: LscFn, g: LscFn) -> LscFn:
    """Pointwise sum; the finiteness faces intersect, so supports meet."""
    v = P.lattice.meet(f.support, g.support)
    values = {x: gen_value(P, f, x) + gen_value(P, g, x) for x in P.rays.get(v, ())}
    return make_fn(P, v, values)


def fn_scale(P: ConePresentation, t, f: LscFn) -> LscFn:
    t = ext(t)
    if t.is_zero:
        raise PreconditionError("fn_scale by 0 is rejected; use zero_fn")
    return make_fn(P, f.support, {x: v * t for x, v in f.values})


def infty_scale(P: ConePresentation, f: LscFn) -> LscFn:
    """infinity * f, the indicator of f's finiteness face."""
    return fn_scale(P, INF, f)


def lincomb(P: ConePresentation, terms: Iterable[Tuple[object, LscFn]]) -> LscFn:
    """Sum of t_i * f_i with t_i >= 0 rational; zero terms drop out."""
    total = zero_fn(P)
    for t, f in terms:
        t = ext(t)
        if t.is_zero:
            continue
        total = afun_add(P, total, fn_scale(P, t, f))
    return total


def _test_generators(P: ConePresentation, g: LscFn) -> List[str]:
    """Generators whose support lies inside g's finiteness face.

    The pointwise order of two functions is decided entirely there: off the
    face g is infinite, and on it both sides are linear in the coordinates.
    """
    return [x for x in P.generators if P.lattice.leq(P.supp_idem[x], g.support)]


def afun_leq(P: ConePresentation, f: LscFn, g: LscFn) -> bool:
    return all(gen_value(P, f, x) <= gen_value(P, g, x) for x in _test_generators(P, g))


def afun_way_below(P: ConePresentation, f: LscFn, g: LscFn) -> bool:
    """Sequential way-below relation, in closed form.

    f is way below g exactly when f eventually sits under every increasing
    sequence with supremum g; against the canonical sequence approx_stage
    this reduces to a strict gap (or joint vanishing) on each generator of
    g's finiteness face.
    """
    for x in _test_generators(P, g):
        fx, gx = gen_value(P, f, x), gen_value(P, g, x)
        if fx < gx:
            continue
        if fx.is_zero and gx.is_zero:
            continue
        return False
    return True


def afun_lhd(P: ConePresentation, f: LscFn, g: LscFn) -> bool:
    """The auxiliary relation on the affine part: way below, f all-finite."""
    if not f.is_affine:
        raise PreconditionError("lhd is defined for all-finite minorants only")
    return afun_way_below(P, f, g)


def afun_compare(P: ConePresentation, f: LscFn, g: LscFn, kind: str) -> bool:
    if kind == "leq":
        return afun_leq(P, f, g)
    if kind == "way_below":
        return afun_way_below(P, f, g)
    if kind == "lhd":
        return afun_lhd(P, f, g)
    raise PreconditionError("unknown comparison %r" % kind)


def approx_stage(P: ConePresentation, g: LscFn, n: int) -> LscFn:
    """Stage n of the canonical increasing sequence with supremum g.

    Truncate at 2^n and shrink by (1 - 2^-n); the stages are all-finite,
    increase with n, and converge to g pointwise.  Tests use this as the
    independent oracle for the way-below closed form.
    """
    if n < 0:
        raise PreconditionError("approximation stage must be nonnegative")
    cap = ext(Fraction(2) ** n)
    shrink = Fraction(2 ** n - 1, 2 ** n)
    values = {}
    for x, v in g.values:
        capped = cap if v.is_infinite or cap < v else v
        values[x] = capped * shrink
    if shrink == 0:
        return zero_fn(P)
    return make_fn(P, g.support, values)


def afun_subtract(P: ConePresentation, f: LscFn, g: LscFn) -> LscFn:
    """The complement h with f + h = g, for an all-finite f way below g.

    h lives on g's support with h = g - f there (infinity minus finite is
    infinity).  The result is verified by adding back.
    """
    if not afun_lhd(P, f, g):
        raise PreconditionError("subtract needs an all-finite f way below g")
    values = {}
    for x, gx in g.values:
        fx = gen_value(P, f, x)
        if gx.is_infinite:
            values[x] = INF
        else:
            values[x] = ext(gx.finite - fx.finite)
    h = make_fn(P, g.support, values)
    if afun_add(P, f, h) != g:
        raise VerificationError("subtraction complement fails to add back")
    return h


def afun_meet(P: ConePresentation, f: LscFn, g: LscFn) -> LscFn:
    """Greatest common minorant, inf{ f(y1) + g(y2) : y1 + y2 = y }.

    The infimum is linear again; on each ray of the joined support face a
    one-sided split attains it, giving pointwise minima of ray values as a
    closed form.  Verification is two-sided: the candidate must sit under
    both inputs, and it must dominate every member of a probe family of
    common minorants (the analogous pointwise-minimum normal form at each
    coarser support, kept only when it really is a common minorant).
    """
    def min_form(w: str) -> LscFn:
        values = {}
        for x in P.rays.get(w, ()):
            fx, gx = gen_value(P, f, x), gen_value(P, g, x)
            values[x] = fx if fx <= gx else gx
        return make_fn(P, w, values)

    w0 = P.lattice.join(f.support, g.support)
    m = min_form(w0)
    if not (afun_leq(P, m, f) and afun_leq(P, m, g)):
        raise VerificationError("meet candidate is not a common minorant")
    for w in P.lattice.elements:
        if not P.lattice.leq(w0, w):
            continue
        probe = min_form(w)
        if afun_leq(P, probe, f) and afun_leq(P, probe, g) and not afun_leq(P, probe, m):
            raise VerificationError("a common minorant at support %s beats the meet" % w)
    return m


def _decompose_pair(P: ConePresentation, f: LscFn, b1: LscFn, b2: LscFn
                    ) -> Optional[Tuple[LscFn, LscFn]]:
    """One feasible split f = f1 + f2 with f1, f2 all-finite and strictly
    below b1, b2 in the way-below sense, or None."""
    L = P.lattice
    for v1 in L.elements:
        if not L.leq(b1.support, v1):
            continue
        for v2 in L.elements:
            if not L.leq(b2.support, v2):
                continue
            if L.meet(v1, v2) != f.support:
                continue
            parts = (("a", v1, b1), ("b", v2, b2))
            variables = ["%s:%s" % (tag, x) for tag, v, _ in parts for x in P.rays.get(v, ())]
            system = LinearSystem(variables)
            feasible = True
            for tag, v, bound in parts:
                for x in P.rays.get(v, ()):
                    system.add_gt({"%s:%s" % (tag, x): 1}, 0)
                for x in _test_generators(P, bound):
                    expr = {"%s:%s" % (tag, x2): c for x2, c in P.reduction(x, v).items()}
                    c = gen_value(P, bound, x)
                    if c.is_infinite:
                        continue
                    if c.is_zero:
                        if expr:
                            feasible = False
                            break
                        continue
                    system.add_lt(expr, c.finite)
                if not feasible:
                    break
            if not feasible:
                continue
            for x in P.rays.get(f.support, ()):
                expr: Dict[str, Fraction] = {}
                for tag, v, _ in parts:
                    for x2, c in P.reduction(x, v).items():
                        key = "%s:%s" % (tag, x2)
                        expr[key] = expr.get(key, Fraction(0)) + c
                system.add_eq(expr, gen_value(P, f, x).finite)
            witness = solve(system)
            if witness is None:
                continue
            f1 = make_fn(P, v1, {x: witness["a:%s" % x] for x in P.rays.get(v1, ())})
            f2 = make_fn(P, v2, {x: witness["b:%s" % x] for x in P.rays.get(v2, ())})
            if afun_add(P, f1, f2) != f:
                raise VerificationError("decomposition parts fail to add back")
            if not (afun_lhd(P, f1, b1) and afun_lhd(P, f2, b2)):
                raise VerificationError("decomposition part escapes its bound")
            return f1, f2
    return None


def riesz_split(P: ConePresentation, f: LscFn, bounds: Sequence[LscFn]) -> List[LscFn]:
    """Split an all-finite f with f strictly below sum(bounds) into parts
    f = sum f_i, each all-finite and strictly below bounds[i].

    This is the refinement form of the interpolation property of the
    function cone; on a validated presentation a split always exists, so a
    fruitless search is an invariant breach, not a normal outcome.  The
    split is greedy: each bound absorbs the whole remainder as soon as the
    strict order allows it, so trailing parts are usually zero.  Zero parts
    are legitimate (the zero function sits strictly below everything) and
    keep downstream consumers small.
    """
    if not f.is_affine:
        raise PreconditionError("riesz_split needs an all-finite function")
    bounds = list(bounds)
    total = zero_fn(P)
    for b in bounds:
        total = afun_add(P, total, b)
    if not afun_lhd(P, f, total):
        raise PreconditionError("riesz_split needs f strictly below the bound sum")
    if not bounds:
        return []
    zero = zero_fn(P)
    suffix = [zero] * (len(bounds) + 1)
    for k in range(len(bounds) - 1, -1, -1):
        suffix[k] = afun_add(P, bounds[k], suffix[k + 1])
    parts: List[LscFn] = []
    remaining = f
    for k, b in enumerate(bounds):
        if remaining == zero:
            parts.append(zero)
            continue
        if afun_lhd(P, remaining, b):
            parts.append(remaining)
            remaining = zero
            continue
        if k == len(bounds) - 1:
            raise SolverFailure("remainder escapes the final bound")
        pair = _decompose_pair(P, remaining, b, suffix[k + 1])
        if pair is None:
            raise SolverFailure("no support assignment admits a strict decomposition")
        head, remaining = pair
        parts.append(head)
    return parts


def riesz_decompose(P: ConePresentation, f: LscFn, g1: LscFn, g2: LscFn
                    ) -> Tuple[LscFn, LscFn]:
    """Split an all-finite f strictly below g1 + g2 into f = f1 + f2 with
    f1 strictly below g1 and f2 strictly below g2."""
    parts = riesz_split(P, f, [g1, g2])
    return parts[0], parts[1]
