"""Bundled example cones and diagrams, with deterministic samplers.

Each presentation below is derived from a concrete model whose arithmetic
can be checked by hand; the derivations sit next to the tables so tests can
cite them.  All samplers take an explicit random.Random so runs reproduce.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List

from .afun import LscFn, make_fn
from .fg_cone import ConePresentation, Lattice, transitive_closure
from .limits import BratteliDiagram
from .riesz_space import RieszVector, make_vector, support_sets
from .xreal import INF


def half_line() -> ConePresentation:
    """The cone [0, infinity] itself.

    Model: elements are t in [0, infinity].  Idempotents are 0 (bot) and
    infinity (top); the single generator e is t = 1, absorbed only by top
    (t + infinity = infinity).  Every finite positive t is a multiple of e,
    so R_bot = (e,) and R_top is empty.
    """
    els = ("bot", "top")
    lat = Lattice(els, transitive_closure([("bot", "top")], els))
    return ConePresentation(
        name="half_line",
        lattice=lat,
        generators=("e",),
        supp_idem={"e": "bot"},
        below=frozenset({("e", "top")}),
        rays={"bot": ("e",), "top": ()},
        red={("e", "bot"): {"e": Fraction(1)}, ("e", "top"): {}},
    )


def quarter_plane() -> ConePresentation:
    """The cone [0, infinity]^2 with coordinatewise operations.

    Model: idempotents are the four {0, infinity}-valued vectors; p1 is
    (inf, 0) and p2 is (0, inf).  Generators e1 = (1, 0) and e2 = (0, 1).
    Adding p1 wipes the first coordinate, so e1 is absorbed by p1 and top,
    and reduces unchanged into the strata that keep coordinate one.
    """
    els = ("bot", "p1", "p2", "top")
    lat = Lattice(els, transitive_closure(
        [("bot", "p1"), ("bot", "p2"), ("p1", "top"), ("p2", "top")], els))
    one = Fraction(1)
    return ConePresentation(
        name="quarter_plane",
        lattice=lat,
        generators=("e1", "e2"),
        supp_idem={"e1": "bot", "e2": "bot"},
        below=frozenset({("e1", "p1"), ("e1", "top"), ("e2", "p2"), ("e2", "top")}),
        rays={"bot": ("e1", "e2"), "p1": ("e2",), "p2": ("e1",), "top": ()},
        red={
            ("e1", "bot"): {"e1": one}, ("e1", "p1"): {}, ("e1", "p2"): {"e1": one},
            ("e1", "top"): {},
            ("e2", "bot"): {"e2": one}, ("e2", "p1"): {"e2": one}, ("e2", "p2"): {},
            ("e2", "top"): {},
        },
    )


def lex_cone() -> ConePresentation:
    """Monotone additive maps from lexicographically ordered Z^2 to [0, inf].

    Model: such a map is either lambda_t(a, b) = t * a (t in [0, inf)), or
    mu_s(a, b) = infinity * a + s * b (s in [0, inf]).  Pointwise addition
    gives lambda_t + lambda_u = lambda_{t+u}, lambda_t + mu_s = mu_s, and
    mu_s + mu_u = mu_{s+u}.  Idempotents: lambda_0 (bot), mu_0 (w),
    mu_inf (top), a three-chain.  Generators x1 = lambda_1 and x2 = mu_1;
    x1 is absorbed by w since lambda_1 + mu_0 = mu_0.
    """
    els = ("bot", "w", "top")
    lat = Lattice(els, transitive_closure([("bot", "w"), ("w", "top")], els))
    one = Fraction(1)
    return ConePresentation(
        name="lex_cone",
        lattice=lat,
        generators=("x1", "x2"),
        supp_idem={"x1": "bot", "x2": "w"},
        below=frozenset({("x1", "w"), ("x1", "top"), ("x2", "top")}),
        rays={"bot": ("x1",), "w": ("x2",), "top": ()},
        red={
            ("x1", "bot"): {"x1": one}, ("x1", "w"): {}, ("x1", "top"): {},
            ("x2", "w"): {"x2": one}, ("x2", "top"): {},
        },
    )


def trivial_cone() -> ConePresentation:
    """The one-point cone: a single idempotent, no generators."""
    lat = Lattice(("o",), transitive_closure([], ("o",)))
    return ConePresentation(name="trivial", lattice=lat, generators=(),
                            supp_idem={}, below=frozenset(), rays={"o": ()}, red={})


def all_fixtures() -> Dict[str, ConePresentation]:
    return {p.name: p for p in (half_line(), quarter_plane(), lex_cone())}


def car_diagram(depth: int) -> BratteliDiagram:
    """One vertex per level, two edges between consecutive levels."""
    return BratteliDiagram(tuple([1] * (depth + 1)),
                           tuple(((2,),) for _ in range(depth)))


def two_component_diagram(depth: int) -> BratteliDiagram:
    """Two vertices per level joined by identity matrices; stays split."""
    return BratteliDiagram(tuple([2] * (depth + 1)),
                           tuple(((1, 0), (0, 1)) for _ in range(depth)))


def rand_fraction(rng: random.Random, *, top: int = 8, dyadic: int = 2) -> Fraction:
    return Fraction(rng.randrange(1, top + 1), 2 ** rng.randrange(0, dyadic + 1))


def rand_afun(P: ConePresentation, rng: random.Random, *,
              allow_infinite: bool = True) -> LscFn:
    """A random normal-form function; support uniform over idempotents."""
    w = rng.choice(P.lattice.elements)
    values = {}
    for x in P.rays.get(w, ()):
        if allow_infinite and rng.random() < 0.2:
            values[x] = INF
        else:
            values[x] = rand_fraction(rng)
    return make_fn(P, w, values)


def rand_affine(P: ConePresentation, rng: random.Random) -> LscFn:
    return rand_afun(P, rng, allow_infinite=False)


def rand_positive_vector(P: ConePresentation, rng: random.Random) -> RieszVector:
    """A random vector that is positive with a uniformly chosen witness."""
    w = rng.choice(P.lattice.elements)
    sets = support_sets(P, w)
    values: Dict[str, Fraction] = {}
    for x in P.generators:
        if x not in sets.outside:
            values[x] = Fraction(0)
        elif x in sets.positive:
            values[x] = rand_fraction(rng)
        else:
            values[x] = rand_fraction(rng) * rng.choice((-1, 1))
    return make_vector(P, values)


def rand_riesz_vector(P: ConePresentation, rng: random.Random) -> RieszVector:
    """A random vector of either sign, not necessarily positive."""
    return make_vector(P, {x: Fraction(rng.randrange(-8, 9), 2 ** rng.randrange(0, 2))
                           for x in P.generators})


def rand_element_pairs(P: ConePresentation, rng: random.Random,
                       count: int) -> List:
    from .fg_cone import sample_elements

    flat = sample_elements(P, rng, 2 * count)
    return list(zip(flat[::2], flat[1::2]))
