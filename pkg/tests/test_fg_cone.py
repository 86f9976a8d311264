"""Presented cones: validation, canonical forms, and element arithmetic.

Random cases are checked against the hand-computed models in
fixture_oracles; pinned cases carry their expected values inline.
"""

import random
from fractions import Fraction

import pytest

from extcone.errors import LatticeError, PreconditionError
from extcone.fg_cone import (ConePresentation, Lattice, canonicalize, cone_add,
                             cone_leq, element_join, element_meet,
                             generator_element, idem_element, idem_ops,
                             sample_elements, scalar_mul, transitive_closure,
                             zero_element)
from extcone.fixtures import all_fixtures, quarter_plane, trivial_cone
from extcone.xreal import INF, ext

from fixture_oracles import MODELS

FIXTURES = all_fixtures()
E1 = FIXTURES["half_line"]
E2 = FIXTURES["quarter_plane"]
EL = FIXTURES["lex_cone"]


def elem(P, w, raw):
    return canonicalize(P, w, {k: Fraction(v) for k, v in raw.items()})


def as_data(el):
    return (el.support, el.coeff_dict())


def rand_raw(P, rng):
    w = rng.choice(P.lattice.elements)
    raw = {}
    for x in P.generators:
        if rng.random() < 0.6:
            raw[x] = Fraction(rng.randrange(0, 9), 2 ** rng.randrange(0, 3))
    return w, raw


def model_of_raw(name, P, w, raw):
    """Push raw data through the model by summing scaled generators."""
    model = MODELS[name]
    total = model["of_element"](idem_element(P, w))
    for x, c in raw.items():
        if c == 0:
            continue
        gen = model["of_element"](generator_element(P, x))
        total = model["add"](total, model["scale"](Fraction(c), gen))
    return total


class TestLattice:
    def test_meet_join_examples(self):
        assert E2.lattice.meet("p1", "p2") == "bot"
        assert E2.lattice.join("p1", "p2") == "top"
        assert EL.lattice.join("bot", "w") == "w"
        assert idem_ops(E2, "p1", "p2", "meet") == "bot"
        assert idem_ops(E2, "p1", "p2", "join") == "top"

    def test_bottom_and_top(self):
        for P in FIXTURES.values():
            assert P.lattice.leq(P.lattice.bottom, P.lattice.top)
            for w in P.lattice.elements:
                assert P.lattice.leq(P.lattice.bottom, w)
                assert P.lattice.leq(w, P.lattice.top)

    def test_transitive_closure(self):
        els = ("a", "b", "c")
        closed = transitive_closure([("a", "b"), ("b", "c")], els)
        assert ("a", "c") in closed
        assert all((w, w) in closed for w in els)

    def test_undefined_bounds_raise(self):
        antichain = Lattice(("a", "b"), transitive_closure([], ("a", "b")))
        with pytest.raises(LatticeError):
            antichain.meet("a", "b")
        with pytest.raises(LatticeError):
            antichain.top

    def test_unknown_order_pair_rejected(self):
        with pytest.raises(PreconditionError):
            Lattice(("a",), [("a", "zz")])

    def test_join_of_idempotents_is_their_sum(self):
        for P in FIXTURES.values():
            for u in P.lattice.elements:
                for v in P.lattice.elements:
                    summed = cone_add(P, idem_element(P, u), idem_element(P, v))
                    assert summed == idem_element(P, P.lattice.join(u, v))


class TestValidation:
    def test_fixtures_are_valid(self):
        for P in list(FIXTURES.values()) + [trivial_cone()]:
            from extcone.fg_cone import validate_presentation
            assert validate_presentation(P).violations == []

    def test_missing_transitive_edge_is_reported(self):
        from extcone.fg_cone import validate_presentation
        base = quarter_plane()
        els = base.lattice.elements
        pairs = set(transitive_closure(
            [("bot", "p1"), ("bot", "p2"), ("p1", "top"), ("p2", "top")], els))
        pairs.discard(("bot", "top"))
        broken = ConePresentation(
            name="broken", lattice=Lattice(els, pairs),
            generators=base.generators, supp_idem=base.supp_idem,
            below=base.below, rays=base.rays, red=base.red)
        report = validate_presentation(broken)
        assert any(v.startswith("lattice:") for v in report.violations)

    def test_deleted_generator_breaks_connectedness(self):
        from extcone.fg_cone import validate_presentation
        base = FIXTURES["lex_cone"]
        one = Fraction(1)
        broken = ConePresentation(
            name="broken", lattice=base.lattice,
            generators=("x1",), supp_idem={"x1": "bot"},
            below=frozenset({("x1", "w"), ("x1", "top")}),
            rays={"bot": ("x1",), "w": (), "top": ()},
            red={("x1", "bot"): {"x1": one}, ("x1", "w"): {}, ("x1", "top"): {}})
        report = validate_presentation(broken)
        assert report.violations == [
            "connectedness: no witness generator for pair (w, top)"]


class TestCanonicalize:
    def test_pinned_examples(self):
        assert as_data(elem(EL, "bot", {"x1": 2, "x2": 3})) \
            == ("w", {"x2": Fraction(3)})
        assert as_data(elem(E2, "bot", {"e1": 0})) == ("bot", {})
        assert as_data(elem(E2, "p1", {"e1": 5})) == ("p1", {})

    def test_fixed_point(self):
        rng = random.Random(2)
        for name, P in sorted(FIXTURES.items()):
            for _ in range(60):
                w, raw = rand_raw(P, rng)
                y = canonicalize(P, w, raw)
                assert canonicalize(P, y.support, y.coeff_dict()) == y

    def test_matches_models(self):
        rng = random.Random(3)
        for name, P in sorted(FIXTURES.items()):
            for _ in range(120):
                w, raw = rand_raw(P, rng)
                y = canonicalize(P, w, raw)
                model_val = model_of_raw(name, P, w, raw)
                assert as_data(y) == MODELS[name]["canonical"](model_val)

    def test_bad_inputs(self):
        with pytest.raises(PreconditionError):
            canonicalize(E2, "bot", {"nope": Fraction(1)})
        with pytest.raises(PreconditionError):
            canonicalize(E2, "nope", {})
        with pytest.raises(PreconditionError):
            canonicalize(E2, "bot", {"e1": Fraction(-1)})


class TestAddition:
    def test_pinned_examples(self):
        assert as_data(cone_add(E2, elem(E2, "bot", {"e1": 1}),
                                elem(E2, "bot", {"e2": 2}))) \
            == ("bot", {"e1": Fraction(1), "e2": Fraction(2)})
        assert cone_add(EL, elem(EL, "bot", {"x1": 1}), elem(EL, "w", {"x2": 1})) \
            == elem(EL, "w", {"x2": 1})

    def test_unit_law(self):
        rng = random.Random(4)
        for P in FIXTURES.values():
            for y in sample_elements(P, rng, 20):
                assert cone_add(P, y, zero_element(P)) == y

    def test_matches_models(self):
        rng = random.Random(5)
        for name, P in sorted(FIXTURES.items()):
            model = MODELS[name]
            for _ in range(120):
                y = canonicalize(P, *rand_raw(P, rng))
                z = canonicalize(P, *rand_raw(P, rng))
                got = cone_add(P, y, z)
                want = model["add"](model["of_element"](y), model["of_element"](z))
                assert as_data(got) == model["canonical"](want)


class TestScalarMul:
    def test_pinned_examples(self):
        assert scalar_mul(E2, INF, elem(E2, "bot", {"e1": 1})) \
            == idem_element(E2, "p1")
        assert scalar_mul(EL, ext(3), elem(EL, "bot", {"x1": 2})) \
            == elem(EL, "bot", {"x1": 6})
        assert scalar_mul(EL, INF, elem(EL, "w", {"x2": 1})) \
            == idem_element(EL, "top")

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            scalar_mul(E2, ext(0), elem(E2, "bot", {"e1": 1}))

    def test_matches_models(self):
        rng = random.Random(6)
        for name, P in sorted(FIXTURES.items()):
            model = MODELS[name]
            for _ in range(80):
                y = canonicalize(P, *rand_raw(P, rng))
                t = rng.choice([Fraction(1, 2), Fraction(3), Fraction(7, 4), None])
                got = scalar_mul(P, INF if t is None else ext(t), y)
                want = model["scale"](t, model["of_element"](y))
                assert as_data(got) == model["canonical"](want)

    def test_infinity_action_is_least_idempotent_above(self):
        rng = random.Random(7)
        for P in FIXTURES.values():
            for y in sample_elements(P, rng, 30):
                v = scalar_mul(P, INF, y)
                assert v.is_idempotent
                assert cone_leq(P, y, v)
                for u in P.lattice.elements:
                    if cone_leq(P, y, idem_element(P, u)):
                        assert P.lattice.leq(v.support, u)


class TestOrder:
    def test_pinned_examples(self):
        assert cone_leq(E2, elem(E2, "bot", {"e1": 1}), elem(E2, "p1", {"e2": 2}))
        assert cone_leq(EL, elem(EL, "bot", {"x1": 2}), elem(EL, "w", {"x2": 3}))
        assert not cone_leq(E2, elem(E2, "bot", {"e2": 1}), idem_element(E2, "p1"))

    def test_matches_models(self):
        rng = random.Random(8)
        for name, P in sorted(FIXTURES.items()):
            model = MODELS[name]
            for _ in range(150):
                y = canonicalize(P, *rand_raw(P, rng))
                z = canonicalize(P, *rand_raw(P, rng))
                assert cone_leq(P, y, z) == model["leq"](
                    model["of_element"](y), model["of_element"](z))

    def test_partial_order_laws(self):
        rng = random.Random(9)
        for P in FIXTURES.values():
            els = sample_elements(P, rng, 25)
            for y in els:
                assert cone_leq(P, y, y)
            for y in els:
                for z in els:
                    if cone_leq(P, y, z) and cone_leq(P, z, y):
                        assert y == z


class TestElementLattice:
    def test_pinned_meets(self):
        assert element_meet(E2, elem(E2, "bot", {"e1": 1}), elem(E2, "bot", {"e1": 2})) \
            == elem(E2, "bot", {"e1": 1})
        assert element_meet(E2, elem(E2, "bot", {"e1": 1, "e2": 1}),
                            elem(E2, "bot", {"e1": 2})) \
            == elem(E2, "bot", {"e1": 1})
        assert element_meet(EL, elem(EL, "w", {"x2": 1}), elem(EL, "bot", {"x1": 1})) \
            == elem(EL, "bot", {"x1": 1})

    def test_meet_and_join_bound_their_inputs(self):
        rng = random.Random(10)
        for P in FIXTURES.values():
            els = sample_elements(P, rng, 14)
            for y in els[:7]:
                for z in els[7:]:
                    m = element_meet(P, y, z)
                    j = element_join(P, y, z)
                    assert cone_leq(P, m, y) and cone_leq(P, m, z)
                    assert cone_leq(P, y, j) and cone_leq(P, z, j)


class TestDegenerate:
    def test_trivial_cone(self):
        T = trivial_cone()
        z = zero_element(T)
        assert z == idem_element(T, "o")
        assert cone_add(T, z, z) == z
        assert cone_leq(T, z, z)

    def test_sampler_is_deterministic(self):
        for P in FIXTURES.values():
            a = sample_elements(P, random.Random(11), 10)
            b = sample_elements(P, random.Random(11), 10)
            assert a == b
