"""The ordered vector space of a presented cone and its pairing."""

import itertools
import random
from fractions import Fraction

import pytest

from extcone.afun import afun_eval, make_fn
from extcone.errors import PreconditionError
from extcone.fg_cone import canonicalize, idem_element, sample_elements, zero_element
from extcone.fixtures import (all_fixtures, rand_positive_vector,
                              rand_riesz_vector)
from extcone.riesz_space import (afun_to_riesz, indicator_vector, interpolate,
                                 is_positive, make_vector, pairing,
                                 positivity_support, reconstruct, riesz_leq,
                                 separating_family, support_sets,
                                 vector_element, zero_vector)
from extcone.xreal import INF, ext

FIXTURES = all_fixtures()
E1 = FIXTURES["half_line"]
E2 = FIXTURES["quarter_plane"]
EL = FIXTURES["lex_cone"]


def elem(P, w, raw):
    return canonicalize(P, w, {k: Fraction(v) for k, v in raw.items()})


class TestSupportSets:
    def test_pinned_examples(self):
        s = support_sets(E2, "p1")
        assert s.outside == {"e2"} and s.positive == {"e2"}
        s = support_sets(EL, "w")
        assert s.outside == {"x2"} and s.positive == {"x2"}
        for P in FIXTURES.values():
            s = support_sets(P, P.lattice.top)
            assert s.outside == frozenset() and s.positive == frozenset()

    def test_lemma_identities_exhaustive(self):
        for P in FIXTURES.values():
            L = P.lattice
            for w1, w2 in itertools.product(L.elements, L.elements):
                o1, o2 = support_sets(P, w1), support_sets(P, w2)
                assert o1.outside | o2.outside \
                    == support_sets(P, L.meet(w1, w2)).outside
                assert o1.outside & o2.outside \
                    == support_sets(P, L.join(w1, w2)).outside
                assert (o1.outside <= o2.outside) == L.leq(w2, w1)
                tilde1 = o1.positive | (set(P.generators) - o1.outside)
                tilde2 = o2.positive | (set(P.generators) - o2.outside)
                meet_sets = support_sets(P, L.meet(w1, w2))
                tilde_meet = meet_sets.positive | (set(P.generators)
                                                   - meet_sets.outside)
                assert tilde_meet == tilde1 & tilde2
                if not L.leq(w2, w1):
                    assert o1.positive - o2.outside


class TestPositivity:
    def test_pinned_examples(self):
        assert positivity_support(EL, make_vector(EL, {"x1": 1, "x2": 0})) == "bot"
        assert positivity_support(EL, zero_vector(EL)) == EL.lattice.top
        assert positivity_support(EL, make_vector(EL, {"x1": -1, "x2": 1})) is None

    def test_cone_laws(self):
        rng = random.Random(40)
        for P in FIXTURES.values():
            for _ in range(60):
                r = rand_positive_vector(P, rng)
                s = rand_positive_vector(P, rng)
                assert is_positive(P, r + s)
                assert is_positive(P, r.scale(Fraction(7, 3)))
                if any(v != 0 for _, v in r.values):
                    assert not is_positive(P, -r)

    def test_support_law_for_sums(self):
        rng = random.Random(41)
        for P in FIXTURES.values():
            for _ in range(80):
                r = rand_positive_vector(P, rng)
                s = rand_positive_vector(P, rng)
                wr, ws = positivity_support(P, r), positivity_support(P, s)
                assert positivity_support(P, r + s) == P.lattice.meet(wr, ws)

    def test_make_vector_requires_every_generator(self):
        with pytest.raises(PreconditionError):
            make_vector(E2, {"e1": 1})
        with pytest.raises(PreconditionError):
            make_vector(E2, {"e1": 1, "e2": 1, "zz": 0})


class TestPairing:
    def test_pinned_examples(self):
        assert pairing(EL, elem(EL, "w", {"x2": 3}), indicator_vector(EL, ["x2"])) \
            == ext(3)
        f = make_vector(E2, {"e1": 1, "e2": 0})
        assert positivity_support(E2, f) == "p2"
        assert pairing(E2, idem_element(E2, "top"), f) == INF
        assert pairing(E2, zero_element(E2), f) == ext(0)

    def test_requires_positive_vector(self):
        with pytest.raises(PreconditionError):
            pairing(EL, zero_element(EL), make_vector(EL, {"x1": -1, "x2": 1}))

    def test_bilinear_in_the_element(self):
        rng = random.Random(42)
        from extcone.fg_cone import cone_add
        for P in FIXTURES.values():
            for _ in range(60):
                r = rand_positive_vector(P, rng)
                y, z = sample_elements(P, rng, 2)
                assert pairing(P, cone_add(P, y, z), r) \
                    == pairing(P, y, r) + pairing(P, z, r)

    def test_additive_in_the_vector(self):
        rng = random.Random(43)
        for P in FIXTURES.values():
            for _ in range(60):
                r = rand_positive_vector(P, rng)
                s = rand_positive_vector(P, rng)
                y = sample_elements(P, rng, 1)[0]
                assert pairing(P, y, r + s) == pairing(P, y, r) + pairing(P, y, s)

    def test_duality_with_function_evaluation(self):
        rng = random.Random(44)
        from extcone.fixtures import rand_affine
        for P in FIXTURES.values():
            for _ in range(60):
                f = rand_affine(P, rng)
                r = afun_to_riesz(P, f)
                assert positivity_support(P, r) == f.support
                for y in sample_elements(P, rng, 3):
                    assert pairing(P, y, r) == afun_eval(P, f, y)


class TestReconstruct:
    def test_pinned_examples(self):
        assert reconstruct(EL, "w", {"x2": 5}) == elem(EL, "w", {"x2": 5})
        assert reconstruct(E2, "bot", {"e1": 0, "e2": 0}) == zero_element(E2)
        assert reconstruct(E2, "bot", {"e1": 1, "e2": 2}) \
            == elem(E2, "bot", {"e1": 1, "e2": 2})

    def test_rejects_bad_tables(self):
        with pytest.raises(PreconditionError):
            reconstruct(E2, "bot", {"e1": -1})
        with pytest.raises(PreconditionError):
            reconstruct(E2, "p1", {"e1": 1})  # e1 is absorbed by p1

    def test_pairing_reads_the_table_back(self):
        rng = random.Random(45)
        for P in FIXTURES.values():
            for _ in range(60):
                w = rng.choice(P.lattice.elements)
                table = {x: Fraction(rng.randrange(0, 9), 2)
                         for x in support_sets(P, w).positive}
                y = reconstruct(P, w, table)
                for x in P.rays.get(w, ()):
                    probe = indicator_vector(P, [x])
                    if positivity_support(P, probe) is None:
                        continue
                    assert pairing(P, y, probe) == ext(table.get(x, Fraction(0)))

    def test_vector_element_round_trip(self):
        rng = random.Random(46)
        for P in FIXTURES.values():
            for _ in range(60):
                r = rand_positive_vector(P, rng)
                y = vector_element(P, r)
                w = positivity_support(P, r)
                assert y == reconstruct(
                    P, w, {x: r.value(x) for x in support_sets(P, w).positive})


class TestInterpolation:
    def test_forced_equality(self):
        f = make_vector(E2, {"e1": 1, "e2": 1})
        h = interpolate(E2, [f, f], [f, f])
        assert h.value_dict() == f.value_dict()

    def test_pinned_quadruple(self):
        f1 = make_vector(E2, {"e1": 1, "e2": 1})
        f2 = make_vector(E2, {"e1": 0, "e2": 2})
        g1 = make_vector(E2, {"e1": 2, "e2": 3})
        g2 = make_vector(E2, {"e1": 3, "e2": 2})
        h = interpolate(E2, [f1, f2], [g1, g2])
        for f in (f1, f2):
            assert riesz_leq(E2, f, h)
        for g in (g1, g2):
            assert riesz_leq(E2, h, g)

    def test_incomparable_inputs_rejected(self):
        f = make_vector(E2, {"e1": 3, "e2": 0})
        g = make_vector(E2, {"e1": 0, "e2": 3})
        with pytest.raises(PreconditionError):
            interpolate(E2, [f], [g])

    def test_random_quadruples(self):
        rng = random.Random(47)
        for P in FIXTURES.values():
            for _ in range(40):
                center = rand_riesz_vector(P, rng)
                lower = [center - rand_positive_vector(P, rng) for _ in range(2)]
                upper = [center + rand_positive_vector(P, rng) for _ in range(2)]
                h = interpolate(P, lower, upper)
                assert all(riesz_leq(P, lo, h) for lo in lower)
                assert all(riesz_leq(P, h, up) for up in upper)


class TestSeparation:
    def test_family_separates_distinct_elements(self):
        rng = random.Random(48)
        for P in FIXTURES.values():
            family = separating_family(P)
            assert all(is_positive(P, r) for r in family)
            els = sample_elements(P, rng, 25)
            for y in els:
                for z in els:
                    if y == z:
                        continue
                    assert any(pairing(P, y, r) != pairing(P, z, r)
                               for r in family)

    def test_vector_space_operations(self):
        r = make_vector(E2, {"e1": 2, "e2": -3})
        s = make_vector(E2, {"e1": 1, "e2": 1})
        assert (r + s).value_dict() == {"e1": Fraction(3), "e2": Fraction(-2)}
        assert (r - s).value_dict() == {"e1": Fraction(1), "e2": Fraction(-4)}
        assert (-r).value_dict() == {"e1": Fraction(-2), "e2": Fraction(3)}
        assert r.scale(Fraction(1, 2)).value_dict() \
            == {"e1": Fraction(1), "e2": Fraction(-3, 2)}
