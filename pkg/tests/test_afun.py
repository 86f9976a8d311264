"""Function spaces on presented cones: evaluation, order, and decomposition.

Pinned cases come with hand-computed values; random cases are verified
against the pointwise models in fixture_oracles (a function document is
evaluated at model elements and compared with afun_eval).
"""

import random
from fractions import Fraction

import pytest

from extcone.afun import (afun_add, afun_compare, afun_eval, afun_leq,
                          afun_lhd, afun_meet, afun_subtract, afun_way_below,
                          approx_stage, face_indicator, fn_scale, infty_scale,
                          lincomb, make_fn, riesz_decompose, zero_fn)
from extcone.errors import PreconditionError
from extcone.fg_cone import (canonicalize, cone_leq, idem_element,
                             sample_elements)
from extcone.fixtures import all_fixtures, rand_affine, rand_afun
from extcone.xreal import INF, ext

from fixture_oracles import MODELS, mleq, mvalue

FIXTURES = all_fixtures()
E1 = FIXTURES["half_line"]
E2 = FIXTURES["quarter_plane"]
EL = FIXTURES["lex_cone"]


def elem(P, w, raw):
    return canonicalize(P, w, {k: Fraction(v) for k, v in raw.items()})


def as_model(scalar):
    """Production ExtScalar to the model's Fraction-or-None convention."""
    return None if scalar.is_infinite else scalar.finite


def probe_elements(P):
    """A small grid of elements covering every stratum in every direction."""
    import itertools
    out = []
    grid = [Fraction(0), Fraction(1, 2), Fraction(3)]
    for w in P.lattice.elements:
        rays = P.rays.get(w, ())
        for combo in itertools.product(grid, repeat=len(rays)):
            out.append(canonicalize(P, w, dict(zip(rays, combo))))
    return out


def model_eval(name, f, model_point):
    vals = {x: as_model(v) for x, v in f.values}
    return MODELS[name]["fn_eval"](f.support, vals, model_point)


class TestEval:
    def test_pinned_examples(self):
        f = make_fn(EL, "w", {"x2": 2})
        assert afun_eval(EL, f, elem(EL, "bot", {"x1": 3})) == ext(0)
        assert afun_eval(EL, f, idem_element(EL, "top")) == INF
        g = make_fn(E2, "bot", {"e1": 1, "e2": 2})
        assert afun_eval(E2, g, elem(E2, "bot", {"e1": 3})) == ext(3)

    def test_matches_models(self):
        rng = random.Random(20)
        for name, P in sorted(FIXTURES.items()):
            model = MODELS[name]
            for _ in range(150):
                f = rand_afun(P, rng)
                y = rng.choice(sample_elements(P, rng, 1))
                got = as_model(afun_eval(P, f, y))
                assert got == model_eval(name, f, model["of_element"](y))

    def test_linearity(self):
        rng = random.Random(21)
        for P in FIXTURES.values():
            for _ in range(60):
                f = rand_afun(P, rng)
                ys = sample_elements(P, rng, 2)
                from extcone.fg_cone import cone_add, scalar_mul
                lhs = afun_eval(P, f, cone_add(P, ys[0], ys[1]))
                rhs = afun_eval(P, f, ys[0]) + afun_eval(P, f, ys[1])
                assert lhs == rhs
                t = Fraction(3, 2)
                assert afun_eval(P, f, scalar_mul(P, ext(t), ys[0])) \
                    == ext(t) * afun_eval(P, f, ys[0])


class TestAddition:
    def test_pinned_examples(self):
        got = afun_add(E2, make_fn(E2, "bot", {"e1": 1, "e2": 1}),
                       make_fn(E2, "bot", {"e1": 2, "e2": 1}))
        assert got == make_fn(E2, "bot", {"e1": 3, "e2": 2})
        got = afun_add(EL, make_fn(EL, "bot", {"x1": 1}), make_fn(EL, "w", {"x2": 1}))
        assert got == make_fn(EL, "bot", {"x1": 1})
        f = make_fn(E2, "bot", {"e1": 3, "e2": 7})
        chi = make_fn(E2, "bot", {"e1": "inf", "e2": "inf"})
        assert afun_add(E2, f, chi) == chi

    def test_support_is_the_meet(self):
        rng = random.Random(22)
        for P in FIXTURES.values():
            for _ in range(60):
                f, g = rand_afun(P, rng), rand_afun(P, rng)
                assert afun_add(P, f, g).support \
                    == P.lattice.meet(f.support, g.support)

    def test_pointwise_against_models(self):
        rng = random.Random(23)
        for name, P in sorted(FIXTURES.items()):
            model = MODELS[name]
            for _ in range(80):
                f, g = rand_afun(P, rng), rand_afun(P, rng)
                total = afun_add(P, f, g)
                for y in sample_elements(P, rng, 3):
                    pt = model["of_element"](y)
                    lhs = model_eval(name, total, pt)
                    a, b = model_eval(name, f, pt), model_eval(name, g, pt)
                    rhs = None if a is None or b is None else a + b
                    assert lhs == rhs


class TestOrderRelations:
    def test_pinned_examples(self):
        one = make_fn(E1, "bot", {"e": 1})
        allinf = make_fn(E1, "bot", {"e": "inf"})
        assert afun_compare(E1, one, allinf, "way_below") is True
        assert afun_compare(E1, one, one, "way_below") is False
        assert afun_compare(E1, one, one, "leq") is True

    def test_chain_lhd_implies_way_below_implies_leq(self):
        rng = random.Random(24)
        for P in FIXTURES.values():
            for _ in range(100):
                f, g = rand_affine(P, rng), rand_afun(P, rng)
                if afun_lhd(P, f, g):
                    assert afun_way_below(P, f, g)
                if f.is_affine and afun_way_below(P, f, g):
                    assert afun_leq(P, f, g)

    def test_lhd_requires_affine(self):
        allinf = make_fn(E1, "bot", {"e": "inf"})
        with pytest.raises(PreconditionError):
            afun_lhd(E1, allinf, allinf)

    def test_leq_is_pointwise_on_models(self):
        rng = random.Random(25)
        for name, P in sorted(FIXTURES.items()):
            model = MODELS[name]
            points = [model["of_element"](y) for y in probe_elements(P)]
            for _ in range(60):
                f, g = rand_afun(P, rng), rand_afun(P, rng)
                got = afun_leq(P, f, g)
                dominated = all(
                    mleq(model_eval(name, f, pt), model_eval(name, g, pt))
                    for pt in points)
                # The grid probes hit every stratum in every single-ray
                # direction, which pins the pointwise order exactly.
                assert got == dominated

    def test_approx_stages_form_a_chain(self):
        rng = random.Random(26)
        for P in FIXTURES.values():
            for _ in range(25):
                g = rand_afun(P, rng)
                assert approx_stage(P, g, 0) == zero_fn(P)
                for n in range(0, 6):
                    gn = approx_stage(P, g, n)
                    gn1 = approx_stage(P, g, n + 1)
                    assert afun_lhd(P, gn, gn1)
                    assert afun_way_below(P, gn, g)


class TestSubtraction:
    def test_pinned_examples(self):
        h = afun_subtract(E2, make_fn(E2, "bot", {"e1": 1, "e2": 1}),
                          make_fn(E2, "bot", {"e1": 2, "e2": 3}))
        assert h == make_fn(E2, "bot", {"e1": 1, "e2": 2})
        h = afun_subtract(EL, make_fn(EL, "bot", {"x1": 1}),
                          make_fn(EL, "bot", {"x1": "inf"}))
        assert h == make_fn(EL, "bot", {"x1": "inf"})
        f = make_fn(E2, "bot", {"e1": 1, "e2": 1})
        with pytest.raises(PreconditionError):
            afun_subtract(E2, f, f)

    def test_add_back_and_lower_witness(self):
        rng = random.Random(27)
        for P in FIXTURES.values():
            done = 0
            for _ in range(300):
                if done >= 60:
                    break
                f, g = rand_affine(P, rng), rand_afun(P, rng)
                if not afun_lhd(P, f, g):
                    continue
                done += 1
                h = afun_subtract(P, f, g)
                assert afun_add(P, f, h) == g
                # h >= eps * g for some positive rational eps: epsilon can
                # be read off the finite value ratios on g's rays.
                ratios = []
                gv, hv = dict(g.values), dict(h.values)
                for x, val in gv.items():
                    if val.is_infinite:
                        assert hv[x].is_infinite
                    else:
                        ratios.append(hv[x].finite / val.finite
                                      if not hv[x].is_infinite else Fraction(1))
                eps = min(ratios, default=Fraction(1))
                assert eps > 0
                assert afun_leq(P, fn_scale(P, eps, g), h)
            assert done >= 20


class TestInftyScale:
    def test_pinned_examples(self):
        assert infty_scale(E1, make_fn(E1, "bot", {"e": 1})) \
            == make_fn(E1, "bot", {"e": "inf"})
        assert infty_scale(EL, make_fn(EL, "w", {"x2": 5})) \
            == make_fn(EL, "w", {"x2": "inf"})
        chi = make_fn(E2, "bot", {"e1": "inf", "e2": "inf"})
        assert infty_scale(E2, chi) == chi

    def test_matches_pointwise_supremum(self):
        rng = random.Random(28)
        for name, P in sorted(FIXTURES.items()):
            model = MODELS[name]
            for _ in range(40):
                f = rand_afun(P, rng)
                top_f = infty_scale(P, f)
                for y in sample_elements(P, rng, 3):
                    pt = model["of_element"](y)
                    base = model_eval(name, f, pt)
                    want = mvalue(0) if base == 0 else None
                    assert model_eval(name, top_f, pt) == want


class TestMeet:
    def test_pinned_examples(self):
        got = afun_meet(E2, make_fn(E2, "bot", {"e1": 1, "e2": 3}),
                        make_fn(E2, "bot", {"e1": 2, "e2": 2}))
        assert got == make_fn(E2, "bot", {"e1": 1, "e2": 2})
        f = make_fn(EL, "w", {"x2": 4})
        assert afun_meet(EL, f, f) == f
        got = afun_meet(EL, make_fn(EL, "bot", {"x1": 1}), make_fn(EL, "w", {"x2": 1}))
        assert got == make_fn(EL, "w", {"x2": 1})

    def test_is_a_lower_bound(self):
        rng = random.Random(29)
        for P in FIXTURES.values():
            for _ in range(60):
                f, g = rand_afun(P, rng), rand_afun(P, rng)
                m = afun_meet(P, f, g)
                assert afun_leq(P, m, f) and afun_leq(P, m, g)


class TestRieszDecompose:
    def test_symmetric_split(self):
        f = make_fn(E2, "bot", {"e1": 1, "e2": 1})
        f1, f2 = riesz_decompose(E2, f, f, f)
        assert f1 == make_fn(E2, "bot", {"e1": Fraction(1, 2), "e2": Fraction(1, 2)})
        assert f2 == f1

    def test_one_sided_bound(self):
        f = make_fn(E2, "bot", {"e1": 1, "e2": 1})
        g1 = make_fn(E2, "bot", {"e1": 3, "e2": 3})
        g2 = make_fn(E2, "bot", {"e1": 1, "e2": 2})
        f1, f2 = riesz_decompose(E2, f, g1, g2)
        assert afun_add(E2, f1, f2) == f
        assert afun_lhd(E2, f1, g1) and afun_lhd(E2, f2, g2)

    def test_precondition_enforced(self):
        f = make_fn(E1, "bot", {"e": 4})
        g = make_fn(E1, "bot", {"e": 1})
        with pytest.raises(PreconditionError):
            riesz_decompose(E1, f, g, g)

    def test_random_instances(self):
        rng = random.Random(30)
        for P in FIXTURES.values():
            done = 0
            for _ in range(300):
                if done >= 40:
                    break
                f = rand_affine(P, rng)
                g1, g2 = rand_affine(P, rng), rand_affine(P, rng)
                if not afun_lhd(P, f, afun_add(P, g1, g2)):
                    continue
                done += 1
                f1, f2 = riesz_decompose(P, f, g1, g2)
                assert afun_add(P, f1, f2) == f
                assert afun_lhd(P, f1, g1) and afun_lhd(P, f2, g2)
            assert done >= 15


class TestConstruction:
    def test_make_fn_rejects_bad_values(self):
        with pytest.raises(PreconditionError):
            make_fn(E2, "bot", {"e1": 0, "e2": 1})
        with pytest.raises(PreconditionError):
            make_fn(E2, "bot", {"e1": 1})
        with pytest.raises(PreconditionError):
            make_fn(E2, "bot", {"e1": 1, "e2": 1, "x9": 1})
        with pytest.raises(PreconditionError):
            make_fn(E2, "nope", {})

    def test_zero_fn_and_face_indicator(self):
        rng = random.Random(31)
        for P in FIXTURES.values():
            z = zero_fn(P)
            for y in sample_elements(P, rng, 10):
                assert afun_eval(P, z, y) == ext(0)
            for w in P.lattice.elements:
                chi = face_indicator(P, w)
                assert chi.support == w
                for y in sample_elements(P, rng, 10):
                    below = cone_leq(P, y, idem_element(P, w))
                    assert afun_eval(P, chi, y) == (ext(0) if below else INF)

    def test_lincomb_matches_pointwise(self):
        rng = random.Random(32)
        for P in FIXTURES.values():
            for _ in range(30):
                fs = [rand_afun(P, rng) for _ in range(3)]
                ts = [Fraction(rng.randrange(1, 5), 2) for _ in range(3)]
                combo = lincomb(P, list(zip(ts, fs)))
                for y in sample_elements(P, rng, 4):
                    want = sum((ext(t) * afun_eval(P, f, y) for t, f in zip(ts, fs)),
                               ext(0))
                    assert afun_eval(P, combo, y) == want
