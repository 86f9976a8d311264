"""Matrices over the extended half-line, limit systems, and diagrams."""

import itertools
import random
from fractions import Fraction

import pytest

from extcone.errors import PreconditionError
from extcone.fixtures import all_fixtures, car_diagram, two_component_diagram
from extcone.limits import (BratteliDiagram, CuMatrix, bratteli_import,
                            dualize, ext_dot, functional_iso,
                            idempotent_count, identity_matrix, make_matrix,
                            make_system, mat_apply, matmul, roundtrip_check,
                            thread_eval, transpose)
from extcone.xreal import INF, ExtVector, ext

FIXTURES = all_fixtures()


def rand_matrix(rng, rows, cols):
    entries = {(r, c): Fraction(rng.randrange(0, 5), rng.randrange(1, 4))
               for r in rows for c in cols if rng.random() < 0.7}
    return make_matrix(rows, cols, entries)


class TestMatrices:
    def test_zero_matrix_kills_infinity(self):
        M = make_matrix(["r"], ["c"], {})
        assert mat_apply(M, {"c": INF}) == {"r": ext(0)}

    def test_identity_preserves_vectors(self):
        M = identity_matrix(["a", "b"])
        vec = {"a": ext(Fraction(3, 2)), "b": INF}
        assert mat_apply(M, vec) == vec

    def test_infinite_entry_dominates(self):
        M = make_matrix(["r"], ["a", "b"], {("r", "a"): 1, ("r", "b"): 2})
        assert mat_apply(M, {"a": ext(1), "b": INF}) == {"r": INF}

    def test_apply_requires_column_labels(self):
        M = identity_matrix(["a", "b"])
        with pytest.raises(PreconditionError):
            mat_apply(M, {"a": ext(1)})

    def test_make_matrix_rejects_bad_entries(self):
        with pytest.raises(PreconditionError):
            make_matrix(["r"], ["c"], {("r", "x"): 1})
        with pytest.raises(PreconditionError):
            make_matrix(["r"], ["c"], {("r", "c"): -1})
        with pytest.raises(PreconditionError):
            make_matrix(["r", "r"], ["c"], {})

    def test_zero_entries_are_normalized_away(self):
        M = make_matrix(["r"], ["c"], {("r", "c"): 0})
        assert M.entries == ()
        assert M.entry("r", "c") == 0

    def test_transpose_pinned(self):
        M = make_matrix(["r1", "r2"], ["c1", "c2"],
                        {("r1", "c1"): 1, ("r1", "c2"): 2,
                         ("r2", "c1"): 3, ("r2", "c2"): 4})
        T = transpose(M)
        assert T.rows == ("c1", "c2") and T.cols == ("r1", "r2")
        assert T.entry("c1", "r2") == 3 and T.entry("c2", "r1") == 2
        assert transpose(T) == M

    def test_transpose_antihomomorphism(self):
        rng = random.Random(7)
        for _ in range(25):
            A = rand_matrix(rng, ["p", "q"], ["m", "n", "o"])
            B = rand_matrix(rng, ["m", "n", "o"], ["x", "y"])
            assert transpose(matmul(A, B)) == matmul(transpose(B), transpose(A))

    def test_matmul_checks_stages(self):
        A = identity_matrix(["a"])
        B = identity_matrix(["b"])
        with pytest.raises(PreconditionError):
            matmul(A, B)


class TestFunctionals:
    def test_table_reads_back_as_dot_product(self):
        f = functional_iso([1, INF], 2)
        assert ext_dot(f, ExtVector((ext(2), ext(0)))) == ext(2)
        assert ext_dot(f, ExtVector((ext(0), ext(1)))) == INF

    def test_zero_table_is_zero_functional(self):
        f = functional_iso([0, 0, 0], 3)
        assert ext_dot(f, ExtVector((INF, ext(5), ext(0)))) == ext(0)

    def test_length_is_checked(self):
        with pytest.raises(PreconditionError):
            functional_iso([1, 2], 3)
        with pytest.raises(PreconditionError):
            ext_dot(ExtVector((ext(1),)), ExtVector((ext(1), ext(2))))


class TestSystems:
    @staticmethod
    def chain(multiplier, length):
        ind, pro = bratteli_import(car_diagram(length), length)
        return ind, pro

    def test_make_system_validates(self):
        with pytest.raises(PreconditionError):
            make_system("sideways", ["S"], {"S": ("v",)}, {})
        with pytest.raises(PreconditionError):
            make_system("inductive", ["S", "S"], {"S": ("v",)}, {})
        with pytest.raises(PreconditionError):
            make_system("inductive", ["S"], {}, {})
        bad = {("S", "T"): identity_matrix(["v"])}
        with pytest.raises(PreconditionError):
            make_system("inductive", ["S"], {"S": ("v",)}, bad)
        wrong_shape = {("S", "S"): identity_matrix(["w"])}
        with pytest.raises(PreconditionError):
            make_system("inductive", ["S"], {"S": ("v",)}, wrong_shape)

    def test_dualize_is_an_involution(self):
        ind, pro = self.chain(2, 2)
        assert dualize(ind) == pro
        assert dualize(pro) == ind
        with pytest.raises(PreconditionError):
            dualize("not a system")

    def test_constant_zero_thread_passes(self):
        ind, pro = self.chain(2, 2)
        zeros = {k: {l: ext(0) for l in ind.stage_labels[k]}
                 for k in ind.stage_keys}
        assert thread_eval(ind, zeros) == []
        assert thread_eval(pro, zeros) == []

    def test_doubling_chain_thread(self):
        ind, pro = self.chain(2, 1)
        good = {"L0": {"v0": ext(2)}, "L1": {"v0": ext(1)}}
        assert thread_eval(pro, good) == []
        bad = {"L0": {"v0": ext(3)}, "L1": {"v0": ext(1)}}
        assert thread_eval(pro, bad) == ["map (L1, L0) disagrees at v0"]

    def test_thread_requires_full_assignment(self):
        ind, _ = self.chain(2, 1)
        with pytest.raises(PreconditionError):
            thread_eval(ind, {"L0": {"v0": ext(1)}})
        with pytest.raises(PreconditionError):
            thread_eval(ind, {"L0": {"v0": ext(1)}, "L1": {"w": ext(2)}})


class TestBratteli:
    def test_shape_validation(self):
        with pytest.raises(PreconditionError):
            BratteliDiagram((), ())
        with pytest.raises(PreconditionError):
            BratteliDiagram((1, 0), (((1,),),))
        with pytest.raises(PreconditionError):
            BratteliDiagram((1, 1), ())
        with pytest.raises(PreconditionError):
            BratteliDiagram((1, 2), (((1,),),))
        with pytest.raises(PreconditionError):
            BratteliDiagram((1, 1), (((-1,),),))

    def test_doubling_diagram_composites(self):
        ind, pro = bratteli_import(car_diagram(3), 3)
        assert ind.stage_keys == ("L0", "L1", "L2", "L3")
        assert all(ind.stage_labels[k] == ("v0",) for k in ind.stage_keys)
        expected = {("L0", "L1"): 2, ("L1", "L2"): 2, ("L2", "L3"): 2,
                    ("L0", "L2"): 4, ("L1", "L3"): 4, ("L0", "L3"): 8}
        assert set(ind.maps) == set(expected)
        for pair, mult in expected.items():
            assert ind.maps[pair].entry("v0", "v0") == mult
        assert set(pro.maps) == {(b, a) for a, b in expected}
        assert pro.stage_keys == ("L3", "L2", "L1", "L0")

    def test_depth_zero_has_no_maps(self):
        ind, pro = bratteli_import(car_diagram(2), 0)
        assert ind.stage_keys == ("L0",)
        assert ind.maps == {} and pro.maps == {}

    def test_depth_bounds(self):
        D = car_diagram(2)
        with pytest.raises(PreconditionError):
            bratteli_import(D, 3)
        with pytest.raises(PreconditionError):
            bratteli_import(D, -1)
        with pytest.raises(PreconditionError):
            idempotent_count(D, 3)

    def test_idempotent_counts(self):
        assert idempotent_count(car_diagram(6), 6) == 2
        assert idempotent_count(two_component_diagram(2), 2) == 4

    def test_idempotent_count_matches_thread_enumeration(self):
        """Count {0, infinity} valued threads of the dual system directly."""
        for D, depth in [(car_diagram(2), 2), (two_component_diagram(2), 2)]:
            _, pro = bratteli_import(D, depth)
            slots = [(k, l) for k in pro.stage_keys
                     for l in pro.stage_labels[k]]
            found = 0
            for mask in itertools.product((ext(0), INF), repeat=len(slots)):
                assignment = {k: {} for k in pro.stage_keys}
                for (k, l), v in zip(slots, mask):
                    assignment[k][l] = v
                if thread_eval(pro, assignment) == []:
                    found += 1
            assert found == idempotent_count(D, depth)


class TestRoundtrip:
    def test_small_roundtrip_per_fixture(self):
        for name, P in FIXTURES.items():
            stats = roundtrip_check(P, samples=5, rounds=2, seed=3,
                                    sample_fns=3)
            assert set(stats) == {"stages", "threads", "pairings"}
            assert stats["threads"] == 5
            assert stats["pairings"] > 0

    def test_roundtrip_is_deterministic(self):
        a = roundtrip_check(FIXTURES["lex_cone"], samples=4, seed=9)
        b = roundtrip_check(FIXTURES["lex_cone"], samples=4, seed=9)
        assert a == b
