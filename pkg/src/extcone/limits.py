"""Inductive and projective systems of powers of the extended half-line.

Stages are spaces [0, infinity]^labels; connecting maps are matrices with
nonnegative finite rational entries acting with the 0 * infinity = 0 rule.
A system stores maps under keys (src, dst) meaning dst = M . src, so one
thread-checking routine serves both orientations.  Dualizing reverses the
stage order and transposes every matrix: functionals pull back along maps,
turning an inductive system into the projective one it pairs with.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import PreconditionError, VerificationError
from .afun import LscFn, afun_eval
from .fg_cone import ConePresentation, sample_elements
from .xreal import ExtScalar, ExtVector, ZERO, ext


@dataclass(frozen=True)
class CuMatrix:
    """Nonnegative finite rational matrix between two labelled stages."""

    rows: Tuple[str, ...]
    cols: Tuple[str, ...]
    entries: Tuple[Tuple[Tuple[str, str], Fraction], ...]

    def entry(self, r: str, c: str) -> Fraction:
        return self.entry_dict().get((r, c), Fraction(0))

    def entry_dict(self) -> Dict[Tuple[str, str], Fraction]:
        return dict(self.entries)


def make_matrix(rows: Sequence[str], cols: Sequence[str],
                entries: Mapping[Tuple[str, str], object]) -> CuMatrix:
    rows, cols = tuple(rows), tuple(cols)
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise PreconditionError("duplicate stage labels")
    cleaned = {}
    for (r, c), v in entries.items():
        if r not in rows or c not in cols:
            raise PreconditionError("entry (%s, %s) is outside the stage labels" % (r, c))
        v = Fraction(v)
        if v < 0:
            raise PreconditionError("matrix entries must be nonnegative")
        if v != 0:
            cleaned[(r, c)] = v
    return CuMatrix(rows, cols, tuple(sorted(cleaned.items())))


def identity_matrix(labels: Sequence[str]) -> CuMatrix:
    return make_matrix(labels, labels, {(l, l): Fraction(1) for l in labels})


def transpose(M: CuMatrix) -> CuMatrix:
    return make_matrix(M.cols, M.rows,
                       {(c, r): v for (r, c), v in M.entries})


def matmul(A: CuMatrix, B: CuMatrix) -> CuMatrix:
    """A after B; B feeds its output stage into A."""
    if A.cols != B.rows:
        raise PreconditionError("stage mismatch in matrix composition")
    out: Dict[Tuple[str, str], Fraction] = {}
    b_by_col: Dict[str, List[Tuple[str, Fraction]]] = {}
    for (r, c), v in B.entries:
        b_by_col.setdefault(c, []).append((r, v))
    a_by_col: Dict[str, List[Tuple[str, Fraction]]] = {}
    for (r, c), v in A.entries:
        a_by_col.setdefault(c, []).append((r, v))
    for c in B.cols:
        for mid, bv in b_by_col.get(c, ()):
            for r, av in a_by_col.get(mid, ()):
                out[(r, c)] = out.get((r, c), Fraction(0)) + av * bv
    return make_matrix(A.rows, B.cols, out)


def mat_apply(M: CuMatrix, vec: Mapping[str, ExtScalar]) -> Dict[str, ExtScalar]:
    """Apply with the 0 * infinity = 0 convention of the scalar type."""
    if set(vec) != set(M.cols):
        raise PreconditionError("vector labels do not match the matrix columns")
    out = {r: ZERO for r in M.rows}
    for (r, c), v in M.entries:
        out[r] = out[r] + ext(vec[c]) * v
    return out


def functional_iso(table: Sequence[object], n: int) -> ExtVector:
    """Identify a generalized-scalar row with the vector it dots against.

    Every monotone sup-preserving additive map [0, infinity]^n -> [0, infinity]
    is of this form; the inverse direction reads the table off the images of
    the coordinate basis.
    """
    if len(table) != n:
        raise PreconditionError("functional table must have length %d" % n)
    return ExtVector(tuple(ext(v) for v in table))


def ext_dot(u: ExtVector, v: ExtVector) -> ExtScalar:
    if len(u.entries) != len(v.entries):
        raise PreconditionError("dot product needs equal lengths")
    total = ZERO
    for a, b in zip(u.entries, v.entries):
        total = total + a * b
    return total


@dataclass(frozen=True)
class InductiveSystem:
    """Stages in diagram order with maps sending earlier stages forward."""

    stage_keys: Tuple[str, ...]
    stage_labels: Mapping[str, Tuple[str, ...]]
    maps: Mapping[Tuple[str, str], CuMatrix]
    stage_morphisms: Optional[Mapping[str, Mapping[str, LscFn]]] = None


@dataclass(frozen=True)
class ProjectiveSystem:
    """Stages in diagram order with maps restricting later stages back."""

    stage_keys: Tuple[str, ...]
    stage_labels: Mapping[str, Tuple[str, ...]]
    maps: Mapping[Tuple[str, str], CuMatrix]
    stage_morphisms: Optional[Mapping[str, Mapping[str, LscFn]]] = None


def _check_system(stage_keys, stage_labels, maps) -> None:
    if len(set(stage_keys)) != len(stage_keys):
        raise PreconditionError("duplicate stage keys")
    for key in stage_keys:
        if key not in stage_labels:
            raise PreconditionError("stage %r has no labels" % key)
    for (a, b), M in maps.items():
        if a not in stage_labels or b not in stage_labels:
            raise PreconditionError("map (%s, %s) uses unknown stages" % (a, b))
        if M.cols != tuple(stage_labels[a]) or M.rows != tuple(stage_labels[b]):
            raise PreconditionError("map (%s, %s) has mismatched shape" % (a, b))


def make_system(kind: str, stage_keys, stage_labels, maps,
                stage_morphisms=None):
    stage_keys = tuple(stage_keys)
    stage_labels = {k: tuple(v) for k, v in stage_labels.items()}
    maps = dict(maps)
    _check_system(stage_keys, stage_labels, maps)
    cls = {"inductive": InductiveSystem, "projective": ProjectiveSystem}.get(kind)
    if cls is None:
        raise PreconditionError("unknown system kind %r" % kind)
    return cls(stage_keys, stage_labels, maps, stage_morphisms)


def dualize(system):
    """Transpose every map and reverse the diagram; an involution."""
    if isinstance(system, InductiveSystem):
        kind = "projective"
    elif isinstance(system, ProjectiveSystem):
        kind = "inductive"
    else:
        raise PreconditionError("dualize expects a limit system")
    maps = {(b, a): transpose(M) for (a, b), M in system.maps.items()}
    return make_system(kind, tuple(reversed(system.stage_keys)),
                       dict(system.stage_labels), maps, system.stage_morphisms)


def thread_eval(system, assignments: Mapping[str, Mapping[str, ExtScalar]]) -> List[str]:
    """Check a per-stage assignment against every stored map; list failures."""
    failures = []
    for key in system.stage_keys:
        if key not in assignments:
            raise PreconditionError("assignment missing for stage %r" % key)
        if set(assignments[key]) != set(system.stage_labels[key]):
            raise PreconditionError("assignment labels wrong at stage %r" % key)
    for (a, b), M in system.maps.items():
        image = mat_apply(M, assignments[a])
        for label, value in image.items():
            if ext(assignments[b][label]) != value:
                failures.append("map (%s, %s) disagrees at %s" % (a, b, label))
                break
    return failures


@dataclass(frozen=True)
class BratteliDiagram:
    """Levels of vertices with nonnegative integer edge multiplicities."""

    vertex_counts: Tuple[int, ...]
    edges: Tuple[Tuple[Tuple[int, ...], ...], ...]  # edges[k][r][c]: level k -> k+1

    def __post_init__(self):
        if not self.vertex_counts or any(n <= 0 for n in self.vertex_counts):
            raise PreconditionError("every level needs at least one vertex")
        if len(self.edges) != len(self.vertex_counts) - 1:
            raise PreconditionError("need exactly one edge matrix between levels")
        for k, mat in enumerate(self.edges):
            if len(mat) != self.vertex_counts[k + 1] or \
                    any(len(row) != self.vertex_counts[k] for row in mat):
                raise PreconditionError("edge matrix %d has the wrong shape" % k)
            if any(e < 0 or e != int(e) for row in mat for e in row):
                raise PreconditionError("edge multiplicities must be nonnegative integers")

    @property
    def depth(self) -> int:
        return len(self.vertex_counts) - 1


def _level_labels(D: BratteliDiagram, k: int) -> Tuple[str, ...]:
    return tuple("v%d" % i for i in range(D.vertex_counts[k]))


def bratteli_import(D: BratteliDiagram, depth: int) -> Tuple[InductiveSystem, ProjectiveSystem]:
    """Read a diagram as an inductive system (and its dual) up to a depth.

    Consecutive maps come straight from the edge matrices; composite maps
    for every earlier-to-later pair are their products, so the system is
    coherent by construction.
    """
    if depth < 0 or depth > D.depth:
        raise PreconditionError("depth %d outside the diagram's %d levels" % (depth, D.depth))
    keys = tuple("L%d" % k for k in range(depth + 1))
    labels = {("L%d" % k): _level_labels(D, k) for k in range(depth + 1)}
    step: Dict[int, CuMatrix] = {}
    for k in range(depth):
        entries = {}
        for r in range(D.vertex_counts[k + 1]):
            for c in range(D.vertex_counts[k]):
                entries[("v%d" % r, "v%d" % c)] = Fraction(D.edges[k][r][c])
        step[k] = make_matrix(labels["L%d" % (k + 1)], labels["L%d" % k], entries)
    maps: Dict[Tuple[str, str], CuMatrix] = {}
    for a in range(depth + 1):
        acc: Optional[CuMatrix] = None
        for b in range(a + 1, depth + 1):
            acc = step[b - 1] if acc is None else matmul(step[b - 1], acc)
            maps[("L%d" % a, "L%d" % b)] = acc
    system = make_system("inductive", keys, labels, maps)
    return system, dualize(system)


def idempotent_count(D: BratteliDiagram, depth: int) -> int:
    """Idempotents of the truncated limit cone: one per subset of the final
    level, since each level's sublevel set is pulled back from the next."""
    if depth < 0 or depth > D.depth:
        raise PreconditionError("depth outside the diagram")
    return 2 ** D.vertex_counts[depth]


def roundtrip_check(P: ConePresentation, samples: int = 10, rounds: int = 2,
                    seed: int = 0, sample_fns: int = 4,
                    probe_cap: int = 6) -> Dict[str, int]:
    """Build the factor system of a cone, dualize it, and confirm that
    sampled elements induce exact threads whose pairings match function
    evaluation.  Returns counters; any mismatch raises instead."""
    from .ehs_engine import build_inductive_system, seed_functions
    from .riesz_space import afun_to_riesz, pairing

    system = build_inductive_system(P, seed_functions(P, sample_fns),
                                    rounds=rounds, probe_cap=probe_cap)
    dual = dualize(system)
    rng = random.Random(seed)
    elements = sample_elements(P, rng, samples)
    checked_threads = 0
    checked_pairings = 0
    for y in elements:
        assignment = {}
        for key in system.stage_keys:
            morph = system.stage_morphisms[key]
            assignment[key] = {l: afun_eval(P, morph[l], y)
                               for l in system.stage_labels[key]}
        failures = thread_eval(dual, assignment)
        if failures:
            raise VerificationError("dual thread broken: %s" % failures[0])
        checked_threads += 1
        for key in system.stage_keys:
            for l in system.stage_labels[key]:
                f = system.stage_morphisms[key][l]
                value = afun_eval(P, f, y)
                paired = pairing(P, y, afun_to_riesz(P, f))
                if value != paired:
                    raise VerificationError(
                        "pairing disagrees with evaluation at stage %s" % key)
                checked_pairings += 1
    return {"stages": len(system.stage_keys), "threads": checked_threads,
            "pairings": checked_pairings}
