"""Document formats and the command-line surface.

Documents are JSON objects tagged with a "kind" field.  Rationals travel as
"p/q" or "p" strings, infinity as "inf"; emitted documents use sorted keys,
two-space indentation, and a trailing newline, so identical inputs yield
byte-identical output.  Parsing is strict: unknown fields are rejected by
their path, malformed syntax is reported with line and column, and every
kind-specific rule (positive coefficients, known generators, matching ray
sets) is a schema error naming the offending field.

Exit codes: 0 success, 1 validation or schema failure, 2 precondition
violation, 3 internal invariant breach or failed verification.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import props
from .afun import (LscFn, afun_add, afun_eval, afun_leq, afun_meet, make_fn,
                   riesz_decompose)
from .ehs_engine import TriangleResult, build_inductive_system, seed_functions, triangle
from .errors import (ExtConeError, LatticeError, PreconditionError, SchemaError,
                     VerificationError)
from .fg_cone import (ConeElement, ConePresentation, Lattice, canonicalize,
                      cone_add, cone_leq, element_meet, validate_presentation)
from .fixtures import all_fixtures, car_diagram, two_component_diagram
from .limits import (BratteliDiagram, CuMatrix, InductiveSystem,
                     ProjectiveSystem, bratteli_import, dualize,
                     idempotent_count, make_matrix, make_system, roundtrip_check)
from .riesz_space import RieszVector, interpolate, make_vector, pairing, riesz_leq
from .xreal import format_scalar, parse_scalar

_EXTENSION_KINDS = {
    ".cone": "cone", ".elt": "element", ".fn": "function",
    ".vec": "vector", ".bd": "diagram", ".sys": "system",
}


# ---------------------------------------------------------------------------
# payload plumbing


def _check_fields(obj, path: str, required: Sequence[str],
                  optional: Sequence[str] = ()) -> None:
    if not isinstance(obj, dict):
        raise SchemaError("%s: expected an object" % path)
    for key in obj:
        if key not in required and key not in optional:
            raise SchemaError("unknown field %s.%s" % (path, key))
    for key in required:
        if key not in obj:
            raise SchemaError("missing field %s.%s" % (path, key))


def _free_object(obj, path: str) -> Dict:
    """A dictionary whose keys are data (generator ids, stage names), not a
    fixed schema; only the container type is checked here."""
    if not isinstance(obj, dict):
        raise SchemaError("%s: expected an object" % path)
    return obj


def _check_kind(payload: Mapping, path: str, expected: str) -> None:
    kind = payload.get("kind", expected)
    if kind != expected:
        raise SchemaError("%s.kind: expected %r, found %r" % (path, expected, kind))


def _string(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError("%s: expected a string" % path)
    return value


def _string_list(value, path: str) -> List[str]:
    if not isinstance(value, list):
        raise SchemaError("%s: expected an array" % path)
    return [_string(v, "%s[%d]" % (path, i)) for i, v in enumerate(value)]


def _pair_list(value, path: str) -> List[Tuple[str, str]]:
    if not isinstance(value, list):
        raise SchemaError("%s: expected an array" % path)
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, list) or len(item) != 2:
            raise SchemaError("%s[%d]: expected a two-element array" % (path, i))
        out.append((_string(item[0], "%s[%d][0]" % (path, i)),
                    _string(item[1], "%s[%d][1]" % (path, i))))
    return out


_RATIONAL_RE = re.compile(r"-?[0-9]+(/[0-9]+)?")


def _fraction(value, path: str) -> Fraction:
    text = _string(value, path)
    if not _RATIONAL_RE.fullmatch(text):
        raise SchemaError('%s: bad rational %r (expected "p/q" or "p")'
                          % (path, text))
    try:
        return Fraction(text)
    except ZeroDivisionError as exc:
        raise SchemaError("%s: bad rational %r (%s)" % (path, text, exc)) from exc


def _scalar(value, path: str):
    text = _string(value, path)
    try:
        return parse_scalar(text)
    except SchemaError as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


def _integer(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError("%s: expected an integer" % path)
    return value


def loads_document(text: str, source: str = "document") -> Dict:
    """Parse document text, reporting syntax errors with line and column."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("%s: syntax error at line %d column %d: %s"
                          % (source, exc.lineno, exc.colno, exc.msg)) from exc
    if not isinstance(payload, dict):
        raise SchemaError("%s: top level must be an object" % source)
    return payload


def dumps_document(payload: Mapping) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _load_file(path: str) -> Dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise SchemaError("cannot read %s: %s" % (path, exc)) from exc
    return loads_document(text, source=path)


def _extension_kind(path: str) -> str:
    for ext, kind in _EXTENSION_KINDS.items():
        if path.endswith(ext):
            return kind
    raise SchemaError("%s: unrecognized extension (expected one of %s)"
                      % (path, ", ".join(sorted(_EXTENSION_KINDS))))


# ---------------------------------------------------------------------------
# cone documents


def cone_payload(P: ConePresentation) -> Dict:
    L = P.lattice
    return {
        "kind": "cone",
        "name": P.name,
        "lattice": {
            "elements": list(L.elements),
            "leq": sorted([a, b] for a in L.elements for b in L.elements
                          if L.leq(a, b)),
        },
        "generators": list(P.generators),
        "supp_idem": dict(P.supp_idem),
        "below": sorted([x, w] for x, w in P.below),
        "rays": {w: list(P.rays.get(w, ())) for w in L.elements},
        "reduction": {
            x: {v: {x2: str(c) for x2, c in table.items()}
                for (x1, v), table in sorted(P.red.items()) if x1 == x}
            for x in P.generators
        },
    }


def parse_cone(payload: Mapping, path: str = "cone") -> ConePresentation:
    _check_kind(payload, path, "cone")
    _check_fields(payload, path, ["name", "lattice", "generators", "supp_idem",
                                  "below", "rays", "reduction"], ["kind"])
    lat_obj = payload["lattice"]
    _check_fields(lat_obj, path + ".lattice", ["elements", "leq"])
    elements = _string_list(lat_obj["elements"], path + ".lattice.elements")
    leq_pairs = _pair_list(lat_obj["leq"], path + ".lattice.leq")
    try:
        lattice = Lattice(elements, leq_pairs)
    except ExtConeError as exc:
        raise SchemaError("%s.lattice: %s" % (path, exc)) from exc

    generators = _string_list(payload["generators"], path + ".generators")
    known = set(elements)
    gen_set = set(generators)
    if len(gen_set) != len(generators):
        raise SchemaError("%s.generators: duplicate generator id" % path)

    supp_obj = _free_object(payload["supp_idem"], path + ".supp_idem")
    supp_idem = {}
    for x, w in supp_obj.items():
        if x not in gen_set:
            raise SchemaError("%s.supp_idem.%s: unknown generator" % (path, x))
        w = _string(w, "%s.supp_idem.%s" % (path, x))
        if w not in known:
            raise SchemaError("%s.supp_idem.%s: unknown idempotent %r" % (path, x, w))
        supp_idem[x] = w
    for x in generators:
        if x not in supp_idem:
            raise SchemaError("%s.supp_idem.%s: missing entry" % (path, x))

    below = []
    for i, (x, w) in enumerate(_pair_list(payload["below"], path + ".below")):
        if x not in gen_set or w not in known:
            raise SchemaError("%s.below[%d]: unknown name (%s, %s)" % (path, i, x, w))
        below.append((x, w))

    rays_obj = _free_object(payload["rays"], path + ".rays")
    rays = {}
    for w, xs in rays_obj.items():
        if w not in known:
            raise SchemaError("%s.rays.%s: unknown idempotent" % (path, w))
        ray_list = _string_list(xs, "%s.rays.%s" % (path, w))
        for x in ray_list:
            if x not in gen_set:
                raise SchemaError("%s.rays.%s: unknown generator %r" % (path, w, x))
        rays[w] = tuple(ray_list)

    red_obj = _free_object(payload["reduction"], path + ".reduction")
    red = {}
    for x, by_stratum in red_obj.items():
        if x not in gen_set:
            raise SchemaError("%s.reduction.%s: unknown generator" % (path, x))
        _free_object(by_stratum, "%s.reduction.%s" % (path, x))
        for v, table in by_stratum.items():
            if v not in known:
                raise SchemaError("%s.reduction.%s.%s: unknown idempotent" % (path, x, v))
            entry_path = "%s.reduction.%s.%s" % (path, x, v)
            _free_object(table, entry_path)
            parsed = {}
            for x2, c in table.items():
                if x2 not in gen_set:
                    raise SchemaError("%s.%s: unknown generator" % (entry_path, x2))
                coeff = _fraction(c, "%s.%s" % (entry_path, x2))
                if coeff <= 0:
                    raise SchemaError("%s.%s: coefficients must be strictly "
                                      "positive (omit zero entries)" % (entry_path, x2))
                parsed[x2] = coeff
            red[(x, v)] = parsed
    return ConePresentation(name=_string(payload["name"], path + ".name"),
                            lattice=lattice, generators=tuple(generators),
                            supp_idem=supp_idem, below=frozenset(below),
                            rays=rays, red=red)


# ---------------------------------------------------------------------------
# element, function, and vector documents


def element_payload(y: ConeElement) -> Dict:
    return {"kind": "element", "support": y.support,
            "coeffs": {x: str(c) for x, c in y.coeffs}}


def _element_parts(P: ConePresentation, payload: Mapping, path: str,
                   allow_zero: bool) -> Tuple[str, Dict[str, Fraction]]:
    _check_kind(payload, path, "element")
    _check_fields(payload, path, ["support", "coeffs"], ["kind"])
    support = _string(payload["support"], path + ".support")
    if support not in P.lattice.elements:
        raise SchemaError("%s.support: unknown idempotent %r" % (path, support))
    coeffs_obj = _free_object(payload["coeffs"], path + ".coeffs")
    coeffs = {}
    for x, c in coeffs_obj.items():
        if x not in P.supp_idem:
            raise SchemaError("%s.coeffs.%s: unknown generator" % (path, x))
        coeff = _fraction(c, "%s.coeffs.%s" % (path, x))
        if coeff < 0 or (coeff == 0 and not allow_zero):
            raise SchemaError("%s.coeffs.%s: coefficients must be strictly "
                              "positive" % (path, x))
        if coeff > 0:
            coeffs[x] = coeff
    return support, coeffs


def parse_element(P: ConePresentation, payload: Mapping,
                  path: str = "element") -> ConeElement:
    support, coeffs = _element_parts(P, payload, path, allow_zero=False)
    element = ConeElement(support, tuple(sorted(coeffs.items())))
    if canonicalize(P, support, coeffs) != element:
        raise SchemaError("%s: document is not in canonical form; "
                          "run the canon command first" % path)
    return element


def parse_raw_element(P: ConePresentation, payload: Mapping,
                      path: str = "element") -> ConeElement:
    """Parse in raw mode (zero coefficients and absorbed terms allowed) and
    canonicalize; this is the reading used by the canon command."""
    support, coeffs = _element_parts(P, payload, path, allow_zero=True)
    return canonicalize(P, support, coeffs)


def function_payload(f: LscFn, *, kind: bool = True) -> Dict:
    payload = {"support": f.support,
               "values": {x: format_scalar(v) for x, v in f.values}}
    if kind:
        payload["kind"] = "function"
    return payload


def parse_function(P: ConePresentation, payload: Mapping,
                   path: str = "function") -> LscFn:
    _check_kind(payload, path, "function")
    _check_fields(payload, path, ["support", "values"], ["kind"])
    support = _string(payload["support"], path + ".support")
    values_obj = _free_object(payload["values"], path + ".values")
    values = {x: _scalar(v, "%s.values.%s" % (path, x))
              for x, v in values_obj.items()}
    try:
        return make_fn(P, support, values)
    except PreconditionError as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


def vector_payload(r: RieszVector) -> Dict:
    return {"kind": "vector", "values": {x: str(c) for x, c in r.values}}


def parse_vector(P: ConePresentation, payload: Mapping,
                 path: str = "vector") -> RieszVector:
    _check_kind(payload, path, "vector")
    _check_fields(payload, path, ["values"], ["kind"])
    values_obj = _free_object(payload["values"], path + ".values")
    values = {x: _fraction(v, "%s.values.%s" % (path, x))
              for x, v in values_obj.items()}
    try:
        return make_vector(P, values)
    except PreconditionError as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


def parse_probes(payload: Mapping, labels: Sequence[str],
                 path: str = "vector") -> List[Dict[str, Fraction]]:
    """Probe vectors for the triangle command: nonnegative integers keyed by
    the basis labels, either a single "values" map or a "vectors" array."""
    _check_kind(payload, path, "vector")
    _check_fields(payload, path, [], ["kind", "values", "vectors"])
    if ("values" in payload) == ("vectors" in payload):
        raise SchemaError("%s: provide exactly one of values, vectors" % path)
    rows = [payload["values"]] if "values" in payload else payload["vectors"]
    if not isinstance(rows, list):
        raise SchemaError("%s.vectors: expected an array" % path)
    out = []
    for i, row in enumerate(rows):
        row_path = "%s.vectors[%d]" % (path, i) if "vectors" in payload \
            else "%s.values" % path
        _free_object(row, row_path)
        probe = {}
        for label, v in row.items():
            if label not in labels:
                raise SchemaError("%s.%s: unknown basis label" % (row_path, label))
            value = _fraction(v, "%s.%s" % (row_path, label))
            if value < 0 or value.denominator != 1:
                raise SchemaError("%s.%s: probes must be nonnegative integers"
                                  % (row_path, label))
            probe[label] = value
        for label in labels:
            if label not in probe:
                raise SchemaError("%s.%s: missing entry" % (row_path, label))
        out.append(probe)
    return out


# ---------------------------------------------------------------------------
# diagram and system documents


def diagram_payload(D: BratteliDiagram) -> Dict:
    return {"kind": "diagram",
            "vertex_counts": list(D.vertex_counts),
            "edges": [[list(row) for row in mat] for mat in D.edges]}


def parse_diagram(payload: Mapping, path: str = "diagram") -> BratteliDiagram:
    _check_kind(payload, path, "diagram")
    _check_fields(payload, path, ["vertex_counts", "edges"], ["kind"])
    counts = payload["vertex_counts"]
    if not isinstance(counts, list):
        raise SchemaError("%s.vertex_counts: expected an array" % path)
    counts = [_integer(n, "%s.vertex_counts[%d]" % (path, i))
              for i, n in enumerate(counts)]
    edges_obj = payload["edges"]
    if not isinstance(edges_obj, list):
        raise SchemaError("%s.edges: expected an array" % path)
    edges = []
    for k, mat in enumerate(edges_obj):
        if not isinstance(mat, list) or not all(isinstance(row, list) for row in mat):
            raise SchemaError("%s.edges[%d]: expected an array of arrays" % (path, k))
        edges.append(tuple(
            tuple(_integer(e, "%s.edges[%d][%d][%d]" % (path, k, r, c))
                  for c, e in enumerate(row))
            for r, row in enumerate(mat)))
    try:
        return BratteliDiagram(tuple(counts), tuple(edges))
    except PreconditionError as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


def _matrix_payload(M: CuMatrix) -> Dict:
    cells: Dict[str, Dict[str, str]] = {}
    for (r, c), v in M.entries:
        cells.setdefault(r, {})[c] = str(v)
    return cells


def system_payload(system) -> Dict:
    direction = "inductive" if isinstance(system, InductiveSystem) else "projective"
    payload = {
        "kind": "system",
        "direction": direction,
        "stages": list(system.stage_keys),
        "labels": {k: list(v) for k, v in system.stage_labels.items()},
        "maps": [{"source": a, "target": b, "entries": _matrix_payload(M)}
                 for (a, b), M in sorted(system.maps.items())],
    }
    if system.stage_morphisms is not None:
        payload["images"] = {
            key: {label: (function_payload(f, kind=False)
                          if isinstance(f, LscFn) else f)
                  for label, f in sorted(system.stage_morphisms[key].items())}
            for key in system.stage_keys
        }
    return payload


def parse_system(payload: Mapping, path: str = "system"):
    _check_kind(payload, path, "system")
    _check_fields(payload, path, ["direction", "stages", "labels", "maps"],
                  ["kind", "images"])
    direction = _string(payload["direction"], path + ".direction")
    if direction not in ("inductive", "projective"):
        raise SchemaError("%s.direction: expected inductive or projective" % path)
    stages = _string_list(payload["stages"], path + ".stages")
    labels_obj = _free_object(payload["labels"], path + ".labels")
    labels = {k: tuple(_string_list(v, "%s.labels.%s" % (path, k)))
              for k, v in labels_obj.items()}
    maps_obj = payload["maps"]
    if not isinstance(maps_obj, list):
        raise SchemaError("%s.maps: expected an array" % path)
    maps = {}
    for i, entry in enumerate(maps_obj):
        entry_path = "%s.maps[%d]" % (path, i)
        _check_fields(entry, entry_path, ["source", "target", "entries"])
        a = _string(entry["source"], entry_path + ".source")
        b = _string(entry["target"], entry_path + ".target")
        if a not in labels or b not in labels:
            raise SchemaError("%s: unknown stage in (%s, %s)" % (entry_path, a, b))
        cells_obj = _free_object(entry["entries"], entry_path + ".entries")
        cells = {}
        for r, row in cells_obj.items():
            _free_object(row, "%s.entries.%s" % (entry_path, r))
            for c, v in row.items():
                cells[(r, c)] = _fraction(v, "%s.entries.%s.%s" % (entry_path, r, c))
        try:
            maps[(a, b)] = make_matrix(labels[b], labels[a], cells)
        except PreconditionError as exc:
            raise SchemaError("%s: %s" % (entry_path, exc)) from exc
    images = payload.get("images")
    if images is not None:
        _free_object(images, path + ".images")
    try:
        return make_system(direction, stages, labels, maps, images)
    except PreconditionError as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


# ---------------------------------------------------------------------------
# shipped fixture documents


def fixture_documents() -> Dict[str, Dict]:
    """Payloads of the files shipped under fixtures/, keyed by file name.

    The bundled cones and diagrams are generated from their in-code tables
    (whose docstrings document the backing models); the sample documents are
    small hand-written inputs for the command-line examples.
    """
    docs: Dict[str, Dict] = {}
    for name, P in sorted(all_fixtures().items()):
        docs["%s.cone" % name] = cone_payload(P)
    docs["car.bd"] = diagram_payload(car_diagram(6))
    docs["two_component.bd"] = diagram_payload(two_component_diagram(6))
    docs["quarter_plane_element.elt"] = {
        "kind": "element", "support": "bot",
        "coeffs": {"e1": "3/2", "e2": "1"}}
    docs["quarter_plane_raw.elt"] = {
        "kind": "element", "support": "p1",
        "coeffs": {"e1": "5", "e2": "2"}}
    docs["quarter_plane_function.fn"] = {
        "kind": "function", "support": "bot",
        "values": {"e1": "1", "e2": "2"}}
    docs["quarter_plane_vector.vec"] = {
        "kind": "vector", "values": {"e1": "1", "e2": "1/2"}}
    docs["lex_cone_element.elt"] = {
        "kind": "element", "support": "w", "coeffs": {"x2": "3/2"}}
    docs["half_line_morphism.fn"] = {
        "kind": "function", "support": "bot", "values": {"e": "1"}}
    docs["half_line_probes.vec"] = {
        "kind": "vector", "vectors": [{"s0": "2"}, {"s0": "5"}]}
    return docs


# ---------------------------------------------------------------------------
# command handlers


def _emit(args, payload: Mapping) -> None:
    text = dumps_document(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _require_cone(args) -> ConePresentation:
    if not args.cone:
        raise PreconditionError("this command needs --cone")
    P = parse_cone(_load_file(args.cone), path=args.cone)
    report = validate_presentation(P)
    if not report.ok:
        raise SchemaError("%s: presentation is invalid: %s"
                          % (args.cone, "; ".join(report.violations)))
    return P


def _typed_inputs(P: Optional[ConePresentation], args,
                  allowed: Sequence[str]) -> List[Tuple[str, object]]:
    out = []
    for path in args.inputs:
        kind = _extension_kind(path)
        if kind not in allowed:
            raise PreconditionError("input %s has kind %s; expected one of %s"
                                    % (path, kind, ", ".join(allowed)))
        payload = _load_file(path)
        if kind == "element":
            out.append((kind, parse_element(P, payload, path)))
        elif kind == "function":
            out.append((kind, parse_function(P, payload, path)))
        elif kind == "vector":
            out.append((kind, (payload, path)))
        elif kind == "diagram":
            out.append((kind, parse_diagram(payload, path)))
        elif kind == "system":
            out.append((kind, parse_system(payload, path)))
        else:
            out.append((kind, parse_cone(payload, path)))
    return out


def _exactly(args, count: int) -> None:
    if len(args.inputs) != count:
        raise PreconditionError("expected exactly %d --in arguments, got %d"
                                % (count, len(args.inputs)))


def _same_kind_pair(P, args, allowed):
    _exactly(args, 2)
    (k1, a), (k2, b) = _typed_inputs(P, args, allowed)
    if k1 != k2:
        raise PreconditionError("inputs must share one kind, got %s and %s" % (k1, k2))
    if k1 == "vector":
        a = parse_vector(P, a[0], a[1])
        b = parse_vector(P, b[0], b[1])
    return k1, a, b


def _cmd_validate(args) -> int:
    if not args.cone:
        raise PreconditionError("validate needs --cone")
    P = parse_cone(_load_file(args.cone), path=args.cone)
    report = validate_presentation(P)
    _emit(args, {"kind": "report", "report": "validation",
                 "name": P.name, "violations": list(report.violations)})
    return 0 if report.ok else 1


def _cmd_canon(args) -> int:
    P = _require_cone(args)
    _exactly(args, 1)
    path = args.inputs[0]
    if _extension_kind(path) != "element":
        raise PreconditionError("canon expects one element input")
    element = parse_raw_element(P, _load_file(path), path)
    _emit(args, element_payload(element))
    return 0


def _cmd_add(args) -> int:
    P = _require_cone(args)
    kind, a, b = _same_kind_pair(P, args, ("element", "function", "vector"))
    if kind == "element":
        _emit(args, element_payload(cone_add(P, a, b)))
    elif kind == "function":
        _emit(args, function_payload(afun_add(P, a, b)))
    else:
        _emit(args, vector_payload(a + b))
    return 0


def _cmd_leq(args) -> int:
    P = _require_cone(args)
    kind, a, b = _same_kind_pair(P, args, ("element", "function", "vector"))
    result = {"element": cone_leq, "function": afun_leq, "vector": riesz_leq}[kind](P, a, b)
    _emit(args, {"kind": "report", "report": "comparison",
                 "relation": "leq", "operands": kind, "result": bool(result)})
    return 0


def _cmd_meet(args) -> int:
    P = _require_cone(args)
    kind, a, b = _same_kind_pair(P, args, ("element", "function"))
    if kind == "element":
        _emit(args, element_payload(element_meet(P, a, b)))
    else:
        _emit(args, function_payload(afun_meet(P, a, b)))
    return 0


def _cmd_eval(args) -> int:
    P = _require_cone(args)
    _exactly(args, 2)
    parsed = dict(_typed_inputs(P, args, ("function", "element")))
    if set(parsed) != {"function", "element"}:
        raise PreconditionError("eval expects one function and one element")
    value = afun_eval(P, parsed["function"], parsed["element"])
    _emit(args, {"kind": "report", "report": "evaluation",
                 "value": format_scalar(value)})
    return 0


def _cmd_pair(args) -> int:
    P = _require_cone(args)
    _exactly(args, 2)
    parsed = dict(_typed_inputs(P, args, ("element", "vector")))
    if set(parsed) != {"element", "vector"}:
        raise PreconditionError("pair expects one element and one vector")
    vector = parse_vector(P, *parsed["vector"])
    value = pairing(P, parsed["element"], vector)
    _emit(args, {"kind": "report", "report": "pairing",
                 "value": format_scalar(value)})
    return 0


def _cmd_interpolate(args) -> int:
    P = _require_cone(args)
    _exactly(args, 4)
    vectors = [parse_vector(P, payload, path)
               for _, (payload, path) in _typed_inputs(P, args, ("vector",))]
    h = interpolate(P, vectors[:2], vectors[2:])
    _emit(args, vector_payload(h))
    _note("interpolant found between two lower and two upper vectors")
    return 0


def _cmd_decompose(args) -> int:
    P = _require_cone(args)
    _exactly(args, 3)
    fns = [f for _, f in _typed_inputs(P, args, ("function",))]
    h1, h2 = riesz_decompose(P, fns[0], fns[1], fns[2])
    _emit(args, {"kind": "report", "report": "decomposition",
                 "parts": [function_payload(h1), function_payload(h2)]})
    return 0


def _factorization_payload(result: TriangleResult) -> Dict:
    stage_images = []
    for label in result.stage_labels:
        entry = function_payload(result.images[label], kind=False)
        entry["label"] = label
        stage_images.append(entry)
    return {
        "kind": "report",
        "report": "factorization",
        "generators": list(result.domain_labels),
        "stages": stage_images,
        "Q": [[str(result.matrix.entry(r, c)) for c in result.domain_labels]
              for r in result.stage_labels],
    }


def _cmd_triangle(args) -> int:
    P = _require_cone(args)
    if len(args.inputs) < 2:
        raise PreconditionError("triangle expects function inputs plus one "
                                "probe vector input")
    functions: List[LscFn] = []
    probe_docs = []
    for kind, value in _typed_inputs(P, args, ("function", "vector")):
        if kind == "function":
            functions.append(value)
        else:
            probe_docs.append(value)
    if not functions or len(probe_docs) != 1:
        raise PreconditionError("triangle expects at least one function and "
                                "exactly one probe vector input")
    labels = ["s%d" % i for i in range(len(functions))]
    probes = parse_probes(probe_docs[0][0], labels, probe_docs[0][1])
    result = triangle(P, dict(zip(labels, functions)), labels, probes)
    factored = sum(1 for run in result.runs if not run.skipped)
    _note("factored %d way-below pairs through %d stage coordinates"
          % (factored, len(result.stage_labels)))
    _emit(args, _factorization_payload(result))
    return 0


def _cmd_factor_system(args) -> int:
    P = _require_cone(args)
    if args.inputs:
        sample = [f for _, f in _typed_inputs(P, args, ("function",))]
    else:
        sample = seed_functions(P, args.samples if args.samples else 4)
    rounds = args.depth if args.depth is not None else 2
    system = build_inductive_system(P, sample, rounds=rounds)
    _note("built %d stages over %d sampled functions"
          % (len(system.stage_keys), len(sample)))
    _emit(args, system_payload(system))
    return 0


def _cmd_dualize(args) -> int:
    _exactly(args, 1)
    (_, system), = _typed_inputs(None, args, ("system",))
    _emit(args, system_payload(dualize(system)))
    return 0


def _cmd_bratteli(args) -> int:
    _exactly(args, 1)
    (_, diagram), = _typed_inputs(None, args, ("diagram",))
    depth = args.depth if args.depth is not None else diagram.depth
    system, _dual = bratteli_import(diagram, depth)
    counts = [idempotent_count(diagram, k) for k in range(depth + 1)]
    _note("imported %d levels; stage idempotent counts: %s"
          % (depth + 1, ", ".join(str(c) for c in counts)))
    _emit(args, system_payload(system))
    return 0


def _cmd_roundtrip(args) -> int:
    P = _require_cone(args)
    report = roundtrip_check(P, samples=args.samples if args.samples else 6,
                             seed=args.seed)
    payload = {"kind": "report", "report": "roundtrip", "name": P.name}
    payload.update(report)
    _emit(args, payload)
    _note("every sampled element threads the dual system exactly")
    return 0


def _cmd_selftest(args) -> int:
    for name, P in sorted(all_fixtures().items()):
        report = validate_presentation(P)
        if not report.ok:
            _note("bundled cone %s fails validation: %s"
                  % (name, "; ".join(report.violations)))
            return 1
    results = []
    for suite in props.suite_names():
        result = props.run_suite(suite, seed=args.seed, count=args.samples)
        _note(result.line())
        results.append(result)
    payload = {
        "kind": "report", "report": "selftest", "seed": args.seed,
        "suites": [{"name": r.name, "checked": r.checked, "failed": r.failed,
                    "failures": list(r.failures)} for r in results],
    }
    _emit(args, payload)
    return 3 if any(r.failed for r in results) else 0


_COMMANDS = {
    "validate": (_cmd_validate, "check every structural invariant of a cone"),
    "canon": (_cmd_canon, "canonicalize a raw element document"),
    "add": (_cmd_add, "add two elements, functions, or vectors"),
    "leq": (_cmd_leq, "compare two elements, functions, or vectors"),
    "meet": (_cmd_meet, "meet of two elements or two functions"),
    "eval": (_cmd_eval, "evaluate a function at an element"),
    "pair": (_cmd_pair, "pair an element with a positive vector"),
    "interpolate": (_cmd_interpolate, "interpolate two lower and two upper vectors"),
    "decompose": (_cmd_decompose, "split a function under a sum of two bounds"),
    "triangle": (_cmd_triangle, "factor way-below probe pairs through a matrix"),
    "factor-system": (_cmd_factor_system, "build the inductive system of a cone"),
    "dualize": (_cmd_dualize, "transpose a limit system"),
    "bratteli": (_cmd_bratteli, "import a Bratteli diagram as a limit system"),
    "roundtrip": (_cmd_roundtrip, "check duality threads for sampled elements"),
    "selftest": (_cmd_selftest, "run every invariant suite on bundled cones"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extcone",
        description="Exact computations on finitely generated extended "
                    "Choquet cones.")
    subparsers = parser.add_subparsers(dest="command", required=True,
                                       metavar="subcommand")
    for name, (handler, help_text) in _COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--cone", metavar="FILE", help="cone document (.cone)")
        sub.add_argument("--in", dest="inputs", metavar="FILE", default=[],
                         action="append", help="input document (repeatable)")
        sub.add_argument("--out", metavar="FILE",
                         help="write the result document here instead of stdout")
        sub.add_argument("--depth", type=int, default=None,
                         help="truncation depth (bratteli) or build rounds "
                              "(factor-system)")
        sub.add_argument("--samples", type=int, default=None,
                         help="sample count where the command draws instances")
        sub.add_argument("--seed", type=int, default=0,
                         help="seed for any sampled instances")
        sub.set_defaults(handler=handler)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except SchemaError as exc:
        _note("schema error: %s" % exc)
        return 1
    except PreconditionError as exc:
        _note("precondition violated: %s" % exc)
        return 2
    except ExtConeError as exc:
        _note("invariant breach: %s" % exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
