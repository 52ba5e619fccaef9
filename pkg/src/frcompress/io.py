"""Versioned JSON documents for systems, compression states and edits.

Grammar (``format_version`` "1"); every fuzzy value is a decimal *string*::

    system:  {"format_version": "1", "kind": "system", "provenance"?: str,
              "universe": [label, ...],
              "relations": {name: [[value, ...], ...], ...}}

    state:   {"format_version": "1", "kind": "state", "mode": "row"|"strict",
              "epsilon": str|null, "image_prefix": str,
              "system": <system>, "partitions": {name: [[label, ...], ...]},
              "combined": [[label, ...], ...], "assignment": {label: image_label},
              "image": <system>, "consistency": {name: bool},
              "last_edit": null | {"kind": str, "fallback": bool,
                                   "reason": str|null, "partitions_computed": int}}

    edits:   {"kind": "add-relations", "relations": {name: matrix}}
             {"kind": "remove-relations", "names": [name, ...]}
             {"kind": "add-objects", "new_objects": [label, ...],
              "part2": {name: n x t matrix}, "part3": {name: t x (n+t) matrix}}
             {"kind": "remove-objects", "objects": [label, ...]}

Relation order is the key order of ``relations``. Numbers are accepted on
input but always written back as strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Any, Mapping, Union

from .core import (
    FuzzyRelation,
    FuzzyValueError,
    Partition,
    RelationSystem,
    fuzzy_value,
    make_universe,
    validate_system,
)
from .dynamics import (
    CompressionState,
    EditTrace,
    ObjectExtension,
    add_objects,
    add_relations,
    remove_objects,
    remove_relations,
)
from .homomorphism import QuotientMap, is_consistent, quotient_map
from .partitioning import PartitionCache, check_mode, meet_all

FORMAT_VERSION = "1"
FIXTURES = Path(__file__).parent / "fixtures"
EDIT_KINDS = ("add-relations", "remove-relations", "add-objects", "remove-objects")

PathLike = Union[str, Path]


class DocumentError(ValueError):
    """A document cannot be parsed or does not describe a valid object."""


def _fail(where: str, field: str, msg: str) -> DocumentError:
    return DocumentError(f"{where}: {field}: {msg}")


# --- text ---------------------------------------------------------------


def _is_flat(x: Any) -> bool:
    return isinstance(x, list) and all(not isinstance(v, (list, dict)) for v in x)


def _render(x: Any, indent: int) -> str:
    pad, inner = " " * indent, " " * (indent + 2)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_render(v, indent + 2)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, list) and x and not _is_flat(x):
        return "[\n" + ",\n".join(inner + _render(v, indent + 2) for v in x) + "\n" + pad + "]"
    return json.dumps(x)


def dumps(doc: Mapping) -> str:
    """Deterministic text: nested structure indented, scalar lists on one line."""
    return _render(doc, 0) + "\n"


def loads(text: str, where: str = "<document>") -> dict:
    try:
        doc = json.loads(text, parse_float=Decimal, parse_int=Decimal)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{where}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise _fail(where, "<root>", "expected a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise _fail(where, "format_version", f"unsupported version {version!r} (expected {FORMAT_VERSION!r})")
    return doc


def _read(path: PathLike) -> dict:
    return loads(Path(path).read_text(encoding="utf-8"), str(path))


def _write(doc: Mapping, path: PathLike) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


# --- systems --------------------------------------------------------------


def _matrix_out(R: FuzzyRelation) -> list[list[str]]:
    return [[str(v) for v in row] for row in R.matrix]


def system_to_document(sys: RelationSystem, *, provenance: str | None = None) -> dict:
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION, "kind": "system"}
    if provenance:
        doc["provenance"] = provenance
    doc["universe"] = list(sys.labels)
    doc["relations"] = {R.name: _matrix_out(R) for R in sys.relations}
    return doc


def _labels(value: Any, where: str, field: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise _fail(where, field, "expected a list of strings")
    return value


def _matrix_in(value: Any, where: str, field: str, rows: list[str] | None = None, cols: list[str] | None = None):
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise _fail(where, field, "expected a list of rows")
    out = []
    for i, row in enumerate(value):
        parsed = []
        for j, v in enumerate(row):
            r = rows[i] if rows and i < len(rows) else str(i)
            c = cols[j] if cols and j < len(cols) else str(j)
            if not isinstance(v, (str, Decimal)):
                raise _fail(where, f"{field}[{r}][{c}]", f"expected a decimal string, got {v!r}")
            try:
                parsed.append(fuzzy_value(v))
            except FuzzyValueError as exc:
                raise _fail(where, f"{field}[{r}][{c}]", str(exc)) from None
        out.append(tuple(parsed))
    return tuple(out)


def system_from_document(doc: Mapping, where: str = "<document>") -> RelationSystem:
    if doc.get("kind", "system") != "system":
        raise _fail(where, "kind", f"expected 'system', got {doc.get('kind')!r}")
    universe = _labels(doc.get("universe"), where, "universe")
    rels = doc.get("relations")
    if not isinstance(rels, dict):
        raise _fail(where, "relations", "expected an object mapping names to matrices")
    sys = RelationSystem(
        make_universe(universe),
        tuple(
            FuzzyRelation(name, _matrix_in(m, where, f"relations.{name}", universe, universe))
            for name, m in rels.items()
        ),
    )
    problems = validate_system(sys)
    if problems:
        v = problems[0]
        field = f"relations.{v.where}" if v.kind in ("shape", "value") else v.where
        raise _fail(where, field, f"{v.kind}: {v.detail}")
    return sys


def load_system(path: PathLike) -> RelationSystem:
    return system_from_document(_read(path), str(path))


def save_system(sys: RelationSystem, path: PathLike, *, provenance: str | None = None) -> None:
    _write(system_to_document(sys, provenance=provenance), path)


# --- states ---------------------------------------------------------------


def state_to_document(state: CompressionState) -> dict:
    trace = state.trace
    return {
        "format_version": FORMAT_VERSION,
        "kind": "state",
        "mode": state.mode,
        "epsilon": None if state.epsilon is None else str(state.epsilon),
        "image_prefix": state.image_prefix,
        "system": system_to_document(state.source),
        "partitions": {k: p.as_labels() for k, p in state.cache.per_relation.items()},
        "combined": state.cache.combined.as_labels(),
        "assignment": dict(state.map.assignment),
        "image": system_to_document(state.image),
        "consistency": {k: r.consistent for k, r in state.consistency.items()},
        "last_edit": None
        if trace is None
        else {
            "kind": trace.kind,
            "fallback": trace.fallback,
            "reason": trace.reason,
            "partitions_computed": trace.partitions_computed,
        },
    }


def _partition_in(value: Any, universe, where: str, field: str) -> Partition:
    if not isinstance(value, list):
        raise _fail(where, field, "expected a list of blocks")
    try:
        return Partition.from_labels(universe, [_labels(b, where, field) for b in value])
    except (ValueError, LookupError) as exc:
        raise _fail(where, field, str(exc)) from None


def state_from_document(doc: Mapping, where: str = "<document>") -> CompressionState:
    if doc.get("kind") != "state":
        raise _fail(where, "kind", f"expected 'state', got {doc.get('kind')!r}")
    try:
        mode = check_mode(doc.get("mode"))
    except ValueError as exc:
        raise _fail(where, "mode", str(exc)) from None
    eps = doc.get("epsilon")
    epsilon = None if eps is None else Decimal(str(eps))
    prefix = doc.get("image_prefix", "y")
    source = system_from_document(doc.get("system", {}), f"{where} (system)")
    image = system_from_document(doc.get("image", {}), f"{where} (image)")
    parts_doc = doc.get("partitions")
    if not isinstance(parts_doc, dict) or list(parts_doc) != list(source.names):
        raise _fail(where, "partitions", "expected one partition per relation, in relation order")
    per = {k: _partition_in(v, source.universe, where, f"partitions.{k}") for k, v in parts_doc.items()}
    combined = _partition_in(doc.get("combined"), source.universe, where, "combined")
    if combined != meet_all(per.values(), source.universe):
        raise _fail(where, "combined", "is not the meet of the per-relation partitions")
    f: QuotientMap = quotient_map(source.universe, combined, prefix)
    if doc.get("assignment") != f.assignment:
        raise _fail(where, "assignment", "does not match the combined partition")
    if image.labels != tuple(y.label for y in f.image_universe) or image.names != source.names:
        raise _fail(where, "image", "universe or relation names do not match the quotient map")
    reports = {R.name: is_consistent(f, R, epsilon=epsilon) for R in source.relations}
    flags = doc.get("consistency", {})
    if flags != {k: r.consistent for k, r in reports.items()}:
        raise _fail(where, "consistency", "flags disagree with the stored system")
    last = doc.get("last_edit")
    trace = None
    if last is not None:
        trace = EditTrace(
            kind=last["kind"],
            fallback=bool(last["fallback"]),
            reason=last.get("reason"),
            partitions_computed=int(last.get("partitions_computed", 0)),
        )
    return CompressionState(
        source, image, f, PartitionCache(per, combined, mode), reports, mode, epsilon, prefix, trace
    )


def load_state(path: PathLike) -> CompressionState:
    return state_from_document(_read(path), str(path))


def save_state(state: CompressionState, path: PathLike) -> None:
    _write(state_to_document(state), path)


# --- edits ----------------------------------------------------------------


@dataclass(frozen=True)
class Edit:
    kind: str
    payload: Any


def edit_to_document(edit: Edit, *, provenance: str | None = None) -> dict:
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION, "kind": edit.kind}
    if provenance:
        doc["provenance"] = provenance
    p = edit.payload
    if edit.kind == "add-relations":
        doc["relations"] = {R.name: _matrix_out(R) for R in p}
    elif edit.kind == "remove-relations":
        doc["names"] = list(p)
    elif edit.kind == "add-objects":
        doc["new_objects"] = list(p.new_objects)
        doc["part2"] = {k: [[str(v) for v in r] for r in m] for k, m in p.part2.items()}
        doc["part3"] = {k: [[str(v) for v in r] for r in m] for k, m in p.part3.items()}
    elif edit.kind == "remove-objects":
        doc["objects"] = list(p)
    else:
        raise ValueError(f"unknown edit kind {edit.kind!r}")
    return doc


def edit_from_document(doc: Mapping, where: str = "<document>") -> Edit:
    kind = doc.get("kind")
    if kind == "add-relations":
        rels = doc.get("relations")
        if not isinstance(rels, dict):
            raise _fail(where, "relations", "expected an object mapping names to matrices")
        return Edit(
            kind, tuple(FuzzyRelation(k, _matrix_in(m, where, f"relations.{k}")) for k, m in rels.items())
        )
    if kind == "remove-relations":
        return Edit(kind, tuple(_labels(doc.get("names"), where, "names")))
    if kind == "add-objects":
        new = _labels(doc.get("new_objects"), where, "new_objects")
        parts = {}
        for part in ("part2", "part3"):
            blocks = doc.get(part)
            if not isinstance(blocks, dict):
                raise _fail(where, part, "expected an object mapping names to matrices")
            parts[part] = {k: _matrix_in(m, where, f"{part}.{k}") for k, m in blocks.items()}
        return Edit(kind, ObjectExtension(tuple(new), parts["part2"], parts["part3"]))
    if kind == "remove-objects":
        return Edit(kind, tuple(_labels(doc.get("objects"), where, "objects")))
    raise _fail(where, "kind", f"expected one of {EDIT_KINDS}, got {kind!r}")


def load_edit(path: PathLike) -> Edit:
    return edit_from_document(_read(path), str(path))


def save_edit(edit: Edit, path: PathLike, *, provenance: str | None = None) -> None:
    _write(edit_to_document(edit, provenance=provenance), path)


def apply_edit(state: CompressionState, edit: Edit, **kwargs) -> CompressionState:
    ops = {
        "add-relations": add_relations,
        "remove-relations": remove_relations,
        "add-objects": add_objects,
        "remove-objects": remove_objects,
    }
    return ops[edit.kind](state, edit.payload, **kwargs)


# --- fixtures -------------------------------------------------------------


def fixture_path(name: str) -> Path:
    path = FIXTURES / f"{name}.json"
    if not path.exists():
        known = sorted(p.stem for p in FIXTURES.glob("*.json"))
        raise FileNotFoundError(f"no fixture {name!r}; known: {', '.join(known)}")
    return path


def load_fixture(name: str) -> RelationSystem:
    return load_system(fixture_path(name))


def load_fixture_edit(name: str) -> Edit:
    return load_edit(fixture_path(name))
