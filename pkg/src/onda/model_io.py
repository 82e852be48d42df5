"""Canonical JSON project documents and lossless (de)serialization.

The wire format is versioned JSON with a fixed key order, UTF-8 and LF line
endings, so equal documents always serialize to identical bytes. Unknown
fields are rejected everywhere except inside ``meta``, which is free-form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .er_model import (
    Attribute,
    CanvasPoint,
    Diagram,
    Entity,
    Hierarchy,
    LogicalType,
    MaxCard,
    RelEnd,
    Relationship,
    Strategy,
    TypeKind,
)

__all__ = [
    "FORMAT_VERSION",
    "ProjectDocument",
    "ProjectParseError",
    "UnsupportedVersionError",
    "parse_project",
    "document_from_obj",
    "document_to_obj",
    "emit_project",
]

FORMAT_VERSION = 1


class ProjectParseError(ValueError):
    """A document could not be decoded; carries a path or line when known."""

    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        location = ""
        if path is not None:
            location = f" at {path}"
        elif line is not None:
            location = f" at line {line}, column {column}"
        super().__init__(message + location)
        self.path = path
        self.line = line
        self.column = column


class UnsupportedVersionError(ProjectParseError):
    pass


@dataclass(frozen=True)
class ProjectDocument:
    diagram: Diagram
    meta: dict[str, str] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self) -> None:
        object.__setattr__(self, "meta", dict(self.meta))


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise ProjectParseError(f"missing required field {key!r}", path=path)
    return obj[key]


def _check_keys(obj: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ProjectParseError(f"unknown field {key!r}", path=path)


def _as_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ProjectParseError(f"expected an object, got {type(value).__name__}", path=path)
    return value


def _as_array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ProjectParseError(f"expected an array, got {type(value).__name__}", path=path)
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ProjectParseError(f"expected a string, got {type(value).__name__}", path=path)
    return value


def _as_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ProjectParseError(f"expected a boolean, got {type(value).__name__}", path=path)
    return value


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProjectParseError(f"expected an integer, got {type(value).__name__}", path=path)
    return value


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProjectParseError(f"expected a number, got {type(value).__name__}", path=path)
    return float(value)


def _parse_type(value: Any, path: str) -> LogicalType:
    obj = _as_object(value, path)
    _check_keys(obj, ("kind", "length", "precision", "scale"), path)
    kind_token = _as_str(_require(obj, "kind", path), path + ".kind")
    try:
        kind = TypeKind(kind_token)
    except ValueError:
        raise ProjectParseError(f"unknown type kind {kind_token!r}", path=path + ".kind") from None
    params = {}
    for name in ("length", "precision", "scale"):
        if name in obj:
            params[name] = _as_int(obj[name], f"{path}.{name}")
    try:
        return LogicalType(kind, **params)
    except ValueError as exc:
        raise ProjectParseError(str(exc), path=path) from None


def _parse_attribute(value: Any, path: str) -> Attribute:
    obj = _as_object(value, path)
    _check_keys(obj, ("name", "type", "pk", "pid", "mandatory", "unique", "auto", "check"), path)
    flags = {}
    for json_key, attr_key in (
        ("pk", "is_pk"),
        ("pid", "is_partial_id"),
        ("mandatory", "mandatory"),
        ("unique", "unique"),
        ("auto", "auto_increment"),
    ):
        if json_key in obj:
            flags[attr_key] = _as_bool(obj[json_key], f"{path}.{json_key}")
    check = None
    if "check" in obj:
        check = _as_str(obj["check"], path + ".check")
    return Attribute(
        name=_as_str(_require(obj, "name", path), path + ".name"),
        logical_type=_parse_type(_require(obj, "type", path), path + ".type"),
        check_sql=check,
        **flags,
    )


def _parse_end(value: Any, path: str) -> RelEnd:
    obj = _as_object(value, path)
    _check_keys(obj, ("entity", "min", "max", "role"), path)
    min_card = _as_int(_require(obj, "min", path), path + ".min")
    if min_card not in (0, 1):
        raise ProjectParseError("min cardinality must be 0 or 1", path=path + ".min")
    max_token = _as_str(_require(obj, "max", path), path + ".max")
    try:
        max_card = MaxCard(max_token)
    except ValueError:
        raise ProjectParseError('max cardinality must be "1" or "N"', path=path + ".max") from None
    role = _as_str(obj["role"], path + ".role") if "role" in obj else None
    return RelEnd(
        entity_id=_as_str(_require(obj, "entity", path), path + ".entity"),
        min_card=min_card,
        max_card=max_card,
        role=role,
    )


def parse_project(data: bytes | str) -> ProjectDocument:
    """Decode project bytes into a document, rejecting anything off-schema."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProjectParseError(f"document is not valid UTF-8: {exc}") from None
    else:
        text = data
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProjectParseError(
            f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from None
    return document_from_obj(root)


def document_from_obj(root: object) -> ProjectDocument:
    """Build a document from an already-decoded JSON tree (same checks)."""
    top = _as_object(root, "$")
    _check_keys(top, ("format_version", "meta", "diagram"), "$")
    version = _as_int(_require(top, "format_version", "$"), "$.format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported format_version {version}; this build reads up to {FORMAT_VERSION}",
            path="$.format_version",
        )

    meta: dict[str, str] = {}
    if "meta" in top:
        for key, value in _as_object(top["meta"], "$.meta").items():
            meta[key] = _as_str(value, f"$.meta.{key}")

    dia = _as_object(_require(top, "diagram", "$"), "$.diagram")
    _check_keys(dia, ("name", "entities", "relationships", "hierarchies", "geometry"), "$.diagram")
    name = _as_str(dia.get("name", "untitled"), "$.diagram.name")

    entities = []
    for i, item in enumerate(_as_array(dia.get("entities", []), "$.diagram.entities")):
        path = f"$.diagram.entities[{i}]"
        obj = _as_object(item, path)
        _check_keys(obj, ("id", "name", "weak", "attributes"), path)
        attrs = [
            _parse_attribute(a, f"{path}.attributes[{j}]")
            for j, a in enumerate(_as_array(obj.get("attributes", []), path + ".attributes"))
        ]
        entities.append(
            Entity(
                id=_as_str(_require(obj, "id", path), path + ".id"),
                name=_as_str(_require(obj, "name", path), path + ".name"),
                attributes=tuple(attrs),
                is_weak=_as_bool(obj["weak"], path + ".weak") if "weak" in obj else False,
            )
        )

    relationships = []
    for i, item in enumerate(_as_array(dia.get("relationships", []), "$.diagram.relationships")):
        path = f"$.diagram.relationships[{i}]"
        obj = _as_object(item, path)
        _check_keys(obj, ("id", "name", "ends", "attributes"), path)
        ends = _as_array(_require(obj, "ends", path), path + ".ends")
        if len(ends) != 2:
            raise ProjectParseError("a relationship has exactly two ends", path=path + ".ends")
        attrs = [
            _parse_attribute(a, f"{path}.attributes[{j}]")
            for j, a in enumerate(_as_array(obj.get("attributes", []), path + ".attributes"))
        ]
        relationships.append(
            Relationship(
                id=_as_str(_require(obj, "id", path), path + ".id"),
                name=_as_str(_require(obj, "name", path), path + ".name"),
                end_a=_parse_end(ends[0], path + ".ends[0]"),
                end_b=_parse_end(ends[1], path + ".ends[1]"),
                attributes=tuple(attrs),
            )
        )

    hierarchies = []
    for i, item in enumerate(_as_array(dia.get("hierarchies", []), "$.diagram.hierarchies")):
        path = f"$.diagram.hierarchies[{i}]"
        obj = _as_object(item, path)
        _check_keys(obj, ("id", "super", "subs", "strategy"), path)
        subs = [
            _as_str(s, f"{path}.subs[{j}]")
            for j, s in enumerate(_as_array(_require(obj, "subs", path), path + ".subs"))
        ]
        if not subs:
            raise ProjectParseError("a hierarchy needs at least one sub-entity", path=path + ".subs")
        strategy_token = _as_str(_require(obj, "strategy", path), path + ".strategy")
        try:
            strategy = Strategy(strategy_token)
        except ValueError:
            raise ProjectParseError(
                f"unknown strategy {strategy_token!r}", path=path + ".strategy"
            ) from None
        hierarchies.append(
            Hierarchy(
                id=_as_str(_require(obj, "id", path), path + ".id"),
                super_id=_as_str(_require(obj, "super", path), path + ".super"),
                sub_ids=tuple(subs),
                strategy=strategy,
            )
        )

    geometry: dict[str, CanvasPoint] = {}
    if "geometry" in dia:
        for key, value in _as_object(dia["geometry"], "$.diagram.geometry").items():
            path = f"$.diagram.geometry.{key}"
            obj = _as_object(value, path)
            _check_keys(obj, ("x", "y"), path)
            try:
                geometry[key] = CanvasPoint(
                    x=_as_number(_require(obj, "x", path), path + ".x"),
                    y=_as_number(_require(obj, "y", path), path + ".y"),
                )
            except ValueError as exc:
                raise ProjectParseError(str(exc), path=path) from None

    diagram = Diagram(
        name=name,
        entities=tuple(entities),
        relationships=tuple(relationships),
        hierarchies=tuple(hierarchies),
        geometry=geometry,
        format_version=version,
    )
    return ProjectDocument(diagram=diagram, meta=meta, format_version=version)


def _type_obj(t: LogicalType) -> dict:
    obj: dict[str, Any] = {"kind": t.kind.value}
    if t.length is not None:
        obj["length"] = t.length
    if t.precision is not None:
        obj["precision"] = t.precision
    if t.scale is not None:
        obj["scale"] = t.scale
    return obj


def _attribute_obj(a: Attribute) -> dict:
    obj: dict[str, Any] = {
        "name": a.name,
        "type": _type_obj(a.logical_type),
        "pk": a.is_pk,
        "pid": a.is_partial_id,
        "mandatory": a.mandatory,
        "unique": a.unique,
        "auto": a.auto_increment,
    }
    if a.check_sql is not None:
        obj["check"] = a.check_sql
    return obj


def _end_obj(end: RelEnd) -> dict:
    obj: dict[str, Any] = {"entity": end.entity_id, "min": end.min_card, "max": end.max_card.value}
    if end.role is not None:
        obj["role"] = end.role
    return obj


def document_to_obj(doc: ProjectDocument) -> dict:
    """Build the canonical JSON object tree for a document."""
    d = doc.diagram
    return {
        "format_version": doc.format_version,
        "meta": dict(doc.meta),
        "diagram": {
            "name": d.name,
            "entities": [
                {
                    "id": e.id,
                    "name": e.name,
                    "weak": e.is_weak,
                    "attributes": [_attribute_obj(a) for a in e.attributes],
                }
                for e in d.entities
            ],
            "relationships": [
                {
                    "id": r.id,
                    "name": r.name,
                    "ends": [_end_obj(r.end_a), _end_obj(r.end_b)],
                    "attributes": [_attribute_obj(a) for a in r.attributes],
                }
                for r in d.relationships
            ],
            "hierarchies": [
                {
                    "id": h.id,
                    "super": h.super_id,
                    "subs": list(h.sub_ids),
                    "strategy": h.strategy.value,
                }
                for h in d.hierarchies
            ],
            "geometry": {
                key: {"x": point.x, "y": point.y}
                for key, point in sorted(d.geometry.items())
            },
        },
    }


def emit_project(doc: ProjectDocument) -> bytes:
    """Serialize a document to canonical bytes; equal inputs give equal bytes."""
    text = json.dumps(document_to_obj(doc), ensure_ascii=False, indent=2)
    return (text + "\n").encode("utf-8")
