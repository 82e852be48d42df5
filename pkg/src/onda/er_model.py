"""Conceptual ER domain model: entities, relationships, hierarchies, validation.

Values are immutable after construction; every operation here is a pure
function, safe to call concurrently. Semantic problems are reported through
:func:`validate`, never raised, so diagrams under construction in an editor
can always be represented.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "TypeKind",
    "LogicalType",
    "Attribute",
    "Entity",
    "MaxCard",
    "RelEnd",
    "Relationship",
    "Strategy",
    "Hierarchy",
    "CanvasPoint",
    "Diagram",
    "Severity",
    "Finding",
    "ValidationReport",
    "sql_name",
    "validate",
    "weak_owner_of",
]


class TypeKind(str, Enum):
    INTEGER = "integer"
    BIGINT = "bigint"
    FLOAT = "float"
    NUMERIC = "numeric"
    VARCHAR = "varchar"
    TEXT = "text"
    BOOLEAN = "boolean"
    DATE = "date"
    TIMESTAMP = "timestamp"


@dataclass(frozen=True)
class LogicalType:
    """A column type; length applies to VARCHAR, precision/scale to NUMERIC."""

    kind: TypeKind
    length: int | None = None
    precision: int | None = None
    scale: int | None = None

    def __post_init__(self) -> None:
        if self.kind is TypeKind.VARCHAR:
            if self.length is None or self.length < 1:
                raise ValueError("varchar requires length >= 1")
            if self.precision is not None or self.scale is not None:
                raise ValueError("varchar carries no precision/scale")
        elif self.kind is TypeKind.NUMERIC:
            if self.precision is None or self.precision < 1:
                raise ValueError("numeric requires precision >= 1")
            if self.scale is None or not (0 <= self.scale <= self.precision):
                raise ValueError("numeric requires 0 <= scale <= precision")
            if self.length is not None:
                raise ValueError("numeric carries no length")
        else:
            if self.length is not None or self.precision is not None or self.scale is not None:
                raise ValueError(f"{self.kind.value} carries no type parameters")


@dataclass(frozen=True)
class Attribute:
    name: str
    logical_type: LogicalType
    is_pk: bool = False
    is_partial_id: bool = False
    mandatory: bool = False
    unique: bool = False
    auto_increment: bool = False
    check_sql: str | None = None


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    attributes: tuple[Attribute, ...] = ()
    is_weak: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))


class MaxCard(str, Enum):
    ONE = "1"
    MANY = "N"


@dataclass(frozen=True)
class RelEnd:
    entity_id: str
    min_card: int
    max_card: MaxCard
    role: str | None = None

    def __post_init__(self) -> None:
        if self.min_card not in (0, 1):
            raise ValueError("min cardinality must be 0 or 1")


@dataclass(frozen=True)
class Relationship:
    id: str
    name: str
    end_a: RelEnd
    end_b: RelEnd
    attributes: tuple[Attribute, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))

    @property
    def ends(self) -> tuple[RelEnd, RelEnd]:
        return (self.end_a, self.end_b)

    @property
    def is_self(self) -> bool:
        return self.end_a.entity_id == self.end_b.entity_id


class Strategy(str, Enum):
    COMPLETE = "complete"
    CONCRETE = "concrete"
    SINGLE = "single"


@dataclass(frozen=True)
class Hierarchy:
    id: str
    super_id: str
    sub_ids: tuple[str, ...]
    strategy: Strategy

    def __post_init__(self) -> None:
        object.__setattr__(self, "sub_ids", tuple(self.sub_ids))
        if not self.sub_ids:
            raise ValueError("hierarchy requires at least one sub-entity")


@dataclass(frozen=True)
class CanvasPoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        for v in (self.x, self.y):
            if not isinstance(v, (int, float)) or v != v or v in (float("inf"), float("-inf")):
                raise ValueError("canvas coordinates must be finite numbers")


@dataclass(frozen=True, eq=True)
class Diagram:
    """A conceptual ER diagram. Geometry serves the editor; lowering ignores it."""

    name: str = "untitled"
    entities: tuple[Entity, ...] = ()
    relationships: tuple[Relationship, ...] = ()
    hierarchies: tuple[Hierarchy, ...] = ()
    geometry: dict[str, CanvasPoint] = field(default_factory=dict)
    format_version: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "relationships", tuple(self.relationships))
        object.__setattr__(self, "hierarchies", tuple(self.hierarchies))
        object.__setattr__(self, "geometry", dict(self.geometry))

    def entity(self, entity_id: str) -> Entity:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise LookupError(f"no entity with id {entity_id!r}")

    def element_ids(self) -> set[str]:
        ids = {e.id for e in self.entities}
        ids.update(r.id for r in self.relationships)
        ids.update(h.id for h in self.hierarchies)
        return ids


class Severity(str, Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    element_path: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def is_valid(self) -> bool:
        return all(f.severity is not Severity.ERROR for f in self.findings)

    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)


_NON_SQL_CHARS = re.compile(r"[^a-z0-9]+")


def sql_name(display_name: str) -> str:
    """Derive the sql identifier for a display name.

    Lowercased, spaces and punctuation collapsed to single underscores,
    accents folded; the result always matches [a-z][a-z0-9_]*.
    """
    folded = unicodedata.normalize("NFKD", display_name).encode("ascii", "ignore").decode("ascii")
    cleaned = _NON_SQL_CHARS.sub("_", folded.lower()).strip("_")
    if not cleaned:
        return "unnamed"
    if not cleaned[0].isalpha():
        cleaned = "x" + cleaned
    return cleaned


# Generation mode lives in transform; validation only needs the token to
# decide which relationships inline their foreign key.
_MODE_NORMAL = "normal"
_MODE_SIMPLIFIED = "simplified"


def _mode_token(mode: object) -> str | None:
    if mode is None:
        return None
    value = getattr(mode, "value", mode)
    token = str(value).lower()
    if token not in (_MODE_NORMAL, _MODE_SIMPLIFIED):
        raise ValueError(f"unknown generation mode {mode!r}")
    return token


def _inline_fk_under(rel: Relationship, mode_token: str | None) -> bool:
    """Whether lowering rel would inline a FK (leaving attributes no home).

    With no mode given, only relationships that inline under every mode count.
    """
    max_ones = [end for end in rel.ends if end.max_card is MaxCard.ONE]
    if len(max_ones) == 0:
        return False  # M:N always materializes a table
    if len(max_ones) == 1:
        dependent = max_ones[0]
        if dependent.min_card == 1:
            return True
        return mode_token == _MODE_SIMPLIFIED
    # 1:1
    if rel.end_a.min_card == 1 or rel.end_b.min_card == 1:
        return True
    return mode_token == _MODE_SIMPLIFIED


def _owner_candidates(diagram: Diagram, weak: Entity) -> list[tuple[Relationship, RelEnd]]:
    """Relationships eligible to be the weak entity's identifying link.

    The owner end carries (1,1) toward the owner and the opposite end is the
    weak entity; self-relationships cannot identify their own entity.
    """
    out = []
    for rel in diagram.relationships:
        if rel.is_self:
            continue
        for owner_end, weak_end in ((rel.end_a, rel.end_b), (rel.end_b, rel.end_a)):
            if (
                weak_end.entity_id == weak.id
                and owner_end.min_card == 1
                and owner_end.max_card is MaxCard.ONE
            ):
                out.append((rel, owner_end))
    return out


def weak_owner_of(diagram: Diagram, entity_id: str) -> tuple[str, str] | None:
    """Return (relationship id, owner entity id) identifying a weak entity.

    Absent when zero or multiple candidate links exist; validation reports
    that case as WEAK_WITHOUT_OWNER.
    """
    entity = diagram.entity(entity_id)
    if not entity.is_weak:
        raise ValueError(f"entity {entity_id!r} is not weak")
    candidates = _owner_candidates(diagram, entity)
    if len(candidates) != 1:
        return None
    rel, owner_end = candidates[0]
    return (rel.id, owner_end.entity_id)


def validate(diagram: Diagram, mode: object = None) -> ValidationReport:
    """Check a diagram against every modeling rule and report all findings.

    Pure: equal inputs yield identical reports, ordered by element path then
    code. An optional generation mode sharpens the REL_ATTRS_INLINE check to
    the relationships that would inline a FK under that specific mode.
    """
    token = _mode_token(mode)
    findings: list[Finding] = []

    def add(severity: Severity, code: str, path: tuple[str, ...], message: str) -> None:
        findings.append(Finding(severity, code, path, message))

    entities = {e.id: e for e in diagram.entities}
    seen_ids: set[str] = set()
    for element_id in (
        [e.id for e in diagram.entities]
        + [r.id for r in diagram.relationships]
        + [h.id for h in diagram.hierarchies]
    ):
        if element_id in seen_ids:
            add(Severity.ERROR, "DUP_ID", (element_id,), f"element id {element_id!r} is used more than once")
        seen_ids.add(element_id)

    for key in diagram.geometry:
        if key not in seen_ids:
            add(Severity.ERROR, "DANGLING_REF", (key,), f"geometry entry {key!r} references no element")

    sub_of: dict[str, list[str]] = {}
    super_of: dict[str, list[str]] = {}
    for h in diagram.hierarchies:
        super_of.setdefault(h.super_id, []).append(h.id)
        for sub in h.sub_ids:
            sub_of.setdefault(sub, []).append(h.id)
    hierarchy_subs = set(sub_of)

    # --- entities -----------------------------------------------------
    names_seen: dict[str, str] = {}
    for entity in diagram.entities:
        path = (entity.id,)
        sname = sql_name(entity.name)
        if sname in names_seen:
            add(
                Severity.ERROR,
                "DUP_NAME",
                path,
                f"entity {entity.name!r} normalizes to {sname!r}, already used by entity {names_seen[sname]!r}",
            )
        else:
            names_seen[sname] = entity.id

        attr_names: dict[str, str] = {}
        pk_attrs = [a for a in entity.attributes if a.is_pk]
        for attr in entity.attributes:
            apath = (entity.id, attr.name)
            aname = sql_name(attr.name)
            if aname in attr_names:
                add(
                    Severity.ERROR,
                    "DUP_ATTR",
                    apath,
                    f"attribute {attr.name!r} duplicates {attr_names[aname]!r} after normalization",
                )
            else:
                attr_names[aname] = attr.name
            if attr.is_pk and not attr.mandatory:
                add(Severity.ERROR, "PK_NULLABLE", apath, "a primary key attribute must be mandatory")
            if attr.is_pk and attr.is_partial_id:
                add(
                    Severity.ERROR,
                    "PK_PID_CONFLICT",
                    apath,
                    "an attribute cannot be both a primary key and a partial identifier",
                )
            if attr.auto_increment:
                if attr.logical_type.kind not in (TypeKind.INTEGER, TypeKind.BIGINT):
                    add(
                        Severity.ERROR,
                        "AUTOINC_TYPE",
                        apath,
                        "auto-increment requires an integer or bigint attribute",
                    )
                elif not attr.is_pk:
                    add(
                        Severity.ERROR,
                        "AUTOINC_NOT_PK",
                        apath,
                        "auto-increment is only supported on the primary key",
                    )
                elif len(pk_attrs) > 1:
                    add(
                        Severity.ERROR,
                        "AUTOINC_COMPOSITE",
                        apath,
                        "auto-increment is not supported on a composite primary key",
                    )
            if attr.is_partial_id and not entity.is_weak:
                add(
                    Severity.WARNING,
                    "PID_NOT_WEAK",
                    apath,
                    "partial identifiers only apply to weak entities; flag is ignored",
                )

        if entity.is_weak:
            if pk_attrs:
                add(
                    Severity.ERROR,
                    "WEAK_WITH_PK",
                    path,
                    "a weak entity cannot declare its own primary key",
                )
        elif not pk_attrs and entity.id not in hierarchy_subs:
            add(
                Severity.ERROR,
                "MISSING_IDENTIFIER",
                path,
                f"entity {entity.name!r} has no primary key attribute",
            )
        if entity.id in hierarchy_subs and pk_attrs:
            add(
                Severity.ERROR,
                "SUB_WITH_PK",
                path,
                "a sub-entity inherits its identifier and cannot declare a primary key",
            )

    # --- relationships ------------------------------------------------
    concrete_supers = {h.super_id for h in diagram.hierarchies if h.strategy is Strategy.CONCRETE}
    for rel in diagram.relationships:
        path = (rel.id,)
        for label, end in (("first", rel.end_a), ("second", rel.end_b)):
            if end.entity_id not in entities:
                add(
                    Severity.ERROR,
                    "DANGLING_REF",
                    path,
                    f"{label} end of relationship {rel.name!r} references unknown entity {end.entity_id!r}",
                )
            elif end.entity_id in concrete_supers:
                add(
                    Severity.ERROR,
                    "CONCRETE_SUPER_REL",
                    path,
                    f"relationship {rel.name!r} targets {end.entity_id!r}, the super-entity of a concrete hierarchy",
                )
        if rel.is_self:
            roles = (rel.end_a.role or "", rel.end_b.role or "")
            if not roles[0] or not roles[1] or roles[0] == roles[1]:
                add(
                    Severity.ERROR,
                    "SELF_REL_ROLES",
                    path,
                    "a self-relationship needs distinct non-empty roles on both ends",
                )

        attr_names = {}
        for attr in rel.attributes:
            apath = (rel.id, attr.name)
            aname = sql_name(attr.name)
            if aname in attr_names:
                add(
                    Severity.ERROR,
                    "DUP_ATTR",
                    apath,
                    f"attribute {attr.name!r} duplicates {attr_names[aname]!r} after normalization",
                )
            else:
                attr_names[aname] = attr.name
            if attr.is_pk or attr.auto_increment:
                add(
                    Severity.ERROR,
                    "REL_ATTR_FLAGS",
                    apath,
                    "relationship attributes cannot be primary keys or auto-increment",
                )

    # --- weak ownership -----------------------------------------------
    owner_link: dict[str, tuple[str, str]] = {}
    weak_ids = {e.id for e in diagram.entities if e.is_weak}
    for entity in diagram.entities:
        if not entity.is_weak:
            continue
        candidates = _owner_candidates(diagram, entity)
        if len(candidates) != 1:
            add(
                Severity.ERROR,
                "WEAK_WITHOUT_OWNER",
                (entity.id,),
                f"weak entity {entity.name!r} needs exactly one identifying relationship "
                f"with (1,1) at the owner end; found {len(candidates)}",
            )
        else:
            rel, owner_end = candidates[0]
            owner_link[entity.id] = (rel.id, owner_end.entity_id)

    for entity_id, (_, owner_id) in owner_link.items():
        depth = 0
        current: str | None = owner_id
        chain = {entity_id}
        while current is not None and current in weak_ids:
            if current in chain:
                add(
                    Severity.ERROR,
                    "WEAK_CYCLE",
                    (entity_id,),
                    "weak-entity ownership forms a cycle",
                )
                break
            chain.add(current)
            depth += 1
            link = owner_link.get(current)
            current = link[1] if link else None
        else:
            if depth > 1:
                add(
                    Severity.WARNING,
                    "WEAK_CHAIN",
                    (entity_id,),
                    f"weak entity owned through {depth} weak levels; chains deeper than one level are discouraged",
                )

    # --- relationship attributes vs. inlined FKs -----------------------
    for rel in diagram.relationships:
        if not rel.attributes:
            continue
        consumed_by_weak = any(link[0] == rel.id for link in owner_link.values())
        if consumed_by_weak or _inline_fk_under(rel, token):
            add(
                Severity.ERROR,
                "REL_ATTRS_INLINE",
                (rel.id,),
                f"relationship {rel.name!r} carries attributes but lowering inlines its foreign key, "
                "leaving them no table",
            )

    # --- hierarchies ----------------------------------------------------
    for h in diagram.hierarchies:
        path = (h.id,)
        members = (h.super_id, *h.sub_ids)
        for member in members:
            if member not in entities:
                add(
                    Severity.ERROR,
                    "DANGLING_REF",
                    path,
                    f"hierarchy references unknown entity {member!r}",
                )
            elif entities[member].is_weak:
                add(
                    Severity.ERROR,
                    "WEAK_IN_HIERARCHY",
                    path,
                    f"weak entity {member!r} cannot participate in a hierarchy",
                )
        if h.super_id in h.sub_ids:
            add(Severity.ERROR, "HIERARCHY_SELF", path, "an entity cannot be its own sub-entity")
        seen_subs = set()
        for sub in h.sub_ids:
            if sub in seen_subs:
                add(Severity.ERROR, "HIERARCHY_DUP_SUB", path, f"sub-entity {sub!r} listed twice")
            seen_subs.add(sub)

        removed = (h.super_id,) if h.strategy is Strategy.CONCRETE else ()
        if h.strategy is Strategy.SINGLE:
            removed = h.sub_ids
        for gone in removed:
            others = [x for x in sub_of.get(gone, []) + super_of.get(gone, []) if x != h.id]
            if others:
                add(
                    Severity.ERROR,
                    "HIERARCHY_CONFLICT",
                    path,
                    f"entity {gone!r} is removed by strategy {h.strategy.value} "
                    "but participates in another hierarchy",
                )

    for entity_id, hs in sub_of.items():
        if len(hs) > 1:
            add(
                Severity.ERROR,
                "HIERARCHY_OVERLAP",
                (entity_id,),
                "an entity can be the sub of at most one hierarchy",
            )
    for entity_id, hs in super_of.items():
        if len(hs) > 1:
            add(
                Severity.ERROR,
                "HIERARCHY_OVERLAP",
                (entity_id,),
                "an entity can be the super of at most one hierarchy",
            )

    # Cycle through super/sub links: walk super -> sub edges. Self edges are
    # already reported as HIERARCHY_SELF.
    edges: dict[str, set[str]] = {}
    for h in diagram.hierarchies:
        edges.setdefault(h.super_id, set()).update(s for s in h.sub_ids if s != h.super_id)
    state: dict[str, int] = {}

    def has_cycle(node: str) -> bool:
        state[node] = 1
        for nxt in edges.get(node, ()):
            mark = state.get(nxt, 0)
            if mark == 1 or (mark == 0 and has_cycle(nxt)):
                return True
        state[node] = 2
        return False

    for node in list(edges):
        if state.get(node, 0) == 0 and has_cycle(node):
            add(Severity.ERROR, "HIERARCHY_CYCLE", (node,), "hierarchy links form a cycle")

    findings.sort(key=lambda f: (f.element_path, f.code))
    return ValidationReport(tuple(findings))
