"""Lowering of validated ER diagrams to relational physical models.

The pipeline: hierarchies are rewritten bottom-up per strategy, remaining
entities become tables (weak entities borrow their owner's key), relationships
become inline foreign keys or association tables depending on cardinality and
generation mode, and finally tables are ordered so emitted DDL runs top to
bottom. Everything is pure; equal inputs produce structurally equal models.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .er_model import (
    Attribute,
    Diagram,
    Entity,
    Hierarchy,
    LogicalType,
    MaxCard,
    RelEnd,
    Relationship,
    Strategy,
    TypeKind,
    ValidationReport,
    sql_name,
    validate,
    weak_owner_of,
)

__all__ = [
    "GenerationMode",
    "OriginKind",
    "TableOrigin",
    "Column",
    "ForeignKey",
    "Table",
    "PhysicalModel",
    "InvalidDiagramError",
    "ActionKind",
    "RelationalAction",
    "lower_hierarchy",
    "map_relationship",
    "transform",
    "order_tables",
    "model_to_obj",
]


class GenerationMode(str, Enum):
    NORMAL = "normal"
    SIMPLIFIED = "simplified"


class OriginKind(str, Enum):
    ENTITY = "entity"
    RELATIONSHIP = "relationship"
    HIERARCHY = "hierarchy"


@dataclass(frozen=True)
class TableOrigin:
    kind: OriginKind
    ref: str


@dataclass(frozen=True)
class Column:
    name: str
    logical_type: LogicalType
    nullable: bool
    auto_increment: bool = False
    check_sql: str | None = None


@dataclass(frozen=True)
class ForeignKey:
    name: str
    columns: tuple[str, ...]
    target_table: str
    target_columns: tuple[str, ...]


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[Column, ...]
    primary_key: tuple[str, ...]
    uniques: tuple[tuple[str, ...], ...] = ()
    foreign_keys: tuple[ForeignKey, ...] = ()
    checks: tuple[str, ...] = ()
    origin: TableOrigin = TableOrigin(OriginKind.ENTITY, "")

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise LookupError(f"table {self.name!r} has no column {name!r}")


@dataclass(frozen=True)
class PhysicalModel:
    tables: tuple[Table, ...]
    mode: GenerationMode
    source_name: str
    # (table name, fk name) pairs that must be added after creation because
    # they participate in a reference cycle.
    deferred: tuple[tuple[str, str], ...] = ()

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise LookupError(f"model has no table {name!r}")


class InvalidDiagramError(ValueError):
    """transform() was handed a diagram that fails validation."""

    def __init__(self, report: ValidationReport) -> None:
        errors = ", ".join(f"{f.code}@{'/'.join(f.element_path)}" for f in report.errors())
        super().__init__(f"diagram fails validation: {errors}")
        self.report = report


class ActionKind(str, Enum):
    ASSOCIATION_TABLE = "association_table"
    INLINE_FK = "inline_fk"
    WEAK_OWNER_LINK = "weak_owner_link"


@dataclass(frozen=True)
class RelationalAction:
    """How one relationship lowers under a given mode."""

    kind: ActionKind
    # 'a' or 'b': the end whose table carries the FK (inline) or whose key
    # alone forms the association table's PK; None for plain M:N.
    dependent: str | None = None
    fk_nullable: bool = False
    fk_unique: bool = False


def _dependent_end(diagram: Diagram, rel: Relationship) -> str:
    """Pick the dependent end of a 1:1 relationship ('a' or 'b')."""
    a_mand = rel.end_a.min_card == 1
    b_mand = rel.end_b.min_card == 1
    if a_mand != b_mand:
        return "a" if a_mand else "b"
    if rel.is_self:
        return "a"
    name_a = sql_name(diagram.entity(rel.end_a.entity_id).name)
    name_b = sql_name(diagram.entity(rel.end_b.entity_id).name)
    return "a" if name_a <= name_b else "b"


def map_relationship(diagram: Diagram, rel: Relationship, mode: GenerationMode) -> RelationalAction:
    """Classify a relationship by its end cardinalities and the mode."""
    for weak_end in (rel.end_a, rel.end_b):
        entity = diagram.entity(weak_end.entity_id)
        if entity.is_weak and weak_owner_of(diagram, entity.id) == (
            rel.id,
            (rel.end_b if weak_end is rel.end_a else rel.end_a).entity_id,
        ):
            return RelationalAction(ActionKind.WEAK_OWNER_LINK)

    ones = [label for label, end in (("a", rel.end_a), ("b", rel.end_b)) if end.max_card is MaxCard.ONE]
    if len(ones) == 0:
        return RelationalAction(ActionKind.ASSOCIATION_TABLE)
    if len(ones) == 1:
        dependent = ones[0]
        dep_end = rel.end_a if dependent == "a" else rel.end_b
        if dep_end.min_card == 1:
            return RelationalAction(ActionKind.INLINE_FK, dependent, fk_nullable=False)
        if mode is GenerationMode.SIMPLIFIED:
            return RelationalAction(ActionKind.INLINE_FK, dependent, fk_nullable=True)
        return RelationalAction(ActionKind.ASSOCIATION_TABLE, dependent)
    # 1:1
    dependent = _dependent_end(diagram, rel)
    if rel.end_a.min_card == 1 or rel.end_b.min_card == 1:
        return RelationalAction(ActionKind.INLINE_FK, dependent, fk_nullable=False, fk_unique=True)
    if mode is GenerationMode.SIMPLIFIED:
        return RelationalAction(ActionKind.INLINE_FK, dependent, fk_nullable=True, fk_unique=True)
    return RelationalAction(ActionKind.ASSOCIATION_TABLE, dependent, fk_unique=True)


def _renamed(attrs: list[Attribute], taken: set[str]) -> list[Attribute]:
    """Suffix display names so normalized attribute names stay unique."""
    out = []
    for attr in attrs:
        base = sql_name(attr.name)
        name = attr.name
        if base in taken:
            n = 2
            while f"{base}_{n}" in taken:
                n += 1
            name = f"{attr.name}_{n}"
            base = f"{base}_{n}"
        taken.add(base)
        out.append(replace(attr, name=name) if name != attr.name else attr)
    return out


def lower_hierarchy(
    diagram: Diagram, h: Hierarchy, pk_links: dict[str, str] | None = None
) -> Diagram:
    """Rewrite one hierarchy out of the diagram per its strategy.

    COMPLETE keeps all entities and records sub -> super key links in
    pk_links (consumed at table-mapping time). CONCRETE removes the super and
    copies its attributes to the head of every sub. SINGLE folds every sub
    into the super, adds a discriminator, and re-targets relationships that
    touched a removed sub.
    """
    remaining = tuple(x for x in diagram.hierarchies if x.id != h.id)
    geometry = {k: v for k, v in diagram.geometry.items() if k != h.id}

    if h.strategy is Strategy.COMPLETE:
        if pk_links is not None:
            for sub in h.sub_ids:
                pk_links[sub] = h.super_id
        return replace(diagram, hierarchies=remaining, geometry=geometry)

    if h.strategy is Strategy.CONCRETE:
        super_entity = diagram.entity(h.super_id)
        entities = []
        for entity in diagram.entities:
            if entity.id == h.super_id:
                continue
            if entity.id in h.sub_ids:
                taken = {sql_name(a.name) for a in super_entity.attributes}
                own = _renamed(list(entity.attributes), taken)
                entities.append(
                    replace(entity, attributes=tuple(super_entity.attributes) + tuple(own))
                )
            else:
                entities.append(entity)
        geometry.pop(h.super_id, None)
        return replace(
            diagram, entities=tuple(entities), hierarchies=remaining, geometry=geometry
        )

    # SINGLE
    super_entity = diagram.entity(h.super_id)
    removed = set(h.sub_ids)
    merged = list(super_entity.attributes)
    taken = {sql_name(a.name) for a in merged}
    for sub_id in h.sub_ids:
        sub = diagram.entity(sub_id)
        demoted = [replace(a, mandatory=False) for a in sub.attributes]
        merged.extend(_renamed(demoted, taken))
    discriminator = Attribute(
        name=f"{sql_name(super_entity.name)}_type",
        logical_type=LogicalType(TypeKind.VARCHAR, length=30),
        mandatory=True,
    )
    merged.extend(_renamed([discriminator], taken))

    entities = []
    for entity in diagram.entities:
        if entity.id in removed:
            continue
        if entity.id == h.super_id:
            entities.append(replace(entity, attributes=tuple(merged)))
        else:
            entities.append(entity)

    relationships = []
    for rel in diagram.relationships:
        new_ends = []
        retargeted = False
        for end in rel.ends:
            if end.entity_id in removed:
                role = end.role or sql_name(diagram.entity(end.entity_id).name)
                new_ends.append(replace(end, entity_id=h.super_id, role=role))
                retargeted = True
            else:
                new_ends.append(end)
        if retargeted:
            end_a, end_b = new_ends
            if end_a.entity_id == end_b.entity_id:
                # Now a self-relationship: both ends need roles.
                if not end_a.role:
                    end_a = replace(end_a, role=sql_name(diagram.entity(rel.end_a.entity_id).name))
                if not end_b.role:
                    end_b = replace(end_b, role=sql_name(diagram.entity(rel.end_b.entity_id).name))
            relationships.append(replace(rel, end_a=end_a, end_b=end_b))
        else:
            relationships.append(rel)

    for gone in removed:
        geometry.pop(gone, None)
    return Diagram(
        name=diagram.name,
        entities=tuple(entities),
        relationships=tuple(relationships),
        hierarchies=remaining,
        geometry=geometry,
        format_version=diagram.format_version,
    )


def _hierarchy_order(diagram: Diagram) -> list[str]:
    """Hierarchy ids ordered bottom-up (nested ones before their parents)."""
    parent_of: dict[str, str] = {}
    sub_to_h = {}
    for h in diagram.hierarchies:
        for sub in h.sub_ids:
            sub_to_h[sub] = h.id
    for h in diagram.hierarchies:
        if h.super_id in sub_to_h:
            parent_of[h.id] = sub_to_h[h.super_id]

    def depth(hid: str) -> int:
        d = 0
        cur = hid
        seen = set()
        while cur in parent_of and cur not in seen:
            seen.add(cur)
            cur = parent_of[cur]
            d += 1
        return d

    order = [(h.id, depth(h.id), i) for i, h in enumerate(diagram.hierarchies)]
    order.sort(key=lambda item: (-item[1], item[2]))
    return [hid for hid, _, _ in order]


class _TableBuilder:
    def __init__(self, name: str, origin: TableOrigin) -> None:
        self.name = name
        self.origin = origin
        self.columns: list[Column] = []
        self.primary_key: list[str] = []
        self.uniques: list[tuple[str, ...]] = []
        self.foreign_keys: list[ForeignKey] = []
        self.checks: list[str] = []
        self._names: set[str] = set()
        self._fk_names: set[str] = set()

    def add_column(self, name: str, column: Column) -> str:
        final = name
        n = 2
        while final in self._names:
            final = f"{name}_{n}"
            n += 1
        self._names.add(final)
        self.columns.append(replace(column, name=final))
        return final

    def add_fk(self, base_name: str, columns: list[str], target: str, target_columns: list[str]) -> None:
        final = base_name
        n = 2
        while final in self._fk_names:
            final = f"{base_name}_{n}"
            n += 1
        self._fk_names.add(final)
        self.foreign_keys.append(
            ForeignKey(final, tuple(columns), target, tuple(target_columns))
        )

    def build(self) -> Table:
        return Table(
            name=self.name,
            columns=tuple(self.columns),
            primary_key=tuple(self.primary_key),
            uniques=tuple(self.uniques),
            foreign_keys=tuple(self.foreign_keys),
            checks=tuple(self.checks),
            origin=self.origin,
        )


def _attr_column(attr: Attribute, *, pid_is_key: bool = False, force_not_null: bool = False) -> Column:
    # is_partial_id only matters on weak entities, where it joins the PK.
    key_part = attr.is_pk or (attr.is_partial_id and pid_is_key)
    return Column(
        name=sql_name(attr.name),
        logical_type=attr.logical_type,
        nullable=not (attr.mandatory or key_part or force_not_null),
        auto_increment=attr.auto_increment,
        check_sql=attr.check_sql,
    )


def transform(diagram: Diagram, mode: GenerationMode) -> PhysicalModel:
    """Lower a valid diagram to an ordered physical model."""
    report = validate(diagram, mode)
    if not report.is_valid:
        raise InvalidDiagramError(report)

    pk_links: dict[str, str] = {}
    working = diagram
    for hid in _hierarchy_order(diagram):
        h = next(x for x in working.hierarchies if x.id == hid)
        working = lower_hierarchy(working, h, pk_links)

    owner_links: dict[str, tuple[str, str]] = {}
    for entity in working.entities:
        if entity.is_weak:
            link = weak_owner_of(working, entity.id)
            if link is None:  # pre-validated; defensive
                raise InvalidDiagramError(report)
            owner_links[entity.id] = link

    # Entities must be mapped after whatever their key depends on.
    def key_parent(entity: Entity) -> str | None:
        if entity.id in pk_links:
            return pk_links[entity.id]
        if entity.id in owner_links:
            return owner_links[entity.id][1]
        return None

    ordered_entities: list[Entity] = []
    done: set[str] = set()
    pending = list(working.entities)
    while pending:
        progressed = False
        remaining = []
        for entity in pending:
            parent = key_parent(entity)
            if parent is None or parent in done:
                ordered_entities.append(entity)
                done.add(entity.id)
                progressed = True
            else:
                remaining.append(entity)
        if not progressed:
            raise InvalidDiagramError(report)  # ownership cycle; pre-validated
        pending = remaining

    builders: dict[str, _TableBuilder] = {}
    table_order: list[str] = []
    entity_table: dict[str, str] = {}
    entity_pk: dict[str, list[tuple[str, LogicalType]]] = {}

    def new_builder(name: str, origin: TableOrigin) -> _TableBuilder:
        final = name
        if final in builders:
            final = f"{name}_rel"
            n = 2
            while final in builders:
                final = f"{name}_rel_{n}"
                n += 1
        builder = _TableBuilder(final, origin)
        builders[final] = builder
        table_order.append(final)
        return builder

    for entity in ordered_entities:
        builder = new_builder(sql_name(entity.name), TableOrigin(OriginKind.ENTITY, entity.id))
        entity_table[entity.id] = builder.name
        parent = key_parent(entity)

        key_cols: list[tuple[str, LogicalType]] = []
        if parent is not None:
            parent_table = entity_table[parent]
            fk_cols = []
            for pcol, ptype in entity_pk[parent]:
                final = builder.add_column(
                    f"{parent_table}_{pcol}", Column(name="", logical_type=ptype, nullable=False)
                )
                fk_cols.append(final)
                key_cols.append((final, ptype))
            builder.add_fk(
                f"fk_{builder.name}_{parent_table}",
                fk_cols,
                parent_table,
                [pcol for pcol, _ in entity_pk[parent]],
            )

        pid_cols: list[tuple[str, LogicalType]] = []
        own_pk_cols: list[tuple[str, LogicalType]] = []
        for attr in entity.attributes:
            final = builder.add_column(
                sql_name(attr.name), _attr_column(attr, pid_is_key=entity.is_weak)
            )
            if attr.is_partial_id and entity.is_weak:
                pid_cols.append((final, attr.logical_type))
            if attr.is_pk:
                own_pk_cols.append((final, attr.logical_type))
            if attr.unique:
                builder.uniques.append((final,))

        if entity.id in owner_links:
            if not pid_cols:
                seq_type = LogicalType(TypeKind.INTEGER)
                final = builder.add_column("seq", Column("", seq_type, nullable=False))
                pid_cols.append((final, seq_type))
            key_cols.extend(pid_cols)
        elif parent is None:
            key_cols = own_pk_cols

        builder.primary_key = [name for name, _ in key_cols]
        entity_pk[entity.id] = key_cols

    # Relationships; weak-owner links were consumed by the key wiring above.
    for rel in working.relationships:
        action = map_relationship(working, rel, mode)
        if action.kind is ActionKind.WEAK_OWNER_LINK:
            continue

        def side(label: str) -> tuple[RelEnd, str, list[tuple[str, LogicalType]]]:
            end = rel.end_a if label == "a" else rel.end_b
            return end, entity_table[end.entity_id], entity_pk[end.entity_id]

        def fk_base(end: RelEnd, target_table: str, pcol: str) -> str:
            prefix = f"{sql_name(end.role)}_" if rel.is_self and end.role else ""
            return f"{prefix}{target_table}_{pcol}"

        if action.kind is ActionKind.INLINE_FK:
            dep_end, dep_table, _ = side(action.dependent)
            other_label = "b" if action.dependent == "a" else "a"
            other_end, target_table, target_pk = side(other_label)
            builder = builders[dep_table]
            fk_cols = []
            for pcol, ptype in target_pk:
                final = builder.add_column(
                    fk_base(other_end, target_table, pcol),
                    Column("", ptype, nullable=action.fk_nullable),
                )
                fk_cols.append(final)
            builder.add_fk(
                f"fk_{dep_table}_{target_table}",
                fk_cols,
                target_table,
                [pcol for pcol, _ in target_pk],
            )
            if action.fk_unique:
                builder.uniques.append(tuple(fk_cols))
            continue

        # Association table.
        end_a, table_a, pk_a = side("a")
        end_b, table_b, pk_b = side("b")
        builder = new_builder(f"{table_a}_{table_b}", TableOrigin(OriginKind.RELATIONSHIP, rel.id))
        side_cols: dict[str, list[str]] = {"a": [], "b": []}
        for label, end, target_table, target_pk in (
            ("a", end_a, table_a, pk_a),
            ("b", end_b, table_b, pk_b),
        ):
            cols = []
            for pcol, ptype in target_pk:
                final = builder.add_column(
                    fk_base(end, target_table, pcol), Column("", ptype, nullable=False)
                )
                cols.append(final)
            side_cols[label] = cols
            builder.add_fk(
                f"fk_{builder.name}_{target_table}",
                cols,
                target_table,
                [pcol for pcol, _ in target_pk],
            )

        if action.dependent is None:
            builder.primary_key = side_cols["a"] + side_cols["b"]
        else:
            builder.primary_key = side_cols[action.dependent]
            if action.fk_unique:
                other = "b" if action.dependent == "a" else "a"
                builder.uniques.append(tuple(side_cols[other]))

        for attr in rel.attributes:
            force = mode is GenerationMode.NORMAL
            final = builder.add_column(sql_name(attr.name), _attr_column(attr, force_not_null=force))
            if attr.unique:
                builder.uniques.append((final,))

    model = PhysicalModel(
        tables=tuple(builders[name].build() for name in table_order),
        mode=mode,
        source_name=diagram.name,
    )
    return order_tables(model)


def order_tables(model: PhysicalModel) -> PhysicalModel:
    """Topologically order tables (FK targets first, name tie-break).

    Cycles are broken by deferring foreign keys, picked deterministically by
    (fk name, table name); self-references never force deferral because every
    supported engine accepts them inline.
    """
    by_name = {t.name: t for t in model.tables}
    deferred: set[tuple[str, str]] = set()

    def blockers(table: Table) -> set[str]:
        return {
            fk.target_table
            for fk in table.foreign_keys
            if fk.target_table != table.name
            and fk.target_table in by_name
            and (table.name, fk.name) not in deferred
        }

    placed: list[str] = []
    placed_set: set[str] = set()
    remaining = set(by_name)
    while remaining:
        ready = sorted(
            name for name in remaining if blockers(by_name[name]) <= placed_set
        )
        if ready:
            name = ready[0]
            placed.append(name)
            placed_set.add(name)
            remaining.remove(name)
            continue
        # Cycle: defer the smallest-named FK among edges inside the cycle.
        candidates = []
        for name in sorted(remaining):
            for fk in by_name[name].foreign_keys:
                if (
                    fk.target_table in remaining
                    and fk.target_table != name
                    and (name, fk.name) not in deferred
                ):
                    candidates.append((fk.name, name))
        candidates.sort()
        fk_name, table_name = candidates[0]
        deferred.add((table_name, fk_name))

    return PhysicalModel(
        tables=tuple(by_name[name] for name in placed),
        mode=model.mode,
        source_name=model.source_name,
        deferred=tuple(sorted(deferred)),
    )


def _type_obj(t: LogicalType) -> dict:
    obj: dict = {"kind": t.kind.value}
    if t.length is not None:
        obj["length"] = t.length
    if t.precision is not None:
        obj["precision"] = t.precision
    if t.scale is not None:
        obj["scale"] = t.scale
    return obj


def model_to_obj(model: PhysicalModel) -> dict:
    """Canonical JSON object tree for a physical model."""
    tables = []
    for t in model.tables:
        columns = []
        for c in t.columns:
            col: dict = {
                "name": c.name,
                "type": _type_obj(c.logical_type),
                "nullable": c.nullable,
                "auto": c.auto_increment,
            }
            if c.check_sql is not None:
                col["check"] = c.check_sql
            columns.append(col)
        tables.append(
            {
                "name": t.name,
                "origin": {"kind": t.origin.kind.value, "ref": t.origin.ref},
                "columns": columns,
                "primary_key": list(t.primary_key),
                "uniques": [list(u) for u in t.uniques],
                "checks": list(t.checks),
                "foreign_keys": [
                    {
                        "name": fk.name,
                        "columns": list(fk.columns),
                        "target_table": fk.target_table,
                        "target_columns": list(fk.target_columns),
                    }
                    for fk in t.foreign_keys
                ],
            }
        )
    return {
        "source_name": model.source_name,
        "mode": model.mode.value,
        "tables": tables,
        "deferred_foreign_keys": [list(pair) for pair in model.deferred],
    }
