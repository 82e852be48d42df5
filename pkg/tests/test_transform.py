"""Lowering rules: hierarchies, weak entities, relationship mapping, ordering."""

from __future__ import annotations

import random

import pytest

from onda.er_model import (
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
    validate,
)
from onda.transform import (
    ActionKind,
    Column,
    ForeignKey,
    GenerationMode,
    InvalidDiagramError,
    OriginKind,
    PhysicalModel,
    Table,
    TableOrigin,
    lower_hierarchy,
    map_relationship,
    model_to_obj,
    order_tables,
    transform,
)

from generators import random_diagram
from reference_lowering import dump_model, reference_lower

INT = LogicalType(TypeKind.INTEGER)
NORMAL = GenerationMode.NORMAL
SIMPLIFIED = GenerationMode.SIMPLIFIED


def pk(name="id"):
    return Attribute(name, INT, is_pk=True, mandatory=True)


def verify_model(model: PhysicalModel) -> None:
    """Structural invariants every lowered model must satisfy."""
    names = [t.name for t in model.tables]
    assert len(names) == len(set(names)), "table names unique"
    by_name = {t.name: t for t in model.tables}
    position = {name: i for i, name in enumerate(names)}
    deferred = set(model.deferred)
    for table in model.tables:
        colnames = [c.name for c in table.columns]
        assert len(colnames) == len(set(colnames)), (table.name, "column names unique")
        assert table.primary_key, (table.name, "non-empty pk")
        assert set(table.primary_key) <= set(colnames)
        for col in table.columns:
            if col.name in table.primary_key:
                assert not col.nullable, (table.name, col.name, "pk columns not null")
            if col.auto_increment:
                assert col.logical_type.kind in (TypeKind.INTEGER, TypeKind.BIGINT)
                assert not col.nullable
                assert list(table.primary_key) == [col.name], "auto column is the sole pk"
        autos = [c for c in table.columns if c.auto_increment]
        assert len(autos) <= 1
        for fk in table.foreign_keys:
            target = by_name[fk.target_table]
            assert fk.target_columns == target.primary_key, (table.name, fk.name)
            assert len(fk.columns) == len(fk.target_columns)
            for local, remote in zip(fk.columns, fk.target_columns):
                assert table.column(local).logical_type == target.column(remote).logical_type
            if fk.target_table != table.name and (table.name, fk.name) not in deferred:
                assert position[fk.target_table] < position[table.name], (
                    table.name,
                    fk.name,
                    "emission order",
                )


class TestUniversityExample:
    def test_normal_mode_association_table(self, university):
        model = transform(university, NORMAL)
        verify_model(model)
        pc = model.table("professor_course")
        assert pc.primary_key == ("course_designation",)
        fk_to_professor = next(fk for fk in pc.foreign_keys if fk.target_table == "professor")
        for col in fk_to_professor.columns:
            assert not pc.column(col).nullable
        assert pc.origin == TableOrigin(OriginKind.RELATIONSHIP, "r2")
        assert all(not c.nullable for c in pc.columns)

    def test_weak_enrolment_key(self, university):
        model = transform(university, NORMAL)
        enrolment = model.table("enrolment")
        assert enrolment.primary_key == ("student_person_card_number", "number")
        fk = enrolment.foreign_keys[0]
        assert fk.target_table == "student"
        assert fk.columns == ("student_person_card_number",)

    def test_empty_diagram(self):
        for mode in (NORMAL, SIMPLIFIED):
            assert transform(Diagram(), mode).tables == ()

    def test_simplified_mode_inlines_nullable_fk(self, university):
        model = transform(university, SIMPLIFIED)
        verify_model(model)
        assert not any(t.name == "professor_course" for t in model.tables)
        course = model.table("course")
        fk_col = course.column("professor_person_card_number")
        assert fk_col.nullable
        assert any(fk.target_table == "professor" for fk in course.foreign_keys)

    def test_rejects_invalid_diagram(self):
        bad = Diagram(entities=(Entity("e", "E", (Attribute("x", INT),)),))
        with pytest.raises(InvalidDiagramError) as err:
            transform(bad, NORMAL)
        assert "MISSING_IDENTIFIER" in str(err.value)


class TestHierarchyStrategies:
    def _diagram(self, strategy):
        return Diagram(
            name="H",
            entities=(
                Entity("person", "Person", (pk("card"), Attribute("name", INT))),
                Entity("professor", "Professor", (Attribute("salary", INT),)),
                Entity("student", "Student", (Attribute("year", INT),)),
            ),
            hierarchies=(Hierarchy("h1", "person", ("professor", "student"), strategy),),
        )

    def test_complete_three_tables_with_fk_pks(self):
        model = transform(self._diagram(Strategy.COMPLETE), NORMAL)
        verify_model(model)
        assert sorted(t.name for t in model.tables) == ["person", "professor", "student"]
        for sub in ("professor", "student"):
            table = model.table(sub)
            assert table.primary_key == ("person_card",)
            fk = table.foreign_keys[0]
            assert fk.target_table == "person"
            assert fk.columns == tuple(table.primary_key)

    def test_single_one_merged_table_with_discriminator(self):
        model = transform(self._diagram(Strategy.SINGLE), NORMAL)
        verify_model(model)
        assert [t.name for t in model.tables] == ["person"]
        person = model.table("person")
        cols = {c.name: c for c in person.columns}
        assert {"card", "name", "salary", "year", "person_type"} <= set(cols)
        assert cols["salary"].nullable and cols["year"].nullable
        disc = cols["person_type"]
        assert not disc.nullable
        assert disc.logical_type == LogicalType(TypeKind.VARCHAR, length=30)

    def test_concrete_distributes_attributes(self):
        model = transform(self._diagram(Strategy.CONCRETE), NORMAL)
        verify_model(model)
        assert sorted(t.name for t in model.tables) == ["professor", "student"]
        for name, own in (("professor", "salary"), ("student", "year")):
            table = model.table(name)
            assert [c.name for c in table.columns][:2] == ["card", "name"]
            assert table.primary_key == ("card",)
            assert own in {c.name for c in table.columns}

    def test_single_retargets_relationships(self):
        base = self._diagram(Strategy.SINGLE)
        d = Diagram(
            name=base.name,
            entities=base.entities + (Entity("club", "Club", (pk(),)),),
            relationships=(
                Relationship(
                    "r1", "Joins", RelEnd("student", 0, MaxCard.MANY), RelEnd("club", 0, MaxCard.MANY)
                ),
            ),
            hierarchies=base.hierarchies,
        )
        model = transform(d, NORMAL)
        verify_model(model)
        link = model.table("person_club")
        targets = {fk.target_table for fk in link.foreign_keys}
        assert targets == {"person", "club"}

    def test_single_between_two_subs_becomes_self_relationship(self):
        base = self._diagram(Strategy.SINGLE)
        d = Diagram(
            name=base.name,
            entities=base.entities,
            relationships=(
                Relationship(
                    "r1",
                    "Mentors",
                    RelEnd("professor", 0, MaxCard.MANY),
                    RelEnd("student", 0, MaxCard.MANY),
                ),
            ),
            hierarchies=base.hierarchies,
        )
        model = transform(d, NORMAL)
        verify_model(model)
        link = model.table("person_person")
        assert link.primary_key == (
            "professor_person_card",
            "student_person_card",
        )

    def test_nested_complete_chain(self):
        d = Diagram(
            entities=(
                Entity("a", "A", (pk(),)),
                Entity("b", "B", (Attribute("x", INT),)),
                Entity("c", "C", (Attribute("y", INT),)),
            ),
            hierarchies=(
                Hierarchy("h1", "a", ("b",), Strategy.COMPLETE),
                Hierarchy("h2", "b", ("c",), Strategy.COMPLETE),
            ),
        )
        model = transform(d, NORMAL)
        verify_model(model)
        assert model.table("b").primary_key == ("a_id",)
        assert model.table("c").primary_key == ("b_a_id",)

    def test_lower_hierarchy_is_exposed(self):
        d = self._diagram(Strategy.CONCRETE)
        lowered = lower_hierarchy(d, d.hierarchies[0])
        assert lowered.hierarchies == ()
        assert {e.id for e in lowered.entities} == {"professor", "student"}
        professor = next(e for e in lowered.entities if e.id == "professor")
        assert [a.name for a in professor.attributes] == ["card", "name", "salary"]


class TestMapRelationship:
    def _two(self, card_a, card_b, weak_b=False):
        d = Diagram(
            entities=(
                Entity("a", "A", (pk(),)),
                Entity("b", "B", () if weak_b else (pk(),), is_weak=weak_b),
            ),
            relationships=(
                Relationship(
                    "r", "R", RelEnd("a", *card_a), RelEnd("b", *card_b)
                ),
            ),
        )
        return d, d.relationships[0]

    def test_many_to_many(self):
        d, r = self._two((0, MaxCard.MANY), (0, MaxCard.MANY))
        for mode in (NORMAL, SIMPLIFIED):
            action = map_relationship(d, r, mode)
            assert action.kind is ActionKind.ASSOCIATION_TABLE
            assert action.dependent is None

    def test_one_to_many_mandatory_inlines_everywhere(self):
        d, r = self._two((0, MaxCard.MANY), (1, MaxCard.ONE))
        for mode in (NORMAL, SIMPLIFIED):
            action = map_relationship(d, r, mode)
            assert action.kind is ActionKind.INLINE_FK
            assert action.dependent == "b"
            assert not action.fk_nullable

    def test_one_to_many_optional_depends_on_mode(self):
        d, r = self._two((0, MaxCard.MANY), (0, MaxCard.ONE))
        normal = map_relationship(d, r, NORMAL)
        assert normal.kind is ActionKind.ASSOCIATION_TABLE
        assert normal.dependent == "b"
        simplified = map_relationship(d, r, SIMPLIFIED)
        assert simplified.kind is ActionKind.INLINE_FK
        assert simplified.fk_nullable

    def test_one_to_one_variants(self):
        d, r = self._two((1, MaxCard.ONE), (0, MaxCard.ONE))
        action = map_relationship(d, r, NORMAL)
        assert action.kind is ActionKind.INLINE_FK
        assert action.dependent == "a"
        assert action.fk_unique and not action.fk_nullable

        d, r = self._two((0, MaxCard.ONE), (0, MaxCard.ONE))
        normal = map_relationship(d, r, NORMAL)
        assert normal.kind is ActionKind.ASSOCIATION_TABLE
        assert normal.dependent == "a"  # name tie-break: a < b
        simplified = map_relationship(d, r, SIMPLIFIED)
        assert simplified.kind is ActionKind.INLINE_FK
        assert simplified.fk_nullable and simplified.fk_unique

    def test_weak_owner_link_is_consumed(self):
        d, r = self._two((1, MaxCard.ONE), (0, MaxCard.MANY), weak_b=True)
        for mode in (NORMAL, SIMPLIFIED):
            assert map_relationship(d, r, mode).kind is ActionKind.WEAK_OWNER_LINK


class TestOrderTables:
    def _table(self, name, fks=()):
        return Table(
            name=name,
            columns=(Column("id", INT, nullable=False),),
            primary_key=("id",),
            foreign_keys=tuple(fks),
            origin=TableOrigin(OriginKind.ENTITY, name),
        )

    def test_single_edge(self):
        model = PhysicalModel(
            tables=(
                self._table("b", [ForeignKey("fk_b_a", ("id",), "a", ("id",))]),
                self._table("a"),
            ),
            mode=NORMAL,
            source_name="x",
        )
        assert [t.name for t in order_tables(model).tables] == ["a", "b"]

    def test_name_tie_break(self):
        model = PhysicalModel(
            tables=(self._table("z"), self._table("a"), self._table("m")),
            mode=NORMAL,
            source_name="x",
        )
        assert [t.name for t in order_tables(model).tables] == ["a", "m", "z"]

    def test_two_table_cycle_defers_one_fk(self):
        model = PhysicalModel(
            tables=(
                self._table("a", [ForeignKey("fk_a_b", ("id",), "b", ("id",))]),
                self._table("b", [ForeignKey("fk_b_a", ("id",), "a", ("id",))]),
            ),
            mode=NORMAL,
            source_name="x",
        )
        ordered = order_tables(model)
        assert len(ordered.tables) == 2
        assert ordered.deferred == (("a", "fk_a_b"),)
        # With fk_a_b deferred, a is unblocked and sorts first; b's inline FK
        # then points strictly backward.
        assert [t.name for t in ordered.tables] == ["a", "b"]

    def test_self_reference_never_defers(self):
        model = PhysicalModel(
            tables=(self._table("a", [ForeignKey("fk_a_a", ("id",), "a", ("id",))]),),
            mode=NORMAL,
            source_name="x",
        )
        ordered = order_tables(model)
        assert ordered.deferred == ()


class TestModeProperties:
    def test_normal_mode_null_freedom(self):
        rng = random.Random(31)
        for _ in range(150):
            model = transform(random_diagram(rng), NORMAL)
            _assert_relationship_columns_not_null(model)

    def test_simplified_table_count_bounded_by_normal(self):
        rng = random.Random(32)
        for _ in range(150):
            d = random_diagram(rng)
            assert len(transform(d, SIMPLIFIED).tables) <= len(transform(d, NORMAL).tables)

    def test_transform_deterministic(self):
        rng = random.Random(33)
        for _ in range(40):
            d = random_diagram(rng)
            for mode in (NORMAL, SIMPLIFIED):
                assert transform(d, mode) == transform(d, mode)

    def test_origins_resolve_to_input_elements(self):
        rng = random.Random(34)
        for _ in range(80):
            d = random_diagram(rng)
            ids = d.element_ids()
            for mode in (NORMAL, SIMPLIFIED):
                for table in transform(d, mode).tables:
                    assert table.origin.ref in ids

    def test_structural_invariants_on_random_diagrams(self):
        rng = random.Random(35)
        for _ in range(120):
            d = random_diagram(rng, allow_externalized_attrs=True)
            if validate(d, NORMAL).is_valid:
                verify_model(transform(d, NORMAL))
            if validate(d, SIMPLIFIED).is_valid:
                verify_model(transform(d, SIMPLIFIED))

    def test_matches_reference_lowering_on_random_diagrams(self):
        rng = random.Random(36)
        for _ in range(150):
            d = random_diagram(rng, allow_externalized_attrs=True)
            for mode in (NORMAL, SIMPLIFIED):
                if not validate(d, mode).is_valid:
                    continue
                assert dump_model(transform(d, mode)) == reference_lower(d, mode.value)

    def test_model_json_shape(self, university):
        obj = model_to_obj(transform(university, NORMAL))
        assert obj["mode"] == "normal"
        assert obj["source_name"] == "University"
        names = [t["name"] for t in obj["tables"]]
        assert "professor_course" in names
        table = next(t for t in obj["tables"] if t["name"] == "professor_course")
        assert table["primary_key"] == ["course_designation"]
        assert table["origin"] == {"kind": "relationship", "ref": "r2"}


def _assert_relationship_columns_not_null(model: PhysicalModel) -> None:
    for table in model.tables:
        if table.origin.kind is OriginKind.RELATIONSHIP:
            for col in table.columns:
                assert not col.nullable, (table.name, col.name)
        for fk in table.foreign_keys:
            for col_name in fk.columns:
                assert not table.column(col_name).nullable, (table.name, col_name)
