"""DSL parsing, pretty-printing, and round-trip behavior."""

from __future__ import annotations

import random

import pytest

from onda.dsl import DslParseError, DslSource, emit_dsl, parse_dsl
from onda.er_model import Diagram, MaxCard, TypeKind, validate
from onda.sql_emit import Dialect, emit_sql
from onda.transform import GenerationMode, transform

from generators import random_diagram


def test_single_entity_example():
    d = parse_dsl("entity Person { id: integer pk auto  name: varchar(80) mandatory }")
    assert len(d.entities) == 1
    person = d.entities[0]
    assert person.id == "person"
    assert [a.name for a in person.attributes] == ["id", "name"]
    assert person.attributes[0].is_pk
    assert person.attributes[0].auto_increment
    assert person.attributes[0].mandatory  # pk implies mandatory
    assert person.attributes[1].logical_type.kind is TypeKind.VARCHAR
    assert person.attributes[1].logical_type.length == 80


def test_bad_min_cardinality_is_syntax_error():
    with pytest.raises(DslParseError, match="min cardinality must be 0 or 1"):
        parse_dsl("entity A { id: integer pk }\nentity B { id: integer pk }\nrel R between A (2,1) and B (0,N)")


def test_error_carries_line_and_column():
    with pytest.raises(DslParseError) as err:
        parse_dsl("entity A {\n  id integer\n}")
    assert err.value.line == 2
    assert "':'" in str(err.value)


def test_university_file_parses_validates_and_lowers(university, university_dsl_path):
    diagram = parse_dsl(DslSource(text=university_dsl_path.read_text(), origin=str(university_dsl_path)))
    assert diagram == university
    assert validate(diagram).is_valid
    model = transform(diagram, GenerationMode.NORMAL)
    assert any(t.name == "professor_course" for t in model.tables)


def test_empty_diagram_emits_header_comment_only():
    out = emit_dsl(Diagram(name="Blank"))
    assert out.text == "# diagram: Blank\n"
    assert parse_dsl(out.text).name == "Blank"


def test_formatting_fixpoint(university):
    once = emit_dsl(university).text
    twice = emit_dsl(parse_dsl(once)).text
    assert once == twice


def test_reparse_lowers_to_identical_sql(university):
    direct = emit_sql(transform(university, GenerationMode.NORMAL), Dialect.POSTGRESQL)
    reparsed = parse_dsl(emit_dsl(university).text)
    via_dsl = emit_sql(transform(reparsed, GenerationMode.NORMAL), Dialect.POSTGRESQL)
    assert via_dsl.rendered == direct.rendered


def test_quoted_names_and_keywords():
    text = '''
entity "Order Line" {
  "select": integer pk
  note: text
}
entity "weak" weak {
  tag: varchar(5) pid mandatory
}
entity Owner { id: integer pk }
rel Holds between Owner (1,1) and "weak" (0,N)
'''
    d = parse_dsl(text)
    assert [e.name for e in d.entities] == ["Order Line", "weak", "Owner"]
    assert d.entities[0].id == "order_line"
    assert d.entities[0].attributes[0].name == "select"
    assert d.entities[1].is_weak
    out = emit_dsl(d).text
    assert parse_dsl(out) == d


def test_check_flag_round_trips():
    text = 'entity A {\n  amount: numeric(8,2) check "amount >= 0 AND amount < \\"limit\\""\n}'
    d = parse_dsl(text)
    assert d.entities[0].attributes[0].check_sql == 'amount >= 0 AND amount < "limit"'
    assert parse_dsl(emit_dsl(d).text) == d


def test_roles_and_self_relationship():
    text = "entity A { id: integer pk }\nrel Pairs between A (0,1) as left and A (0,N) as right"
    d = parse_dsl(text)
    rel = d.relationships[0]
    assert rel.end_a.role == "left"
    assert rel.end_b.role == "right"
    assert rel.end_a.max_card is MaxCard.ONE
    assert validate(d).is_valid


def test_comments_ignored():
    d = parse_dsl("# a comment\nentity A { # trailing\n id: integer pk\n}\n# end")
    assert d.entities[0].attributes[0].name == "id"
    assert d.name == "untitled"  # first line is not a diagram directive


def test_duplicate_entity_name_rejected_at_parse():
    with pytest.raises(DslParseError, match="DUP_ID"):
        parse_dsl("entity A { id: integer pk }\nentity a { id: integer pk }")


def test_duplicate_attribute_rejected_at_parse():
    with pytest.raises(DslParseError, match="DUP_ATTR"):
        parse_dsl("entity A { id: integer pk  ID: integer }")


def test_unknown_reference_rejected():
    with pytest.raises(DslParseError, match="DANGLING_REF"):
        parse_dsl("entity A { id: integer pk }\nrel R between A (0,N) and Ghost (0,N)")
    with pytest.raises(DslParseError, match="DANGLING_REF"):
        parse_dsl("entity A { id: integer pk }\nhierarchy A -> (Ghost) strategy single")


def test_flag_keyword_can_start_next_attribute():
    d = parse_dsl("entity A { id: integer pk  unique: integer  pk: varchar(3) }")
    names = [a.name for a in d.entities[0].attributes]
    assert names == ["id", "unique", "pk"]


def test_hierarchy_parses():
    text = (
        "entity P { id: integer pk }\nentity A { }\nentity B { }\n"
        "hierarchy P -> (A, B) strategy concrete"
    )
    d = parse_dsl(text)
    h = d.hierarchies[0]
    assert h.super_id == "p"
    assert h.sub_ids == ("a", "b")
    assert h.strategy.value == "concrete"


def test_round_trip_on_random_diagrams():
    rng = random.Random(77)
    for _ in range(250):
        diagram = random_diagram(rng)  # no geometry: DSL carries none
        text = emit_dsl(diagram).text
        assert parse_dsl(text) == diagram


def test_parse_never_crashes_on_noise():
    rng = random.Random(13)
    tokens = ["entity", "rel", "{", "}", "(", ")", '"x', "integer", ":", "0", "N", "->", "\n", "#", "pk"]
    for _ in range(400):
        source = " ".join(rng.choice(tokens) for _ in range(rng.randint(0, 25)))
        try:
            parse_dsl(source)
        except DslParseError:
            pass
