"""Shared fixtures: the worked university example and its DSL encoding."""

from __future__ import annotations

from pathlib import Path

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
)

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"

INT = LogicalType(TypeKind.INTEGER)


def varchar(n: int) -> LogicalType:
    return LogicalType(TypeKind.VARCHAR, length=n)


def numeric(p: int, s: int) -> LogicalType:
    return LogicalType(TypeKind.NUMERIC, precision=p, scale=s)


def build_university() -> Diagram:
    """The worked example: Person super with Professor/Student subs, weak
    Enrolment owned by Student, Professor teaching at most one Course each."""
    return Diagram(
        name="University",
        entities=(
            Entity(
                "person",
                "Person",
                (
                    Attribute("card_number", INT, is_pk=True, mandatory=True, auto_increment=True),
                    Attribute("name", varchar(100), mandatory=True),
                    Attribute("birth_date", LogicalType(TypeKind.DATE)),
                ),
            ),
            Entity(
                "professor",
                "Professor",
                (
                    Attribute("office", varchar(20)),
                    Attribute("salary", numeric(9, 2), mandatory=True),
                ),
            ),
            Entity("student", "Student", (Attribute("admission_year", INT, mandatory=True),)),
            Entity(
                "course",
                "Course",
                (
                    Attribute("designation", varchar(80), is_pk=True, mandatory=True),
                    Attribute("credits", INT, mandatory=True),
                ),
            ),
            Entity(
                "enrolment",
                "Enrolment",
                (
                    Attribute("number", INT, is_partial_id=True, mandatory=True),
                    Attribute("grade", numeric(4, 2)),
                ),
                is_weak=True,
            ),
        ),
        relationships=(
            Relationship(
                "r1",
                "Enrol1",
                RelEnd("student", 1, MaxCard.ONE),
                RelEnd("enrolment", 0, MaxCard.MANY),
            ),
            Relationship(
                "r2",
                "Teaches",
                RelEnd("professor", 0, MaxCard.MANY),
                RelEnd("course", 0, MaxCard.ONE),
            ),
        ),
        hierarchies=(Hierarchy("h1", "person", ("professor", "student"), Strategy.COMPLETE),),
    )


@pytest.fixture
def university() -> Diagram:
    return build_university()


@pytest.fixture
def university_dsl_path() -> Path:
    return DATA_DIR / "university.erd"
