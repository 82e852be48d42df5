"""ER diagram modeling, relational lowering, and multi-dialect SQL generation."""

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
    ValidationReport,
    sql_name,
    validate,
    weak_owner_of,
)
from .model_io import ProjectDocument, emit_project, parse_project
from .dsl import DslSource, emit_dsl, parse_dsl
from .transform import GenerationMode, PhysicalModel, transform
from .sql_emit import Dialect, Script, emit_sql

__version__ = "0.1.0"
