"""Rendering of physical models as executable DDL per dialect.

Output is deterministic text: UTF-8, LF, one column or constraint per line,
two-space indent inside CREATE TABLE, each statement ending ";". Deferred
foreign keys (cycle breakers) become ALTER TABLE statements after all
creates, where the dialect allows that at all.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from . import reserved_words
from .er_model import LogicalType, TypeKind
from .transform import Column, PhysicalModel, Table

__all__ = [
    "Dialect",
    "AutoIncrementIdiom",
    "BooleanStrategy",
    "DialectProfile",
    "PROFILES",
    "Script",
    "EmitError",
    "map_type",
    "quote_identifier",
    "fit_identifier",
    "emit_sql",
]


class Dialect(str, Enum):
    POSTGRESQL = "postgresql"
    ORACLE = "oracle"
    MYSQL = "mysql"
    MARIADB = "mariadb"
    SQLITE = "sqlite"


class AutoIncrementIdiom(Enum):
    COLUMN_KEYWORD = "column_keyword"          # AUTO_INCREMENT
    IDENTITY_CLAUSE = "identity_clause"        # GENERATED BY DEFAULT AS IDENTITY
    INTEGER_PK_KEYWORD = "integer_pk_keyword"  # INTEGER PRIMARY KEY AUTOINCREMENT


class BooleanStrategy(Enum):
    NATIVE = "native"
    NUMERIC1_CHECK = "numeric1_check"


@dataclass(frozen=True)
class DialectProfile:
    quote_open: str
    quote_close: str
    type_map: Mapping[TypeKind, str]
    auto_increment_idiom: AutoIncrementIdiom
    max_identifier_len: int
    supports_inline_fk_only: bool
    boolean_strategy: BooleanStrategy
    reserved: frozenset[str]
    supports_drop_if_exists: bool = True

    def __post_init__(self) -> None:
        missing = [k.value for k in TypeKind if k not in self.type_map]
        if missing:
            raise ValueError(f"type map misses kinds: {missing}")
        object.__setattr__(self, "type_map", MappingProxyType(dict(self.type_map)))


_COMMON = {
    TypeKind.INTEGER: "INTEGER",
    TypeKind.BIGINT: "BIGINT",
    TypeKind.NUMERIC: "NUMERIC({precision},{scale})",
    TypeKind.VARCHAR: "VARCHAR({length})",
    TypeKind.TEXT: "TEXT",
    TypeKind.BOOLEAN: "BOOLEAN",
    TypeKind.DATE: "DATE",
    TypeKind.TIMESTAMP: "TIMESTAMP",
}

PROFILES: dict[Dialect, DialectProfile] = {
    Dialect.POSTGRESQL: DialectProfile(
        quote_open='"',
        quote_close='"',
        type_map={**_COMMON, TypeKind.FLOAT: "DOUBLE PRECISION"},
        auto_increment_idiom=AutoIncrementIdiom.IDENTITY_CLAUSE,
        max_identifier_len=63,
        supports_inline_fk_only=False,
        boolean_strategy=BooleanStrategy.NATIVE,
        reserved=reserved_words.POSTGRESQL,
    ),
    Dialect.ORACLE: DialectProfile(
        quote_open='"',
        quote_close='"',
        type_map={
            TypeKind.INTEGER: "NUMBER(10)",
            TypeKind.BIGINT: "NUMBER(19)",
            TypeKind.FLOAT: "BINARY_DOUBLE",
            TypeKind.NUMERIC: "NUMBER({precision},{scale})",
            TypeKind.VARCHAR: "VARCHAR2({length})",
            TypeKind.TEXT: "CLOB",
            TypeKind.BOOLEAN: "NUMBER(1)",
            TypeKind.DATE: "DATE",
            TypeKind.TIMESTAMP: "TIMESTAMP",
        },
        auto_increment_idiom=AutoIncrementIdiom.IDENTITY_CLAUSE,
        max_identifier_len=30,
        supports_inline_fk_only=False,
        boolean_strategy=BooleanStrategy.NUMERIC1_CHECK,
        reserved=reserved_words.ORACLE,
        supports_drop_if_exists=False,
    ),
    Dialect.MYSQL: DialectProfile(
        quote_open="`",
        quote_close="`",
        type_map={
            **_COMMON,
            TypeKind.INTEGER: "INT",
            TypeKind.FLOAT: "DOUBLE",
            TypeKind.NUMERIC: "DECIMAL({precision},{scale})",
            TypeKind.TIMESTAMP: "DATETIME",
        },
        auto_increment_idiom=AutoIncrementIdiom.COLUMN_KEYWORD,
        max_identifier_len=64,
        supports_inline_fk_only=False,
        boolean_strategy=BooleanStrategy.NATIVE,
        reserved=reserved_words.MYSQL,
    ),
    Dialect.MARIADB: DialectProfile(
        quote_open="`",
        quote_close="`",
        type_map={
            **_COMMON,
            TypeKind.INTEGER: "INT",
            TypeKind.FLOAT: "DOUBLE",
            TypeKind.NUMERIC: "DECIMAL({precision},{scale})",
            TypeKind.TIMESTAMP: "DATETIME",
        },
        auto_increment_idiom=AutoIncrementIdiom.COLUMN_KEYWORD,
        max_identifier_len=64,
        supports_inline_fk_only=False,
        boolean_strategy=BooleanStrategy.NATIVE,
        reserved=reserved_words.MARIADB,
    ),
    Dialect.SQLITE: DialectProfile(
        quote_open='"',
        quote_close='"',
        # AUTOINCREMENT only works on INTEGER, which is 64-bit anyway.
        type_map={**_COMMON, TypeKind.BIGINT: "INTEGER", TypeKind.FLOAT: "REAL"},
        auto_increment_idiom=AutoIncrementIdiom.INTEGER_PK_KEYWORD,
        max_identifier_len=128,
        supports_inline_fk_only=True,
        boolean_strategy=BooleanStrategy.NATIVE,
        reserved=reserved_words.SQLITE,
    ),
}


@dataclass(frozen=True)
class Script:
    statements: tuple[str, ...]
    dialect: Dialect
    warnings: tuple[str, ...] = ()

    @property
    def rendered(self) -> str:
        return "".join(s + ";\n" for s in self.statements)


class EmitError(ValueError):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code


def map_type(t: LogicalType, dialect: Dialect) -> str:
    """Dialect type text for a logical type; total over all kinds."""
    template = PROFILES[dialect].type_map[t.kind]
    return template.format(length=t.length, precision=t.precision, scale=t.scale)


def quote_identifier(name: str, dialect: Dialect) -> str:
    """Quote only when the name collides with the dialect's reserved words."""
    profile = PROFILES[dialect]
    if name.lower() in profile.reserved:
        return f"{profile.quote_open}{name}{profile.quote_close}"
    return name


def _hash_suffix(name: str, counter: int) -> str:
    seed = name if counter == 0 else f"{name}#{counter}"
    return hashlib.sha256(seed.encode("utf-8")).hexdigest()[:4]


def fit_identifier(name: str, dialect: Dialect) -> str:
    """Shorten a too-long identifier deterministically (truncate + hash)."""
    limit = PROFILES[dialect].max_identifier_len
    if len(name) <= limit:
        return name
    return f"{name[: limit - 5]}_{_hash_suffix(name, 0)}"


class _Fitter:
    """Model-scoped identifier fitting: injective within one emission."""

    def __init__(self, dialect: Dialect) -> None:
        self.dialect = dialect
        self.limit = PROFILES[dialect].max_identifier_len
        self.assigned: dict[str, str] = {}
        self.used: set[str] = set()
        self.truncated: list[str] = []

    def fit(self, name: str) -> str:
        if name in self.assigned:
            return self.assigned[name]
        if len(name) <= self.limit:
            fitted = name
        else:
            counter = 0
            while True:
                fitted = f"{name[: self.limit - 5]}_{_hash_suffix(name, counter)}"
                if fitted not in self.used:
                    break
                counter += 1
            self.truncated.append(f"identifier {name!r} truncated to {fitted!r}")
        self.assigned[name] = fitted
        self.used.add(fitted)
        return fitted


def _column_line(col: Column, pk_inline: bool, dialect: Dialect, fitter: _Fitter) -> str:
    profile = PROFILES[dialect]
    parts = [quote_identifier(fitter.fit(col.name), dialect), map_type(col.logical_type, dialect)]
    if col.auto_increment:
        idiom = profile.auto_increment_idiom
        if idiom is AutoIncrementIdiom.IDENTITY_CLAUSE:
            parts.append("GENERATED BY DEFAULT AS IDENTITY")
            if not col.nullable:
                parts.append("NOT NULL")
        elif idiom is AutoIncrementIdiom.COLUMN_KEYWORD:
            if not col.nullable:
                parts.append("NOT NULL")
            parts.append("AUTO_INCREMENT")
            if pk_inline:
                parts.append("PRIMARY KEY")
        else:  # INTEGER_PK_KEYWORD
            if not col.nullable:
                parts.append("NOT NULL")
            parts.append("PRIMARY KEY AUTOINCREMENT")
    elif not col.nullable:
        parts.append("NOT NULL")
    if col.check_sql is not None:
        parts.append(f"CHECK ({col.check_sql})")
    return " ".join(parts)


def _fk_clause(fk, dialect: Dialect, fitter: _Fitter) -> str:
    cols = ", ".join(quote_identifier(fitter.fit(c), dialect) for c in fk.columns)
    tcols = ", ".join(quote_identifier(fitter.fit(c), dialect) for c in fk.target_columns)
    target = quote_identifier(fitter.fit(fk.target_table), dialect)
    name = quote_identifier(fitter.fit(fk.name), dialect)
    return f"CONSTRAINT {name} FOREIGN KEY ({cols}) REFERENCES {target} ({tcols})"


def _create_table(table: Table, model: PhysicalModel, dialect: Dialect, fitter: _Fitter) -> str:
    profile = PROFILES[dialect]
    deferred = {fk for t, fk in model.deferred if t == table.name}

    pk_inline = False
    if profile.auto_increment_idiom is not AutoIncrementIdiom.IDENTITY_CLAUSE:
        pk_inline = any(
            c.auto_increment and list(table.primary_key) == [c.name] for c in table.columns
        )

    lines = [
        _column_line(col, pk_inline and col.auto_increment, dialect, fitter)
        for col in table.columns
    ]
    if table.primary_key and not pk_inline:
        cols = ", ".join(quote_identifier(fitter.fit(c), dialect) for c in table.primary_key)
        lines.append(f"PRIMARY KEY ({cols})")
    for unique in table.uniques:
        cols = ", ".join(quote_identifier(fitter.fit(c), dialect) for c in unique)
        lines.append(f"UNIQUE ({cols})")
    for check in table.checks:
        lines.append(f"CHECK ({check})")
    if profile.boolean_strategy is BooleanStrategy.NUMERIC1_CHECK:
        for col in table.columns:
            if col.logical_type.kind is TypeKind.BOOLEAN:
                quoted = quote_identifier(fitter.fit(col.name), dialect)
                lines.append(f"CHECK ({quoted} IN (0, 1))")
    for fk in table.foreign_keys:
        if fk.name not in deferred:
            lines.append(_fk_clause(fk, dialect, fitter))

    name = quote_identifier(fitter.fit(table.name), dialect)
    body = ",\n  ".join(lines)
    return f"CREATE TABLE {name} (\n  {body}\n)"


def emit_sql(model: PhysicalModel, dialect: Dialect, drop_preamble: bool = False) -> Script:
    """Render one CREATE TABLE per table, in model order, plus deferred FKs."""
    profile = PROFILES[dialect]
    if model.deferred and profile.supports_inline_fk_only:
        involved = set()
        for table_name, fk_name in model.deferred:
            involved.add(table_name)
            table = model.table(table_name)
            involved.add(next(f for f in table.foreign_keys if f.name == fk_name).target_table)
        raise EmitError(
            "EMIT_UNSUPPORTED_CYCLE",
            f"{dialect.value} cannot add foreign keys after creation; "
            f"reference cycle involves: {', '.join(sorted(involved))}",
        )

    fitter = _Fitter(dialect)
    statements: list[str] = []

    if drop_preamble and profile.supports_drop_if_exists:
        for table in reversed(model.tables):
            name = quote_identifier(fitter.fit(table.name), dialect)
            statements.append(f"DROP TABLE IF EXISTS {name}")

    for table in model.tables:
        statements.append(_create_table(table, model, dialect, fitter))

    for table_name, fk_name in model.deferred:
        table = model.table(table_name)
        fk = next(f for f in table.foreign_keys if f.name == fk_name)
        quoted_table = quote_identifier(fitter.fit(table_name), dialect)
        statements.append(f"ALTER TABLE {quoted_table} ADD {_fk_clause(fk, dialect, fitter)}")

    return Script(
        statements=tuple(statements),
        dialect=dialect,
        warnings=tuple(fitter.truncated),
    )
