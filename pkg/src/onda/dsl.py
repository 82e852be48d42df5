"""Human-writable textual front-end for ER diagrams.

Grammar (whitespace-insensitive, ``#`` comments run to end of line)::

    file      := item*
    item      := entity | rel | hierarchy
    entity    := "entity" name ["weak"] "{" attr* "}"
    attr      := name ":" type flag*
    type      := "integer" | "bigint" | "float" | "boolean" | "date"
               | "timestamp" | "text" | "varchar" "(" INT ")"
               | "numeric" "(" INT "," INT ")"
    flag      := "pk" | "pid" | "mandatory" | "unique" | "auto" | "check" STRING
    rel       := "rel" name "between" name card ["as" name]
                 "and" name card ["as" name] ["{" attr* "}"]
    card      := "(" ("0"|"1") "," ("1"|"N") ")"
    hierarchy := "hierarchy" name "->" "(" name ("," name)* ")"
                 "strategy" ("complete"|"concrete"|"single")

A name is a bare identifier or a quoted string (quoting covers display names
that are not identifier-shaped or collide with a keyword). The source carries
no layout and no element ids: entity ids are the normalized entity names,
relationship and hierarchy ids are assigned positionally (r1, r2, ... / h1,
h2, ...). The diagram name rides in a leading ``# diagram: <name>`` comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
    sql_name,
)

__all__ = ["DslSource", "DslParseError", "parse_dsl", "emit_dsl"]

_KEYWORDS = frozenset(
    {
        "entity",
        "weak",
        "rel",
        "between",
        "and",
        "as",
        "hierarchy",
        "strategy",
        "pk",
        "pid",
        "mandatory",
        "unique",
        "auto",
        "check",
        "complete",
        "concrete",
        "single",
    }
    | {k.value for k in TypeKind}
)

_FLAG_KEYWORDS = ("pk", "pid", "mandatory", "unique", "auto", "check")

_SIMPLE_TYPES = {
    k.value: k
    for k in TypeKind
    if k not in (TypeKind.VARCHAR, TypeKind.NUMERIC)
}

_DIAGRAM_DIRECTIVE = re.compile(r"\A#\s*diagram:\s*(.*?)\s*$", re.MULTILINE)


@dataclass(frozen=True)
class DslSource:
    text: str
    origin: str | None = None


class DslParseError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT, INT, STRING, PUNCT, EOF
    value: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<punct>[{}(),:])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def _unescape(raw: str, line: int, column: int) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            esc = body[i + 1]
            if esc not in _ESCAPES:
                raise DslParseError(f"unknown escape \\{esc}", line, column)
            out.append(_ESCAPES[esc])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        column = m.start() - line_start + 1
        kind = m.lastgroup
        value = m.group()
        if kind == "ident":
            tokens.append(_Token("IDENT", value, line, column))
        elif kind == "int":
            tokens.append(_Token("INT", value, line, column))
        elif kind == "string":
            tokens.append(_Token("STRING", _unescape(value, line, column), line, column))
        elif kind in ("punct", "arrow"):
            tokens.append(_Token("PUNCT", value, line, column))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None) -> DslParseError:
        tok = tok or self.peek()
        found = tok.value if tok.kind != "EOF" else "end of input"
        return DslParseError(f"{message}, found {found!r}", tok.line, tok.column)

    def expect_punct(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind != "PUNCT" or tok.value != value:
            raise self.fail(f"expected {value!r}")
        return self.next()

    def expect_keyword(self, word: str) -> _Token:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.value != word:
            raise self.fail(f"expected keyword {word!r}")
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.value == word

    def name(self, what: str) -> tuple[str, _Token]:
        tok = self.peek()
        if tok.kind in ("IDENT", "STRING"):
            self.next()
            return tok.value, tok
        raise self.fail(f"expected {what} name")

    # --- productions ----------------------------------------------------

    def parse_type(self) -> LogicalType:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.fail("expected a type name")
        word = tok.value
        self.next()
        if word == "varchar":
            self.expect_punct("(")
            length = self.parse_int("varchar length")
            self.expect_punct(")")
            return LogicalType(TypeKind.VARCHAR, length=length)
        if word == "numeric":
            self.expect_punct("(")
            precision = self.parse_int("numeric precision")
            self.expect_punct(",")
            scale = self.parse_int("numeric scale")
            self.expect_punct(")")
            try:
                return LogicalType(TypeKind.NUMERIC, precision=precision, scale=scale)
            except ValueError as exc:
                raise DslParseError(str(exc), tok.line, tok.column) from None
        if word in _SIMPLE_TYPES:
            return LogicalType(_SIMPLE_TYPES[word])
        raise self.fail("expected a type name", tok)

    def parse_int(self, what: str) -> int:
        tok = self.peek()
        if tok.kind != "INT":
            raise self.fail(f"expected {what}")
        self.next()
        return int(tok.value)

    def parse_attr(self) -> Attribute:
        name, name_tok = self.name("attribute")
        self.expect_punct(":")
        logical_type = self.parse_type()
        flags = dict.fromkeys(
            ("is_pk", "is_partial_id", "mandatory", "unique", "auto_increment"), False
        )
        check: str | None = None
        while True:
            tok = self.peek()
            if tok.kind != "IDENT" or tok.value not in _FLAG_KEYWORDS:
                break
            # An identifier followed by ':' starts the next attribute, even if
            # it spells a flag keyword.
            if self.peek(1).kind == "PUNCT" and self.peek(1).value == ":":
                break
            self.next()
            if tok.value == "pk":
                flags["is_pk"] = True
                flags["mandatory"] = True
            elif tok.value == "pid":
                flags["is_partial_id"] = True
            elif tok.value == "mandatory":
                flags["mandatory"] = True
            elif tok.value == "unique":
                flags["unique"] = True
            elif tok.value == "auto":
                flags["auto_increment"] = True
            else:  # check
                value = self.peek()
                if value.kind != "STRING":
                    raise self.fail("expected a quoted constraint after 'check'")
                self.next()
                check = value.value
        try:
            return Attribute(name=name, logical_type=logical_type, check_sql=check, **flags)
        except ValueError as exc:
            raise DslParseError(str(exc), name_tok.line, name_tok.column) from None

    def parse_attr_block(self) -> tuple[Attribute, ...]:
        self.expect_punct("{")
        attrs = []
        while not (self.peek().kind == "PUNCT" and self.peek().value == "}"):
            if self.peek().kind == "EOF":
                raise self.fail("expected '}'")
            attrs.append(self.parse_attr())
        self.expect_punct("}")
        return tuple(attrs)

    def parse_card(self) -> tuple[int, MaxCard]:
        self.expect_punct("(")
        tok = self.peek()
        if tok.kind == "INT" and tok.value in ("0", "1"):
            min_card = int(tok.value)
            self.next()
        else:
            raise self.fail("min cardinality must be 0 or 1")
        self.expect_punct(",")
        tok = self.peek()
        if tok.kind == "INT" and tok.value == "1":
            max_card = MaxCard.ONE
        elif tok.kind == "IDENT" and tok.value == "N":
            max_card = MaxCard.MANY
        else:
            raise self.fail("max cardinality must be 1 or N")
        self.next()
        self.expect_punct(")")
        return min_card, max_card


def parse_dsl(src: DslSource | str) -> Diagram:
    """Parse DSL text into a diagram (no geometry; ids derived as documented)."""
    source = src if isinstance(src, DslSource) else DslSource(text=src)
    parser = _Parser(_tokenize(source.text))

    directive = _DIAGRAM_DIRECTIVE.match(source.text)
    diagram_name = directive.group(1) if directive and directive.group(1) else "untitled"

    entities: list[Entity] = []
    entity_lines: dict[str, _Token] = {}
    rel_specs = []  # (name, (ref, card, role, tok) x2, attrs)
    hierarchy_specs = []  # (super_ref, [sub_refs], strategy, tok)

    while parser.peek().kind != "EOF":
        if parser.at_keyword("entity"):
            parser.next()
            name, name_tok = parser.name("entity")
            is_weak = False
            if parser.at_keyword("weak"):
                # 'weak' only counts as the modifier when a '{' follows.
                if parser.peek(1).kind == "PUNCT" and parser.peek(1).value == "{":
                    parser.next()
                    is_weak = True
            attrs = parser.parse_attr_block()
            entity_id = sql_name(name)
            if entity_id in entity_lines:
                raise DslParseError(
                    f"DUP_ID: entity {name!r} collides with an earlier entity "
                    f"(both normalize to {entity_id!r})",
                    name_tok.line,
                    name_tok.column,
                )
            entity_lines[entity_id] = name_tok
            seen_attrs: set[str] = set()
            for attr in attrs:
                key = sql_name(attr.name)
                if key in seen_attrs:
                    raise DslParseError(
                        f"DUP_ATTR: attribute {attr.name!r} repeats within entity {name!r}",
                        name_tok.line,
                        name_tok.column,
                    )
                seen_attrs.add(key)
            entities.append(Entity(id=entity_id, name=name, attributes=attrs, is_weak=is_weak))
        elif parser.at_keyword("rel"):
            parser.next()
            rel_name, _ = parser.name("relationship")
            parser.expect_keyword("between")
            ends = []
            for position in ("first", "second"):
                ref, ref_tok = parser.name(f"{position} entity")
                card = parser.parse_card()
                role = None
                if parser.at_keyword("as"):
                    parser.next()
                    role, _ = parser.name("role")
                ends.append((ref, card, role, ref_tok))
                if position == "first":
                    parser.expect_keyword("and")
            attrs: tuple[Attribute, ...] = ()
            if parser.peek().kind == "PUNCT" and parser.peek().value == "{":
                attrs = parser.parse_attr_block()
            rel_specs.append((rel_name, ends, attrs))
        elif parser.at_keyword("hierarchy"):
            parser.next()
            super_ref, super_tok = parser.name("super-entity")
            tok = parser.peek()
            if not (tok.kind == "PUNCT" and tok.value == "->"):
                raise parser.fail("expected '->'")
            parser.next()
            parser.expect_punct("(")
            subs = [parser.name("sub-entity")]
            while parser.peek().kind == "PUNCT" and parser.peek().value == ",":
                parser.next()
                subs.append(parser.name("sub-entity"))
            parser.expect_punct(")")
            parser.expect_keyword("strategy")
            tok = parser.peek()
            if tok.kind == "IDENT" and tok.value in ("complete", "concrete", "single"):
                strategy = Strategy(tok.value)
                parser.next()
            else:
                raise parser.fail("expected strategy complete, concrete, or single")
            hierarchy_specs.append((super_ref, super_tok, subs, strategy))
        else:
            raise parser.fail("expected 'entity', 'rel', or 'hierarchy'")

    def resolve(ref: str, tok: _Token) -> str:
        entity_id = sql_name(ref)
        if entity_id not in entity_lines:
            raise DslParseError(f"DANGLING_REF: unknown entity {ref!r}", tok.line, tok.column)
        return entity_id

    relationships = []
    for index, (rel_name, ends, attrs) in enumerate(rel_specs, start=1):
        (ref_a, card_a, role_a, tok_a), (ref_b, card_b, role_b, tok_b) = ends
        relationships.append(
            Relationship(
                id=f"r{index}",
                name=rel_name,
                end_a=RelEnd(resolve(ref_a, tok_a), card_a[0], card_a[1], role_a),
                end_b=RelEnd(resolve(ref_b, tok_b), card_b[0], card_b[1], role_b),
                attributes=attrs,
            )
        )

    hierarchies = []
    for index, (super_ref, super_tok, subs, strategy) in enumerate(hierarchy_specs, start=1):
        hierarchies.append(
            Hierarchy(
                id=f"h{index}",
                super_id=resolve(super_ref, super_tok),
                sub_ids=tuple(resolve(ref, tok) for ref, tok in subs),
                strategy=strategy,
            )
        )

    generated = {f"r{i}" for i in range(1, len(relationships) + 1)}
    generated |= {f"h{i}" for i in range(1, len(hierarchies) + 1)}
    clash = generated & set(entity_lines)
    if clash:
        tok = entity_lines[sorted(clash)[0]]
        raise DslParseError(
            f"DUP_ID: entity name {sorted(clash)[0]!r} collides with a generated element id; rename it",
            tok.line,
            tok.column,
        )

    return Diagram(
        name=diagram_name,
        entities=tuple(entities),
        relationships=tuple(relationships),
        hierarchies=tuple(hierarchies),
    )


_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _name_text(name: str) -> str:
    if _IDENT_RE.match(name) and name.lower() not in _KEYWORDS and name != "N":
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _type_text(t: LogicalType) -> str:
    if t.kind is TypeKind.VARCHAR:
        return f"varchar({t.length})"
    if t.kind is TypeKind.NUMERIC:
        return f"numeric({t.precision},{t.scale})"
    return t.kind.value


def _attr_line(a: Attribute) -> str:
    parts = [f"{_name_text(a.name)}: {_type_text(a.logical_type)}"]
    if a.is_pk:
        parts.append("pk")
    if a.is_partial_id:
        parts.append("pid")
    if a.mandatory and not a.is_pk:
        parts.append("mandatory")
    if a.unique:
        parts.append("unique")
    if a.auto_increment:
        parts.append("auto")
    if a.check_sql is not None:
        parts.append(f"check {_quote(a.check_sql)}")
    return " ".join(parts)


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def emit_dsl(diagram: Diagram) -> DslSource:
    """Render a diagram as canonical DSL text (geometry is not representable)."""
    names = {e.id: e.name for e in diagram.entities}
    blocks: list[str] = [f"# diagram: {diagram.name}"]

    for entity in diagram.entities:
        head = f"entity {_name_text(entity.name)}"
        if entity.is_weak:
            head += " weak"
        if entity.attributes:
            body = "\n".join(f"  {_attr_line(a)}" for a in entity.attributes)
            blocks.append(f"{head} {{\n{body}\n}}")
        else:
            blocks.append(head + " {\n}")

    for rel in diagram.relationships:
        ends = []
        for end in rel.ends:
            text = f"{_name_text(names.get(end.entity_id, end.entity_id))} ({end.min_card},{end.max_card.value})"
            if end.role is not None:
                text += f" as {_name_text(end.role)}"
            ends.append(text)
        line = f"rel {_name_text(rel.name)} between {ends[0]} and {ends[1]}"
        if rel.attributes:
            body = "\n".join(f"  {_attr_line(a)}" for a in rel.attributes)
            line += f" {{\n{body}\n}}"
        blocks.append(line)

    for h in diagram.hierarchies:
        subs = ", ".join(_name_text(names.get(s, s)) for s in h.sub_ids)
        blocks.append(
            f"hierarchy {_name_text(names.get(h.super_id, h.super_id))} -> ({subs}) "
            f"strategy {h.strategy.value}"
        )

    return DslSource(text="\n\n".join(blocks) + "\n")
