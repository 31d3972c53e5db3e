"""Parser for the CREATE TABLE subset used for relational schemas."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import ParseError

RELATIONSHIP_MARK = "@relationship"


@dataclass
class Column:
    name: str
    sql_type: str  # upper-cased base name, e.g. VARCHAR
    args: tuple = ()
    not_null: bool = False

    @property
    def type_text(self) -> str:
        if not self.args:
            return self.sql_type
        return f"{self.sql_type}({', '.join(str(a) for a in self.args)})"


@dataclass
class ForeignKey:
    columns: tuple[str, ...]
    target: str
    target_columns: tuple[str, ...]


@dataclass
class Table:
    name: str
    columns: list[Column] = field(default_factory=list)
    primary_key: tuple[str, ...] = ()
    foreign_keys: list[ForeignKey] = field(default_factory=list)
    is_relationship: bool = False
    line: int = 0

    def column(self, name: str) -> Column | None:
        for c in self.columns:
            if c.name == name:
                return c
        return None


@dataclass
class DdlSchema:
    tables: list[Table] = field(default_factory=list)

    def table(self, name: str) -> Table | None:
        for t in self.tables:
            if t.name == name:
                return t
        return None


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>--[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<quoted>`[^`]+`|"[^"]+")
  | (?P<string>'(?:[^']|'')*')
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<punct>[(),;])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int

    @property
    def upper(self) -> str:
        return self.text.upper() if self.kind == "ident" else ""


def _tokenize(text: str, source: str | None) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", source=source,
                             line=line, column=pos - line_start + 1)
        kind, val = m.lastgroup, m.group()
        col = pos - line_start + 1
        if kind == "comment":
            if val[2:].strip().lower() == RELATIONSHIP_MARK:
                toks.append(_Tok("mark", val, line, col))
        elif kind == "quoted":
            toks.append(_Tok("ident", val[1:-1], line, col))
        elif kind == "string":
            toks.append(_Tok("string", val[1:-1].replace("''", "'"), line, col))
        elif kind != "ws":
            toks.append(_Tok(kind, val, line, col))
        nl = val.count("\n")
        if nl:
            line += nl
            line_start = pos + val.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, source: str | None):
        self.source = source
        self.toks = _tokenize(text, source)
        self.i = 0

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        return ParseError(f"{msg}, found {found!r}", source=self.source, line=tok.line,
                          column=tok.col)

    def keyword(self, *words: str) -> None:
        for w in words:
            t = self.peek()
            if t.upper != w:
                raise self.error(f"expected {w}")
            self.i += 1

    def punct(self, p: str) -> None:
        t = self.peek()
        if t.kind != "punct" or t.text != p:
            raise self.error(f"expected {p!r}")
        self.i += 1

    def ident(self, what: str) -> str:
        t = self.peek()
        if t.kind != "ident":
            raise self.error(f"expected {what}")
        self.i += 1
        return t.text

    def names(self) -> tuple[str, ...]:
        self.punct("(")
        out = [self.ident("column name")]
        while self.peek().text == ",":
            self.i += 1
            out.append(self.ident("column name"))
        self.punct(")")
        return tuple(out)

    def parse(self) -> DdlSchema:
        schema = DdlSchema()
        seen: dict[str, int] = {}
        pending_mark = False
        while self.peek().kind != "eof":
            t = self.peek()
            if t.kind == "mark":
                pending_mark = True
                self.i += 1
                continue
            if t.kind == "punct" and t.text == ";":
                self.i += 1
                continue
            table = self.create_table()
            table.is_relationship = pending_mark
            pending_mark = False
            if table.name in seen:
                raise ParseError(f"duplicate table {table.name!r} (first defined on line "
                                 f"{seen[table.name]})", source=self.source, line=table.line)
            seen[table.name] = table.line
            schema.tables.append(table)
        self.check(schema)
        return schema

    def create_table(self) -> Table:
        start = self.peek()
        self.keyword("CREATE", "TABLE")
        if self.peek().upper == "IF":
            self.keyword("IF", "NOT", "EXISTS")
        table = Table(self.ident("table name"), line=start.line)
        self.punct("(")
        pk_inline: list[str] = []
        while True:
            self.item(table, pk_inline)
            t = self.next()
            if t.kind == "punct" and t.text == ",":
                continue
            if t.kind == "punct" and t.text == ")":
                break
            raise self.error("expected ',' or ')'", t)
        if self.peek().kind != "eof":
            self.punct(";")
        else:
            raise self.error("expected ';'")
        if pk_inline:
            if table.primary_key:
                raise ParseError(f"table {table.name!r} declares its primary key twice",
                                 source=self.source, line=table.line)
            table.primary_key = tuple(pk_inline)
        return table

    def item(self, table: Table, pk_inline: list[str]) -> None:
        head = self.peek()
        if head.upper == "CONSTRAINT":
            self.i += 1
            self.ident("constraint name")
            head = self.peek()
        if head.upper == "PRIMARY" and self.peek(1).upper == "KEY":
            self.keyword("PRIMARY", "KEY")
            if table.primary_key:
                raise self.error(f"table {table.name!r} declares its primary key twice", head)
            table.primary_key = self.names()
            return
        if head.upper == "FOREIGN" and self.peek(1).upper == "KEY":
            self.keyword("FOREIGN", "KEY")
            cols = self.names()
            self.keyword("REFERENCES")
            target = self.ident("referenced table")
            tcols = self.names()
            if len(cols) != len(tcols):
                raise self.error("foreign key column lists differ in length", head)
            table.foreign_keys.append(ForeignKey(cols, target, tcols))
            return
        name = self.ident("column name")
        type_tok = self.peek()
        base = self.ident("column type").upper()
        args: list = []
        if self.peek().text == "(":
            self.i += 1
            while True:
                a = self.next()
                if a.kind == "number":
                    args.append(int(a.text) if a.text.isdigit() else float(a.text))
                elif a.kind == "string":
                    args.append(a.text)
                else:
                    raise self.error("expected a type argument", a)
                sep = self.next()
                if sep.text == ")":
                    break
                if sep.text != ",":
                    raise self.error("expected ',' or ')'", sep)
        if table.column(name) is not None:
            raise self.error(f"duplicate column {name!r}", type_tok)
        col = Column(name, base, tuple(args))
        while True:
            t = self.peek()
            if t.upper == "NOT" and self.peek(1).upper == "NULL":
                self.i += 2
                col.not_null = True
            elif t.upper == "NULL":
                self.i += 1
            elif t.upper == "PRIMARY" and self.peek(1).upper == "KEY":
                self.i += 2
                pk_inline.append(name)
                col.not_null = True
            else:
                break
        table.columns.append(col)

    def check(self, schema: DdlSchema) -> None:
        # foreign keys are checked once every table is known, since they may be circular
        for t in schema.tables:
            for c in t.primary_key:
                if t.column(c) is None:
                    raise ParseError(f"primary key column {c!r} not in table {t.name!r}",
                                     source=self.source, line=t.line)
            for fk in t.foreign_keys:
                for c in fk.columns:
                    if t.column(c) is None:
                        raise ParseError(f"foreign key column {c!r} not in table {t.name!r}",
                                         source=self.source, line=t.line)
                target = schema.table(fk.target)
                if target is None:
                    raise ParseError(f"table {t.name!r} references unknown table {fk.target!r}",
                                     source=self.source, line=t.line)
                for c in fk.target_columns:
                    if target.column(c) is None:
                        raise ParseError(f"table {t.name!r} references unknown column "
                                         f"{fk.target}.{c}", source=self.source, line=t.line)


def parse_ddl(text: str, source: str | None = None) -> DdlSchema:
    return _Parser(text, source).parse()
