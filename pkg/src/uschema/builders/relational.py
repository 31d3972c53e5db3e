"""Relational builder: tables to entity or relationship types, one variation each."""

from __future__ import annotations

import logging

from ..adapters.ddl import Column, DdlSchema
from ..errors import BuildError
from ..model.types import (
    Attribute,
    EntityType,
    Key,
    Primitive,
    Reference,
    RelationshipType,
    StructuralVariation,
    USchemaModel,
)

log = logging.getLogger(__name__)

_SQL_TYPES = {
    "number": ("INT", "INTEGER", "BIGINT", "SMALLINT", "TINYINT", "MEDIUMINT", "DECIMAL",
               "NUMERIC", "FLOAT", "DOUBLE", "REAL"),
    "string": ("CHAR", "VARCHAR", "TEXT", "TINYTEXT", "MEDIUMTEXT", "LONGTEXT", "NCHAR",
               "NVARCHAR"),
    "timestamp": ("DATE", "DATETIME", "TIMESTAMP"),
    "boolean": ("BOOLEAN", "BOOL"),
    "blob": ("BLOB", "TINYBLOB", "MEDIUMBLOB", "LONGBLOB", "BINARY", "VARBINARY"),
    "json": ("JSON",),
}
_SQL_LOOKUP = {sql: kind for kind, names in _SQL_TYPES.items() for sql in names}


def map_sql_type(col: Column, warnings: list[str] | None = None) -> Primitive:
    if col.sql_type == "TINYINT" and col.args == (1,):
        return Primitive("boolean")
    kind = _SQL_LOOKUP.get(col.sql_type)
    if kind is None:
        msg = f"unknown SQL type {col.type_text} for column {col.name!r}; kept as {col.sql_type.lower()!r}"
        log.warning(msg)
        if warnings is not None:
            warnings.append(msg)
        return Primitive(col.sql_type.lower())
    return Primitive(kind)


def pk_name(table) -> str:
    return table.primary_key[0] if len(table.primary_key) == 1 else f"{table.name}_pk"


def fk_name(fk) -> str:
    return fk.columns[0] if len(fk.columns) == 1 else f"{fk.target}_fk"


def build_relational(ddl: DdlSchema, db_name: str,
                     warnings: list[str] | None = None) -> USchemaModel:
    kinds = {t.name: t.is_relationship for t in ddl.tables}
    entities, rels = [], []
    for t in ddl.tables:
        feats: list = [
            Attribute(c.name, map_sql_type(c, warnings), is_key=c.name in t.primary_key)
            for c in t.columns
        ]
        if t.primary_key:
            feats.append(Key(pk_name(t), tuple(t.primary_key)))
        for fk in t.foreign_keys:
            if kinds.get(fk.target):
                raise BuildError(f"table {t.name!r} has a foreign key to relationship table "
                                 f"{fk.target!r}")
            lower = 1 if all(t.column(c).not_null for c in fk.columns) else 0
            feats.append(Reference(fk_name(fk), fk.target, tuple(fk.columns), lower, 1))
        variation = StructuralVariation(1, 0, tuple(feats))
        if t.is_relationship:
            rels.append(RelationshipType(t.name, (variation,)))
        else:
            entities.append(EntityType(t.name, (variation,), root=True))
    return USchemaModel(db_name, tuple(entities), tuple(rels), paradigm="relational")
