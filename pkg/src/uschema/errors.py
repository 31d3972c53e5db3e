"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class USchemaError(Exception):
    """Base class for every error raised by this package."""


class ModelError(USchemaError):
    """A model violates a metamodel invariant."""


class ParseError(USchemaError):
    """Malformed input: dump lines, flat keys, DDL text or model documents."""

    def __init__(self, message: str, *, source: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.source = source
        self.line = line
        self.column = column
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class BuildError(USchemaError):
    """Variation schemas or DDL cannot be turned into a model."""


class SynthError(USchemaError):
    """A model cannot be realized as a dataset for the requested paradigm."""
