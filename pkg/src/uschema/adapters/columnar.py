"""Columnar dumps: ``<Table>.jsonl`` rows of ``{"key", "families"}``."""

from __future__ import annotations

import json
from typing import Iterator

from ..errors import ParseError
from .document import collection_files

DEFAULT_FAMILY = "_default"


class _Sparse(dict):
    pass


def _steps(column: str) -> list:
    return [int(p) if p.isdigit() else p for p in column.split(".")]


def _put(root, steps: list, value, where: str):
    node = root
    for i, step in enumerate(steps):
        if isinstance(step, int) != isinstance(node, _Sparse):
            raise ParseError(f"column {where!r} mixes array and object layouts")
        if i == len(steps) - 1:
            if step in node:
                raise ParseError(f"column {where!r} assigned twice")
            node[step] = value
            return
        nxt_array = isinstance(steps[i + 1], int)
        child = node.get(step)
        if step not in node:
            child = node[step] = _Sparse() if nxt_array else {}
        elif not isinstance(child, (dict, _Sparse)) or isinstance(child, _Sparse) != nxt_array:
            raise ParseError(f"column {where!r} conflicts with another column")
        node = child


def _dense(v):
    if isinstance(v, _Sparse):
        return [_dense(v[i]) for i in sorted(v)]
    if isinstance(v, dict):
        return {k: _dense(x) for k, x in v.items()}
    return v


def decode_family(columns: dict) -> object:
    """Assemble one family's columns into an object or, for index columns, an array."""
    if not columns:
        return {}
    keys = [_steps(c) for c in columns]
    if all(isinstance(k[0], int) for k in keys):
        root = _Sparse()
    elif any(isinstance(k[0], int) for k in keys):
        raise ParseError("family mixes indexed and named columns")
    else:
        root = {}
    for col, steps in zip(columns, keys):
        _put(root, steps, columns[col], col)
    return _dense(root)


def decode_row(table: str, row) -> dict:
    if not isinstance(row, dict) or "key" not in row or not isinstance(row.get("families"), dict):
        raise ParseError('row must be {"key": ..., "families": {...}}')
    families = row["families"]
    if table in families and DEFAULT_FAMILY in families:
        raise ParseError(f"row has both a {table!r} and a {DEFAULT_FAMILY!r} family")
    record = {"_id": row["key"]}
    for fam, cols in families.items():
        if not fam:
            raise ParseError("empty family name")
        if not isinstance(cols, dict):
            raise ParseError(f"family {fam!r} must map column names to values")
        for c in cols:
            if not c:
                raise ParseError(f"empty column name in family {fam!r}")
        value = decode_family(cols)
        if fam in (table, DEFAULT_FAMILY):
            if isinstance(value, list):
                raise ParseError("default family cannot hold indexed columns")
            for k, v in value.items():
                if k in record:
                    raise ParseError(f"field {k!r} defined twice")
                record[k] = v
        else:
            if fam in record:
                raise ParseError(f"field {fam!r} defined twice")
            record[fam] = value
    return record


def iter_rows(directory) -> Iterator[tuple[str, str, int, str]]:
    for path in collection_files(directory):
        with path.open(encoding="utf-8") as fh:
            for lineno, text in enumerate(fh, start=1):
                if text.strip():
                    yield path.stem, str(path), lineno, text


def decode_line(table: str, source: str, lineno: int, text: str) -> dict:
    try:
        row = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON ({exc.msg})", source=source, line=lineno,
                         column=exc.colno) from None
    try:
        return decode_row(table, row)
    except ParseError as exc:
        raise ParseError(str(exc), source=source, line=lineno) from None


def read_columnar(directory) -> Iterator[tuple[str, dict]]:
    for table, source, lineno, text in iter_rows(directory):
        yield table, decode_line(table, source, lineno, text)


def _is_aggregate_value(v) -> bool:
    return isinstance(v, dict) or (
        isinstance(v, list) and bool(v) and any(isinstance(x, dict) for x in v))


def _flatten(value, prefix: str, out: dict) -> None:
    if isinstance(value, dict):
        if not value and prefix:
            raise ValueError("empty objects cannot be stored as columns")
        for k, v in value.items():
            _flatten(v, f"{prefix}.{k}" if prefix else k, out)
    elif isinstance(value, list) and any(isinstance(x, dict) for x in value):
        for i, v in enumerate(value):
            _flatten(v, f"{prefix}.{i}" if prefix else str(i), out)
    else:
        out[prefix] = value


def encode_row(table: str, record: dict) -> dict:
    """Row layout used by the writer: embedded objects get their own family."""
    families: dict[str, dict] = {}
    default: dict = {}
    for k, v in record.items():
        if k == "_id":
            continue
        if _is_aggregate_value(v):
            cols: dict = {}
            _flatten(v, "", cols)
            families[k] = cols
        else:
            default[k] = v
    out = {table: default} if default else {}
    out.update(families)
    return {"key": record["_id"], "families": out}
