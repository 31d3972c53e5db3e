"""Document dumps: one ``<Entity>.jsonl`` file per collection."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

from ..errors import ParseError


def collection_files(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise ParseError("input directory does not exist", source=str(d))
    return sorted(d.glob("*.jsonl"))


def iter_lines(directory) -> Iterator[tuple[str, str, int, str]]:
    """Yield ``(entity, source, line number, text)`` for every non-blank line."""
    for path in collection_files(directory):
        with path.open(encoding="utf-8") as fh:
            for lineno, text in enumerate(fh, start=1):
                if text.strip():
                    yield path.stem, str(path), lineno, text


def decode_line(source: str, lineno: int, text: str) -> dict:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON ({exc.msg})", source=source, line=lineno,
                         column=exc.colno) from None
    if not isinstance(record, dict):
        raise ParseError("each line must hold a JSON object", source=source, line=lineno)
    if "_id" not in record:
        raise ParseError("record has no _id field", source=source, line=lineno)
    return record


def read_document(directory) -> Iterator[tuple[str, dict]]:
    for entity, source, lineno, text in iter_lines(directory):
        yield entity, decode_line(source, lineno, text)
