"""Key-value dumps using the flattened ``<entity>:<id>:<path>`` key pattern."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from ..errors import ParseError

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INDEX = re.compile(r"\[(\d+)\]")


@dataclass(frozen=True)
class Segment:
    name: str
    indices: tuple[int, ...] = ()

    def __str__(self) -> str:
        return self.name + "".join(f"[{i}]" for i in self.indices)


@dataclass(frozen=True)
class FlatKey:
    entity: str
    id: str
    path: tuple[Segment, ...]

    def __str__(self) -> str:
        return f"{self.entity}:{self.id}:" + ".".join(str(s) for s in self.path)


def parse_flat_key(key: str) -> FlatKey:
    m = _NAME.match(key)
    if not m:
        raise ParseError(f"bad entity name in key {key!r}", column=1)
    entity = m.group()
    pos = m.end()
    if pos >= len(key) or key[pos] != ":":
        raise ParseError(f"expected ':' after entity in key {key!r}", column=pos + 1)
    end = key.find(":", pos + 1)
    if end < 0:
        raise ParseError(f"key {key!r} has no property part", column=len(key) + 1)
    ident = key[pos + 1:end]
    if not ident:
        raise ParseError(f"empty id in key {key!r}", column=pos + 2)
    pos = end + 1
    segments = []
    while True:
        m = _NAME.match(key, pos)
        if not m:
            raise ParseError(f"bad property name in key {key!r}", column=pos + 1)
        name = m.group()
        pos = m.end()
        indices = []
        while True:
            mi = _INDEX.match(key, pos)
            if not mi:
                break
            indices.append(int(mi.group(1)))
            pos = mi.end()
        segments.append(Segment(name, tuple(indices)))
        if pos == len(key):
            break
        if key[pos] != ".":
            raise ParseError(f"unexpected {key[pos]!r} in key {key!r}", column=pos + 1)
        pos += 1
    return FlatKey(entity, ident, tuple(segments))


def format_flat_key(entity: str, ident, path: Iterable[Segment]) -> str:
    return f"{entity}:{ident}:" + ".".join(str(s) for s in path)


class _Sparse(dict):
    """Array under construction: index -> value."""


def _assign(root: dict, fk: FlatKey, value, raw_key: str) -> None:
    steps: list = []
    for seg in fk.path:
        steps.append(seg.name)
        steps.extend(seg.indices)
    node = root
    for i, step in enumerate(steps):
        last = i == len(steps) - 1
        want_array = not last and isinstance(steps[i + 1], int)
        if isinstance(step, int) != isinstance(node, _Sparse):
            raise ParseError(f"conflicting structure at key {raw_key!r}")
        if last:
            if step in node:
                if isinstance(node[step], (dict, _Sparse)) or node[step] != value:
                    raise ParseError(f"conflicting assignment at key {raw_key!r}")
            node[step] = value
            return
        child = node.get(step)
        if child is None and step not in node:
            child = _Sparse() if want_array else {}
            node[step] = child
        elif not isinstance(child, (dict, _Sparse)) or isinstance(child, _Sparse) != want_array:
            raise ParseError(f"conflicting assignment at key {raw_key!r}")
        node = child


def _densify(value):
    if isinstance(value, _Sparse):
        return [_densify(value[i]) for i in sorted(value)]
    if isinstance(value, dict):
        return {k: _densify(v) for k, v in value.items()}
    return value


def reconstruct_kv_objects(pairs: Iterable[tuple[str, object]]) -> Iterator[tuple[str, dict]]:
    """Group pairs by (entity, id) and rebuild one nested object per group."""
    groups: dict[tuple[str, str], dict] = {}
    for key, value in pairs:
        if isinstance(value, (dict, list)):
            raise ParseError(f"value for key {key!r} must be a scalar")
        try:
            fk = parse_flat_key(key)
        except ParseError as exc:
            raise ParseError(str(exc)) from None
        obj = groups.setdefault((fk.entity, fk.id), {})
        _assign(obj, fk, value, key)
    for (entity, ident), obj in groups.items():
        record = {"_id": ident}
        record.update(_densify(obj))
        yield entity, record


def kv_files(path) -> list[Path]:
    p = Path(path)
    if p.is_file():
        return [p]
    if p.is_dir():
        return sorted(p.glob("*.kvl"))
    raise ParseError("input path does not exist", source=str(p))


def read_pairs(path) -> Iterator[tuple[str, object]]:
    for f in kv_files(path):
        with f.open(encoding="utf-8") as fh:
            for lineno, text in enumerate(fh, start=1):
                if not text.strip():
                    continue
                try:
                    item = json.loads(text)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"malformed JSON ({exc.msg})", source=str(f),
                                     line=lineno, column=exc.colno) from None
                if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], str)):
                    raise ParseError('expected ["<key>", <scalar>]', source=str(f), line=lineno)
                if isinstance(item[1], (dict, list)):
                    raise ParseError("pair value must be a scalar", source=str(f), line=lineno)
                try:
                    parse_flat_key(item[0])
                except ParseError as exc:
                    raise ParseError(str(exc), source=str(f), line=lineno) from None
                yield item[0], item[1]


def read_keyvalue(path) -> Iterator[tuple[str, dict]]:
    return reconstruct_kv_objects(read_pairs(path))


def flatten_record(entity: str, ident, record: dict) -> list[tuple[str, object]]:
    """Inverse of reconstruction; ``_id`` is carried by the key, not stored."""
    out: list[tuple[str, object]] = []

    def walk(value, segs: list[Segment]):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(v, segs + [Segment(k)])
        elif isinstance(value, list):
            last = segs[-1]
            for i, v in enumerate(value):
                walk(v, segs[:-1] + [Segment(last.name, last.indices + (i,))])
        else:
            out.append((format_flat_key(entity, ident, segs), value))

    for k, v in record.items():
        if k != "_id":
            walk(v, [Segment(k)])
    return out
